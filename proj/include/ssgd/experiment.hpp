#pragma once

// Batch driver: config files, basis-state sweeps, quench references,
// with/without-ancilla comparisons and columnar result files.

#include "ssgd/optimizer.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace ssgd {

enum class ModelKind { tfim, rydberg };
enum class SweepMode { all_basis_states, listed_states, single_state };
enum class Ablation { with_ancilla, unitary_only, both };
enum class QuenchStart { all_up, all_down };
enum class Label { ground, metastable, other };

inline std::string to_string(ModelKind m) { return m == ModelKind::tfim ? "tfim" : "rydberg"; }
inline std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::all_basis_states: return "all_basis_states";
    case SweepMode::listed_states: return "listed_states";
    default: return "single_state";
  }
}
inline std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::with_ancilla: return "with_ancilla";
    case Ablation::unitary_only: return "unitary_only";
    default: return "both";
  }
}
inline std::string to_string(QuenchStart q) { return q == QuenchStart::all_up ? "all_up" : "all_down"; }
inline std::string to_string(Label l) {
  switch (l) {
    case Label::ground: return "ground";
    case Label::metastable: return "metastable";
    default: return "other";
  }
}

inline ModelKind model_from_string(std::string_view s) {
  if (s == "tfim") return ModelKind::tfim;
  if (s == "rydberg") return ModelKind::rydberg;
  throw value_error("unknown model '" + std::string(s) + "'");
}
inline SweepMode sweep_from_string(std::string_view s) {
  if (s == "all_basis_states") return SweepMode::all_basis_states;
  if (s == "listed_states") return SweepMode::listed_states;
  if (s == "single_state") return SweepMode::single_state;
  throw value_error("unknown sweep mode '" + std::string(s) + "'");
}
inline Ablation ablation_from_string(std::string_view s) {
  if (s == "with_ancilla") return Ablation::with_ancilla;
  if (s == "unitary_only") return Ablation::unitary_only;
  if (s == "both") return Ablation::both;
  throw value_error("unknown ablation '" + std::string(s) + "'");
}
inline QuenchStart quench_start_from_string(std::string_view s) {
  if (s == "all_up") return QuenchStart::all_up;
  if (s == "all_down") return QuenchStart::all_down;
  throw value_error("unknown quench start '" + std::string(s) + "'");
}
inline Label label_from_string(std::string_view s) {
  if (s == "ground") return Label::ground;
  if (s == "metastable") return Label::metastable;
  if (s == "other") return Label::other;
  throw value_error("unknown label '" + std::string(s) + "'");
}

struct ExperimentConfig {
  ModelKind model = ModelKind::tfim;
  TfimParams tfim;
  RydbergParams rydberg;
  int k = 2;
  bool brickwall = false;
  SsgdConfig ssgd;
  SweepMode sweep = SweepMode::all_basis_states;
  std::vector<std::string> states;
  Ablation ablation = Ablation::with_ancilla;
  std::string output = "results";
  /// TFIM cluster half-width as a fraction of |E_meta - E_ground|.
  double half_width_fraction = 0.1;
  /// Rydberg states with |Neel| below this are labelled other.
  double neel_margin = 0.1;
  QuenchStart quench_start = QuenchStart::all_down;
  int workers = 0;  // 0 = hardware concurrency

  int n_system() const { return model == ModelKind::tfim ? tfim.n_sites : rydberg.n_atoms; }
  Boundary boundary() const { return model == ModelKind::tfim ? tfim.boundary : Boundary::periodic; }

  void validate() const {
    ssgd.validate();
    if (model == ModelKind::tfim) tfim.validate();
    else rydberg.validate();
    if (n_system() > 10) throw value_error("dense simulation is limited to 10 system qubits");
    if (k < 1 || k > n_system()) throw value_error("generator locality k out of range");
    if (sweep != SweepMode::all_basis_states) {
      if (states.empty()) throw value_error("listed sweep needs at least one state");
      if (sweep == SweepMode::single_state && states.size() != 1) throw value_error("single_state sweep takes exactly one state");
      for (const auto& s : states)
        if (static_cast<int>(s.size()) != n_system() || s.find_first_not_of("01") != std::string::npos)
          throw value_error("state '" + s + "' is not a bitstring of length " + std::to_string(n_system()));
    }
    if (!(half_width_fraction > 0.0)) throw value_error("half_width_fraction must be > 0");
    if (!(neel_margin >= 0.0)) throw value_error("neel_margin must be >= 0");
    if (workers < 0) throw value_error("workers must be >= 0");
  }

  DenseOperator hamiltonian() const { return model == ModelKind::tfim ? build_tfim(tfim) : build_rydberg(rydberg); }

  GeneratorSet generators() const { return build_standard(k, RegisterLayout(n_system(), 1), boundary()); }

  std::vector<std::string> initial_states() const {
    if (sweep != SweepMode::all_basis_states) return states;
    std::vector<std::string> out;
    const int n = n_system();
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
      std::string s(static_cast<std::size_t>(n), '0');
      for (int i = 0; i < n; ++i)
        if ((b >> (n - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
      out.push_back(s);
    }
    return out;
  }

  /// Flat `key = value` text; `#` starts a comment.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
  void set(std::string_view key, std::string_view value);
  std::string emit() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw value_error("key '" + std::string(key) + "': not a number: " + s);
  return x;
}

inline long long to_int(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw value_error("key '" + std::string(key) + "': not an integer: " + s);
  return x;
}

inline bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw value_error("key '" + std::string(key) + "': not a boolean: " + std::string(v));
}

inline std::string num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace detail

inline void ExperimentConfig::set(std::string_view key, std::string_view value) {
  using namespace detail;
  const std::string v = trim(value);
  if (key == "model") model = model_from_string(v);
  else if (key == "tfim.n_sites") tfim.n_sites = static_cast<int>(to_int(key, v));
  else if (key == "tfim.J") tfim.J = to_double(key, v);
  else if (key == "tfim.h_x") tfim.h_x = to_double(key, v);
  else if (key == "tfim.h_z") tfim.h_z = to_double(key, v);
  else if (key == "tfim.boundary") tfim.boundary = boundary_from_string(v);
  else if (key == "rydberg.n_atoms") rydberg.n_atoms = static_cast<int>(to_int(key, v));
  else if (key == "rydberg.rabi_mhz") rydberg.rabi_over_2pi = to_double(key, v);
  else if (key == "rydberg.lattice_spacing_um") rydberg.lattice_spacing = to_double(key, v);
  else if (key == "rydberg.blockade_radius_um") rydberg.blockade_radius = to_double(key, v);
  else if (key == "rydberg.detuning_global_mhz") rydberg.detuning_glob_over_2pi = to_double(key, v);
  else if (key == "rydberg.detuning_local_mhz") rydberg.detuning_loc_over_2pi = to_double(key, v);
  else if (key == "rydberg.c6") {
    if (v == "auto") rydberg.c6.reset();
    else rydberg.c6 = to_double(key, v);
  } else if (key == "generators.k") k = static_cast<int>(to_int(key, v));
  else if (key == "generators.brickwall") brickwall = to_bool(key, v);
  else if (key == "ssgd.max_iters") ssgd.max_iters = static_cast<int>(to_int(key, v));
  else if (key == "ssgd.step_system") ssgd.step_system = to_double(key, v);
  else if (key == "ssgd.step_ancilla") ssgd.step_ancilla = to_double(key, v);
  else if (key == "ssgd.max_ancilla_angle") ssgd.max_ancilla_angle = to_double(key, v);
  else if (key == "ssgd.noise") ssgd.noise = noise_mode_from_string(v);
  else if (key == "ssgd.noise_variance") ssgd.noise_variance = to_double(key, v);
  else if (key == "ssgd.hessian_noise_variance") ssgd.hessian_noise_variance = to_double(key, v);
  else if (key == "ssgd.e_tol") ssgd.e_tol = to_double(key, v);
  else if (key == "ssgd.seed") ssgd.seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "ssgd.convergence_grad_tol") ssgd.convergence_grad_tol = to_double(key, v);
  else if (key == "ssgd.convergence_window") ssgd.convergence_window = static_cast<int>(to_int(key, v));
  else if (key == "ssgd.track_fidelity") ssgd.track_fidelity = to_bool(key, v);
  else if (key == "sweep.mode") sweep = sweep_from_string(v);
  else if (key == "sweep.states") {
    states.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
      if (auto t = trim(item); !t.empty()) states.push_back(t);
  } else if (key == "ablation") ablation = ablation_from_string(v);
  else if (key == "output.dir") output = v;
  else if (key == "classify.half_width_fraction") half_width_fraction = to_double(key, v);
  else if (key == "classify.neel_margin") neel_margin = to_double(key, v);
  else if (key == "quench.start") quench_start = quench_start_from_string(v);
  else if (key == "workers") workers = static_cast<int>(to_int(key, v));
  else throw value_error("unknown config key '" + std::string(key) + "'");
}

inline ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::stringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw value_error(fmt::format("config line {}: expected key = value", lineno));
    cfg.set(detail::trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline std::string ExperimentConfig::emit() const {
  using detail::num;
  std::string states_csv;
  for (std::size_t i = 0; i < states.size(); ++i) states_csv += (i ? "," : "") + states[i];
  std::string out;
  auto kv = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  kv("model", to_string(model));
  kv("tfim.n_sites", std::to_string(tfim.n_sites));
  kv("tfim.J", num(tfim.J));
  kv("tfim.h_x", num(tfim.h_x));
  kv("tfim.h_z", num(tfim.h_z));
  kv("tfim.boundary", to_string(tfim.boundary));
  kv("rydberg.n_atoms", std::to_string(rydberg.n_atoms));
  kv("rydberg.rabi_mhz", num(rydberg.rabi_over_2pi));
  kv("rydberg.lattice_spacing_um", num(rydberg.lattice_spacing));
  kv("rydberg.blockade_radius_um", num(rydberg.blockade_radius));
  kv("rydberg.detuning_global_mhz", num(rydberg.detuning_glob_over_2pi));
  kv("rydberg.detuning_local_mhz", num(rydberg.detuning_loc_over_2pi));
  kv("rydberg.c6", rydberg.c6 ? num(*rydberg.c6) : "auto");
  kv("generators.k", std::to_string(k));
  kv("generators.brickwall", brickwall ? "true" : "false");
  kv("ssgd.max_iters", std::to_string(ssgd.max_iters));
  kv("ssgd.step_system", num(ssgd.step_system));
  kv("ssgd.step_ancilla", num(ssgd.step_ancilla));
  kv("ssgd.max_ancilla_angle", num(ssgd.max_ancilla_angle));
  kv("ssgd.noise", to_string(ssgd.noise));
  kv("ssgd.noise_variance", num(ssgd.noise_variance));
  kv("ssgd.hessian_noise_variance", num(ssgd.hessian_noise_variance));
  kv("ssgd.e_tol", num(ssgd.e_tol));
  kv("ssgd.seed", std::to_string(ssgd.seed));
  kv("ssgd.convergence_grad_tol", num(ssgd.convergence_grad_tol));
  kv("ssgd.convergence_window", std::to_string(ssgd.convergence_window));
  kv("ssgd.track_fidelity", ssgd.track_fidelity ? "true" : "false");
  kv("sweep.mode", to_string(sweep));
  kv("sweep.states", states_csv);
  kv("ablation", to_string(ablation));
  kv("output.dir", output);
  kv("classify.half_width_fraction", num(half_width_fraction));
  kv("classify.neel_margin", num(neel_margin));
  kv("quench.start", to_string(quench_start));
  kv("workers", std::to_string(workers));
  return out;
}

// ---------------------------------------------------------------------------
// Reference energies and classification.

struct ClassifierReference {
  ModelKind model = ModelKind::tfim;
  double ground = 0.0;
  double metastable = std::numeric_limits<double>::quiet_NaN();
  double half_width = 0.0;
  double neel_margin = 0.1;
};

/// TFIM: nearest reference energy, "other" beyond 3 half-widths of both.
/// Rydberg: sign of the Neel order, "other" inside the margin.
inline Label classify(double energy, double neel, const ClassifierReference& ref) {
  if (ref.model == ModelKind::rydberg) {
    if (neel <= -ref.neel_margin) return Label::ground;
    if (neel >= ref.neel_margin) return Label::metastable;
    return Label::other;
  }
  const double dg = std::abs(energy - ref.ground);
  const double dm = std::isnan(ref.metastable) ? std::numeric_limits<double>::infinity() : std::abs(energy - ref.metastable);
  const double limit = 3.0 * ref.half_width;
  if (std::min(dg, dm) > limit) return Label::other;
  return dg < dm ? Label::ground : Label::metastable;
}

struct QuenchResult {
  DensityMatrix state;
  double energy = 0.0;           // under H(+h_z)
  double energy_quenched = 0.0;  // under H(-h_z) at convergence
  bool converged = false;
  int iterations = 0;
};

/// Ferromagnet relaxed by SSGD under H(-h_z), then paired with H(+h_z).
inline QuenchResult prepare_metastable_tfim(const TfimParams& p, const SsgdConfig& cfg, QuenchStart start = QuenchStart::all_up,
                                            int k = 2) {
  p.validate();
  if (!(p.h_z > 0.0)) throw value_error("quench preparation needs h_z > 0");
  TfimParams flipped = p;
  flipped.h_z = -p.h_z;
  const DenseOperator h_minus = build_tfim(flipped);
  const DenseOperator h_plus = build_tfim(p);
  const RegisterLayout sys(p.n_sites, 0);
  const std::uint64_t index = start == QuenchStart::all_up ? 0 : (std::uint64_t{1} << p.n_sites) - 1;
  SsgdConfig c = cfg;
  c.track_fidelity = false;
  const GeneratorSet gens = build_standard(k, RegisterLayout(p.n_sites, 1), p.boundary);
  const RunResult r = run(h_minus, DensityMatrix::basis_state(sys, index), gens, c);
  if (!r.converged) throw std::runtime_error(fmt::format("quench preparation did not converge within {} iterations", c.max_iters));
  QuenchResult q{r.final_state, expectation(r.final_state, h_plus), expectation(r.final_state, h_minus), true,
                 static_cast<int>(r.trace.size())};
  return q;
}

/// Lowest-energy eigenstate with positive Neel order (the antiphase branch).
inline double rydberg_antiphase_energy(const DenseOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const DensityMatrix rho = DensityMatrix::pure(es.eigenvectors().col(i), h.layout);
    if (neel_order(rho) > 0.0) return es.eigenvalues()(i);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline ClassifierReference make_reference(const ExperimentConfig& cfg) {
  ClassifierReference ref;
  ref.model = cfg.model;
  ref.neel_margin = cfg.neel_margin;
  const DenseOperator h = cfg.hamiltonian();
  ref.ground = reference_energies(h).ground;
  if (cfg.model == ModelKind::tfim) {
    SsgdConfig c = cfg.ssgd;
    c.noise = NoiseMode::off;
    c.max_iters = std::max(c.max_iters, 2000);
    // The band only needs the energy to ~1e-3; the tail towards the strict
    // thresholds can take thousands of steps at larger h_x.
    c.convergence_grad_tol = std::max(c.convergence_grad_tol, 1e-3);
    c.e_tol = std::max(c.e_tol, 1e-2);
    ref.metastable = prepare_metastable_tfim(cfg.tfim, c, cfg.quench_start, cfg.k).energy;
    ref.half_width = cfg.half_width_fraction * std::abs(ref.metastable - ref.ground);
  } else {
    ref.metastable = rydberg_antiphase_energy(h);
  }
  return ref;
}

// ---------------------------------------------------------------------------
// Sweeps and comparisons.

struct SweepEntry {
  std::string initial;
  std::uint64_t seed = 0;
  double final_energy = 0.0;
  double final_neel = 0.0;
  Label label = Label::other;
  bool converged = false;
  std::vector<TrajectoryRecord> trace;
};

struct SweepResult {
  ExperimentConfig config;
  ClassifierReference reference;
  std::vector<SweepEntry> entries;
};

/// Seed for trajectory `index` derived from the master seed.
inline std::uint64_t entry_seed(std::uint64_t master, std::uint64_t index) { return stream_rng(master, index)(); }

namespace detail {

inline RunResult run_configured(const ExperimentConfig& cfg, const DenseOperator& h, const GeneratorSet& gens,
                                const std::string& initial, const SsgdConfig& c) {
  const DensityMatrix rho0 = DensityMatrix::basis_state(RegisterLayout(cfg.n_system(), 0), DensityMatrix::parse_bitstring(initial));
  if (cfg.brickwall) return run(h, rho0, build_brickwall(cfg.n_system(), cfg.boundary()), c);
  return run(h, rho0, gens, c);
}

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  unsigned w = workers > 0 ? static_cast<unsigned>(workers) : std::max(1U, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(count, 1)));
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline SweepResult run_basis_sweep(const ExperimentConfig& cfg, std::optional<ClassifierReference> ref = std::nullopt) {
  cfg.validate();
  SweepResult out{cfg, ref ? *ref : make_reference(cfg), {}};
  const DenseOperator h = cfg.hamiltonian();
  const GeneratorSet gens = cfg.generators();
  const std::vector<std::string> states = cfg.initial_states();
  out.entries.resize(states.size());
  detail::parallel_for(states.size(), cfg.workers, [&](std::size_t i) {
    SsgdConfig c = cfg.ssgd;
    c.seed = entry_seed(cfg.ssgd.seed, i);
    c.unitary_only = cfg.ablation == Ablation::unitary_only;
    const RunResult r = detail::run_configured(cfg, h, gens, states[i], c);
    SweepEntry& e = out.entries[i];
    e.initial = states[i];
    e.seed = c.seed;
    e.final_energy = expectation(r.final_state, h);
    e.final_neel = neel_order(r.final_state);
    e.label = classify(e.final_energy, e.final_neel, out.reference);
    e.converged = r.converged;
    e.trace = r.trace;
  });
  return out;
}

struct ComparisonRow {
  int iter = 0;
  double energy_dissipative = 0.0;
  double energy_unitary = 0.0;
};

struct Comparison {
  std::string initial;
  std::vector<TrajectoryRecord> dissipative;
  std::vector<TrajectoryRecord> unitary;
  std::vector<ComparisonRow> rows;  // length max_iters; a run that stopped early repeats its last energy
};

inline Comparison run_comparison(const ExperimentConfig& cfg, const std::string& initial) {
  ExperimentConfig one = cfg;
  one.sweep = SweepMode::single_state;
  one.states = {initial};
  one.validate();
  const DenseOperator h = cfg.hamiltonian();
  const GeneratorSet gens = cfg.generators();
  SsgdConfig c = cfg.ssgd;
  Comparison out{initial, {}, {}, {}};
  c.unitary_only = false;
  out.dissipative = detail::run_configured(one, h, gens, initial, c).trace;
  c.unitary_only = true;
  out.unitary = detail::run_configured(one, h, gens, initial, c).trace;
  auto at = [](const std::vector<TrajectoryRecord>& t, int i) {
    return t.empty() ? std::numeric_limits<double>::quiet_NaN() : t[std::min<std::size_t>(static_cast<std::size_t>(i), t.size() - 1)].energy;
  };
  for (int i = 0; i < c.max_iters; ++i) out.rows.push_back({i, at(out.dissipative, i), at(out.unitary, i)});
  return out;
}

// ---------------------------------------------------------------------------
// Output files.

/// Honours SSGD_OUTPUT_DIR when set.
inline std::filesystem::path output_directory(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("SSGD_OUTPUT_DIR"); env && *env) return env;
  return cfg.output;
}

inline std::string format_value(double x) { return std::isnan(x) ? "nan" : fmt::format("{:.12e}", x); }

inline std::string trajectory_table(const std::vector<TrajectoryRecord>& trace) {
  std::string out = "iter\tenergy\tgrad_norm\tmin_hessian_eig\tneel\n";
  for (const auto& r : trace)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", r.iter, format_value(r.energy), format_value(r.grad_norm_system),
                       format_value(r.min_hessian_eig), format_value(r.neel.value_or(std::numeric_limits<double>::quiet_NaN())));
  return out;
}

inline std::string summary_table(const SweepResult& r) {
  std::string out = "initial\tseed\tfinal_energy\tfinal_neel\tlabel\tconverged\titerations\n";
  for (const auto& e : r.entries)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", e.initial, e.seed, format_value(e.final_energy), format_value(e.final_neel),
                       to_string(e.label), e.converged ? 1 : 0, e.trace.size());
  return out;
}

inline std::string reference_table(const ClassifierReference& ref) {
  std::string out = "name\tvalue\n";
  out += fmt::format("ground\t{}\n", format_value(ref.ground));
  out += fmt::format("metastable\t{}\n", format_value(ref.metastable));
  out += fmt::format("half_width\t{}\n", format_value(ref.half_width));
  out += fmt::format("neel_margin\t{}\n", format_value(ref.neel_margin));
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// manifest.cfg, summary.tsv, references.tsv, summary.json and one
/// trajectories/<bits>.tsv per entry.
inline void emit_results(const SweepResult& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "trajectories");
  write_file(dir / "manifest.cfg", r.config.emit());
  write_file(dir / "summary.tsv", summary_table(r));
  write_file(dir / "references.tsv", reference_table(r.reference));
  nlohmann::ordered_json j;
  j["ground"] = r.reference.ground;
  j["metastable"] = std::isnan(r.reference.metastable) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.reference.metastable);
  std::map<std::string, int> counts{{"ground", 0}, {"metastable", 0}, {"other", 0}};
  for (const auto& e : r.entries) ++counts[to_string(e.label)];
  j["counts"] = counts;
  j["entries"] = r.entries.size();
  write_file(dir / "summary.json", j.dump(2) + "\n");
  for (const auto& e : r.entries) write_file(dir / "trajectories" / (e.initial + ".tsv"), trajectory_table(e.trace));
}

inline std::string comparison_table(const Comparison& c) {
  std::string out = "iter\tenergy_dissipative\tenergy_unitary\n";
  for (const auto& row : c.rows)
    out += fmt::format("{}\t{}\t{}\n", row.iter, format_value(row.energy_dissipative), format_value(row.energy_unitary));
  return out;
}

inline void emit_comparison(const ExperimentConfig& cfg, const Comparison& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "manifest.cfg", cfg.emit());
  write_file(dir / ("comparison_" + c.initial + ".tsv"), comparison_table(c));
  write_file(dir / ("dissipative_" + c.initial + ".tsv"), trajectory_table(c.dissipative));
  write_file(dir / ("unitary_" + c.initial + ".tsv"), trajectory_table(c.unitary));
}

/// Cluster statistics over the TFIM labels: centres and spreads of the ground
/// and metastable groups.
struct ClusterStats {
  double ground_mean = 0.0, ground_std = 0.0;
  double meta_mean = 0.0, meta_std = 0.0;
  int ground_count = 0, meta_count = 0, other_count = 0;
};

inline ClusterStats cluster_stats(const std::vector<SweepEntry>& entries) {
  ClusterStats s;
  std::vector<double> g, m;
  for (const auto& e : entries) {
    if (e.label == Label::ground) g.push_back(e.final_energy);
    else if (e.label == Label::metastable) m.push_back(e.final_energy);
    else ++s.other_count;
  }
  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    sd = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double x : v) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(v.size()));
  };
  stats(g, s.ground_mean, s.ground_std);
  stats(m, s.meta_mean, s.meta_std);
  s.ground_count = static_cast<int>(g.size());
  s.meta_count = static_cast<int>(m.size());
  return s;
}

}  // namespace ssgd

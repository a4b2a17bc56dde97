#include "ssgd/ssgd.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

namespace {

using namespace ssgd;

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig cfg = path.empty() ? ExperimentConfig{} : ExperimentConfig::load(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw value_error("--set expects key=value, got '" + kv + "'");
    cfg.set(detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void print_sweep(const SweepResult& r, const std::filesystem::path& dir) {
  const ClusterStats s = cluster_stats(r.entries);
  fmt::print("entries: {}\n", r.entries.size());
  fmt::print("ground_reference: {}\n", format_value(r.reference.ground));
  fmt::print("metastable_reference: {}\n", format_value(r.reference.metastable));
  fmt::print("count_ground: {}\ncount_metastable: {}\ncount_other: {}\n", s.ground_count, s.meta_count, s.other_count);
  fmt::print("output: {}\n", dir.string());
}

int cmd_run(const std::string& config, const std::vector<std::string>& sets, const std::string& initial, const std::string& ablation) {
  ExperimentConfig cfg = load_config(config, sets);
  if (!ablation.empty()) cfg.ablation = ablation_from_string(ablation);
  if (!initial.empty()) {
    cfg.sweep = SweepMode::single_state;
    cfg.states = {initial};
  }
  cfg.validate();
  const auto dir = output_directory(cfg);
  if (cfg.ablation == Ablation::both) {
    for (const auto& s : cfg.initial_states()) {
      const Comparison c = run_comparison(cfg, s);
      emit_comparison(cfg, c, dir);
      fmt::print("{}: final_dissipative {} final_unitary {}\n", s, format_value(c.rows.back().energy_dissipative),
                 format_value(c.rows.back().energy_unitary));
    }
    fmt::print("output: {}\n", dir.string());
    return 0;
  }
  const SweepResult r = run_basis_sweep(cfg);
  emit_results(r, dir);
  print_sweep(r, dir);
  return 0;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& sets) {
  ExperimentConfig cfg = load_config(config, sets);
  cfg.sweep = SweepMode::all_basis_states;
  const auto dir = output_directory(cfg);
  const SweepResult r = run_basis_sweep(cfg);
  emit_results(r, dir);
  print_sweep(r, dir);
  return 0;
}

int cmd_quench(const std::string& config, const std::vector<std::string>& sets) {
  const ExperimentConfig cfg = load_config(config, sets);
  if (cfg.model != ModelKind::tfim) throw value_error("quench is defined for the tfim model");
  SsgdConfig c = cfg.ssgd;
  c.noise = NoiseMode::off;
  const QuenchResult q = prepare_metastable_tfim(cfg.tfim, c, cfg.quench_start, cfg.k);
  const double ground = reference_energies(build_tfim(cfg.tfim)).ground;
  fmt::print("start: {}\n", to_string(cfg.quench_start));
  fmt::print("iterations: {}\n", q.iterations);
  fmt::print("energy_before_quench: {}\n", format_value(q.energy_quenched));
  fmt::print("energy_after_quench: {}\n", format_value(q.energy));
  fmt::print("ground_energy: {}\n", format_value(ground));
  fmt::print("neel: {}\n", format_value(neel_order(q.state)));
  return 0;
}

int cmd_lindblad(int trials, int n_system, int k, std::uint64_t seed, double tol) {
  double worst = 0.0;
  double worst_block = 0.0;
  int failed = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(t));
    const LindbladInstance in = random_lindblad_instance(n_system, k, rng);
    const LindbladCheck r = check_lindblad_identity(in.h, in.rho, in.lb, in.gens);
    worst = std::max(worst, r.abs_error);
    worst_block = std::max(worst_block, r.block_error);
    if (!r.passed(tol)) ++failed;
  }
  fmt::print("trials: {}\nmax_abs_error: {:.3e}\nmax_block_error: {:.3e}\nfailed: {}\n", trials, worst, worst_block, failed);
  fmt::print("result: {}\n", failed == 0 ? "PASS" : "FAIL");
  return failed == 0 ? 0 : 1;
}

int cmd_haar(int n_min, int n_max, int samples, std::uint64_t seed, double h_x, double h_z) {
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (int n = n_min; n <= n_max; ++n) {
    TfimParams p;
    p.n_sites = n;
    p.h_x = h_x;
    p.h_z = h_z;
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(n));
    const HaarSurvey s = haar_gradient_survey(build_tfim(p), build_standard(2, RegisterLayout(n, 0)).system_gens, samples, rng);
    const double med = s.median();
    fmt::print("n={} median_max_gradient={:.6e}\n", n, med);
    monotone = monotone && med < prev;
    prev = med;
  }
  fmt::print("result: {}\n", monotone ? "PASS" : "FAIL");
  return monotone ? 0 : 1;
}

int cmd_bp(const std::vector<int>& sizes, int layers, int samples, std::uint64_t seed, double h_x, double h_z) {
  bool ok = true;
  for (int n : sizes) {
    TfimParams p;
    p.n_sites = n;
    p.h_x = h_x;
    p.h_z = h_z;
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(n));
    const VarianceEstimate v = brickwall_variance(build_tfim(p), build_brickwall(n), layers, samples, rng);
    fmt::print("n={} variance={:.6e} std_error={:.3e} bound={:.6e} above_bound={}\n", n, v.variance, v.std_error, v.bound,
               v.above_bound() ? "yes" : "no");
    ok = ok && v.above_bound();
  }
  fmt::print("result: {}\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-space gradient descent experiments"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  std::string initial;
  std::string ablation;

  auto* run = app.add_subcommand("run", "run SSGD from the configured or given initial state(s)");
  run->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  run->add_option("--initial", initial, "initial bitstring");
  run->add_option("--ablation", ablation, "with_ancilla | unitary_only | both");
  run->add_option("--set", sets, "override key=value");

  auto* sweep = app.add_subcommand("sweep", "run every computational basis state");
  sweep->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  sweep->add_option("--set", sets, "override key=value");

  auto* quench = app.add_subcommand("quench", "prepare the TFIM metastable reference state");
  quench->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  quench->add_option("--set", sets, "override key=value");

  int trials = 100;
  int n_system = 2;
  int k = 2;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  auto* lemma2 = app.add_subcommand("check-lemma2", "Hessian / Lindbladian identity on random instances");
  lemma2->add_option("--trials", trials);
  lemma2->add_option("--n-system", n_system);
  lemma2->add_option("--k", k);
  lemma2->add_option("--seed", seed);
  lemma2->add_option("--tol", tol);

  int n_min = 4;
  int n_max = 8;
  int samples = 200;
  double h_x = 0.25;
  double h_z = 0.25;
  auto* haar = app.add_subcommand("haar-survey", "median max-gradient of Haar-random states");
  haar->add_option("--n-min", n_min);
  haar->add_option("--n-max", n_max);
  haar->add_option("--samples", samples);
  haar->add_option("--seed", seed);
  haar->add_option("--h-x", h_x);
  haar->add_option("--h-z", h_z);

  std::vector<int> sizes{4, 6};
  int layers = 8;
  int bp_samples = 500;
  auto* bp = app.add_subcommand("bp-variance", "brickwall energy variance against the lower bound");
  bp->add_option("--n", sizes);
  bp->add_option("--layers", layers);
  bp->add_option("--samples", bp_samples);
  bp->add_option("--seed", seed);
  bp->add_option("--h-x", h_x);
  bp->add_option("--h-z", h_z);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, sets, initial, ablation);
    if (*sweep) return cmd_sweep(config, sets);
    if (*quench) return cmd_quench(config, sets);
    if (*lemma2) return cmd_lindblad(trials, n_system, k, seed, tol);
    if (*haar) return cmd_haar(n_min, n_max, samples, seed, h_x, h_z);
    if (*bp) return cmd_bp(sizes, layers, bp_samples, seed, h_x, h_z);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#pragma once

// State-space gradient descent.
//
// Each iteration attaches a fresh |0> ancilla, measures the system gradient
// g_S (with optional Gaussian shot noise) and the Hessian K over the ancilla
// generators, moves along theta_S = g_S dt_S and theta_A = Q E' dt_A where E'
// keeps only eigenvalues of K below -E_tol, applies the single joint unitary
// exp(-i (theta_S . G_S + theta_A . G_A)) and resets the ancilla.
//
// Sign convention: (g_S)_j = -i Tr([P_j, H] rho) = -dE/dtheta_j, so the step
// theta_S = g_S dt_S descends.

#include "ssgd/generators.hpp"
#include "ssgd/models.hpp"
#include "ssgd/random.hpp"
#include "ssgd/state.hpp"

#include <limits>
#include <map>
#include <optional>

namespace ssgd {

enum class NoiseMode { scaled, fixed, off };

inline std::string to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::scaled: return "scaled";
    case NoiseMode::fixed: return "fixed";
    default: return "off";
  }
}
inline NoiseMode noise_mode_from_string(std::string_view s) {
  if (s == "scaled") return NoiseMode::scaled;
  if (s == "fixed") return NoiseMode::fixed;
  if (s == "off") return NoiseMode::off;
  throw value_error("unknown noise mode '" + std::string(s) + "'");
}

struct SsgdConfig {
  int max_iters = 100;
  double step_system = 0.05;
  double step_ancilla = 0.5;
  NoiseMode noise = NoiseMode::scaled;
  /// Gradient noise variance in `fixed` mode; `scaled` mode uses step_system.
  double noise_variance = 0.0;
  /// Variance of symmetric Gaussian noise added to K entries (0 = exact).
  double hessian_noise_variance = 0.0;
  double e_tol = 1e-3;
  std::uint64_t seed = 1;
  double convergence_grad_tol = 1e-4;
  int convergence_window = 5;
  /// Ablation: ignore G_A entirely.
  bool unitary_only = false;
  bool track_fidelity = true;
  /// Upper bound on |theta_A|_2 per iteration; 0 disables the cap.
  double max_ancilla_angle = 0.05;

  void validate() const {
    if (max_iters < 1) throw value_error("max_iters must be >= 1");
    if (!(step_system > 0.0) || !(step_ancilla > 0.0)) throw value_error("step sizes must be > 0");
    if (!(e_tol >= 0.0)) throw value_error("e_tol must be >= 0");
    if (noise == NoiseMode::fixed && !(noise_variance >= 0.0)) throw value_error("noise variance must be >= 0");
    if (!(hessian_noise_variance >= 0.0)) throw value_error("Hessian noise variance must be >= 0");
    if (convergence_window < 1) throw value_error("convergence window must be >= 1");
    if (!(max_ancilla_angle >= 0.0)) throw value_error("max_ancilla_angle must be >= 0");
  }

  RealVector ancilla_angles(const RealVector& direction) const {
    RealVector theta = direction * step_ancilla;
    const double norm = theta.norm();
    if (max_ancilla_angle > 0.0 && norm > max_ancilla_angle) theta *= max_ancilla_angle / norm;
    return theta;
  }

  double gradient_noise_variance() const {
    switch (noise) {
      case NoiseMode::scaled: return step_system;
      case NoiseMode::fixed: return noise_variance;
      default: return 0.0;
    }
  }
};

struct TrajectoryRecord {
  int iter = 0;
  /// Energy after this iteration's update.
  double energy = 0.0;
  /// Max-abs noiseless system gradient measured before the update.
  double grad_norm_system = 0.0;
  /// Smallest eigenvalue of K before the update; NaN when G_A is empty.
  double min_hessian_eig = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> neel;
  std::optional<double> state_fidelity_ground;
};

struct RunResult {
  DensityMatrix final_state;
  std::vector<TrajectoryRecord> trace;
  bool converged = false;
};

/// H on `layout`: returned as-is when it already lives there, otherwise a
/// system-only H is extended to I (x) H.
inline DenseOperator lift(const DenseOperator& h, const RegisterLayout& layout) {
  if (h.layout == layout) return h;
  return extend_to(h, layout);
}

/// Noiseless -i Tr([P_j, H] rho) for each generator.
inline RealVector system_gradient(const DenseOperator& h, const DensityMatrix& rho, const std::vector<PauliString>& gens) {
  const DenseOperator hl = lift(h, rho.layout());
  const Matrix comm = hl.matrix * rho.matrix() - rho.matrix() * hl.matrix;  // [H, rho]
  RealVector g(static_cast<Eigen::Index>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    check_on_layout(gens[j], rho.layout());
    if ((gens[j].support_mask() & rho.layout().ancilla_mask()) != 0)
      throw layout_error("system generator " + gens[j].str() + " touches the ancilla");
    // -i Tr([P, H] rho) = -i Tr(P [H, rho]).
    const cplx v = cplx{0.0, -1.0} * trace_product(gens[j], comm);
    g(static_cast<Eigen::Index>(j)) = v.real();
  }
  return g;
}

/// g_S with delta_j ~ N(0, sigma^2) added per component.
inline RealVector system_direction(const DenseOperator& h, const DensityMatrix& rho, const std::vector<PauliString>& gens,
                                   const SsgdConfig& cfg, Rng& rng) {
  RealVector g = system_gradient(h, rho, gens);
  const double var = cfg.gradient_noise_variance();
  if (var > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(var));
    for (Eigen::Index j = 0; j < g.size(); ++j) g(j) += noise(rng);
  }
  return g;
}

/// K_jk = -1/2 Tr({ad_Pk, ad_Pj}(rho) H) for an arbitrary Hermitian family.
/// Uses the expanded form
///   -1/2 Tr((PjPk + PkPj) rho H + rho (PjPk + PkPj) H) + 2 Re Tr(Pk rho Pj H).
inline RealMatrix hessian_matrix(const DenseOperator& h, const DensityMatrix& rho, const std::vector<PauliString>& gens) {
  const auto m = static_cast<Eigen::Index>(gens.size());
  RealMatrix k = RealMatrix::Zero(m, m);
  if (m == 0) return k;
  const DenseOperator hl = lift(h, rho.layout());
  const Matrix& r = rho.matrix();
  const Matrix& hm = hl.matrix;
  const auto d = r.rows();
  const Eigen::Index act = active_extent(r);

  const Matrix rh = r.topLeftCorner(act, act) * hm.topRows(act);  // rows of rho H beyond act are zero
  Matrix rho_h = Matrix::Zero(d, d);
  rho_h.topRows(act) = rh;
  Matrix h_rho = Matrix::Zero(d, d);
  h_rho.leftCols(act) = hm.leftCols(act) * r.topLeftCorner(act, act);

  // T_jk = Tr((rho Pj)(H Pk)) as a single product of flattened blocks.
  Matrix a(m, act * d);
  Matrix b(m, act * d);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& p = gens[static_cast<std::size_t>(j)];
    check_on_layout(p, rho.layout());
    const Matrix rp = right_multiply(Matrix(r.topRows(act)), p);
    const Matrix hp = right_multiply(hm, p).leftCols(act).transpose();
    a.row(j) = Eigen::Map<const Eigen::RowVectorXcd>(rp.data(), act * d);
    b.row(j) = Eigen::Map<const Eigen::RowVectorXcd>(hp.data(), act * d);
  }
  const Matrix t = a * b.transpose();

  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index kk = j; kk < m; ++kk) {
      const auto& pj = gens[static_cast<std::size_t>(j)];
      const auto& pk = gens[static_cast<std::size_t>(kk)];
      double v = 2.0 * t(j, kk).real();
      if (pj.commutes_with(pk)) {
        const PauliString q = pj * pk;  // PjPk = PkPj
        v -= (trace_product(q, rho_h) + trace_product(q, h_rho)).real();
      }
      k(j, kk) = v;
      k(kk, j) = v;
    }
  }
  return k;
}

/// Hessian over ancilla generators; each must satisfy <0|P_A|0> = 0.
inline RealMatrix hessian(const DenseOperator& h, const DensityMatrix& rho_joint, const std::vector<PauliString>& gens) {
  for (const auto& p : gens) {
    check_on_layout(p, rho_joint.layout());
    if (!entangles_ancilla(p, rho_joint.layout()))
      throw value_error("ancilla generator " + p.str() + " violates <0|P_A|0> = 0");
  }
  return hessian_matrix(h, rho_joint, gens);
}

struct AncillaDirection {
  RealVector direction;
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
};

/// g_A = Q E' with E'_i = E_i if E_i < -e_tol else 0.
inline AncillaDirection ancilla_direction_full(const RealMatrix& k, double e_tol) {
  AncillaDirection out;
  out.direction = RealVector::Zero(k.rows());
  if (k.rows() == 0) return out;
  if (k.rows() != k.cols()) throw value_error("Hessian must be square");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw value_error("Hessian is not symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (k + k.transpose()));
  RealVector clipped = es.eigenvalues();
  RealMatrix q = es.eigenvectors();
  for (Eigen::Index i = 0; i < clipped.size(); ++i) {
    if (!(clipped(i) < -e_tol)) clipped(i) = 0.0;
    // Fix the eigenvector sign: largest-magnitude entry positive.
    Eigen::Index big = 0;
    q.col(i).cwiseAbs().maxCoeff(&big);
    if (q(big, i) < 0.0) q.col(i) *= -1.0;
  }
  out.direction = q * clipped;
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

inline RealVector ancilla_direction(const RealMatrix& k, double e_tol) { return ancilla_direction_full(k, e_tol).direction; }

namespace detail {

inline void add_hessian_noise(RealMatrix& k, double variance, Rng& rng) {
  if (variance <= 0.0) return;
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  for (Eigen::Index j = 0; j < k.rows(); ++j)
    for (Eigen::Index i = j; i < k.cols(); ++i) {
      const double e = noise(rng);
      k(j, i) += e;
      if (i != j) k(i, j) += e;
    }
}

/// Moves words from a multi-ancilla layout onto a one-ancilla layout in which
/// `ancilla` becomes qubit 0 and system qubits keep their order.
inline PauliString onto_single_ancilla(const PauliString& p, const RegisterLayout& from, int ancilla) {
  const RegisterLayout to = from.with_ancilla(1);
  PauliString out(to.total());
  for (int q : p.support()) {
    if (from.is_ancilla(q)) {
      if (q != ancilla) throw layout_error("generator touches more than one ancilla");
      out.set_axis(0, p.axis(q));
    } else {
      out.set_axis(q - from.n_ancilla() + 1, p.axis(q));
    }
  }
  return out.with_phase(p.phase_exponent());
}

inline std::vector<PauliString> to_system_only(const std::vector<PauliString>& gens, const RegisterLayout& from) {
  std::vector<PauliString> out;
  out.reserve(gens.size());
  for (const auto& p : gens) {
    if ((p.support_mask() & from.ancilla_mask()) != 0) throw layout_error("system generator touches the ancilla");
    out.push_back(p.shifted(from.n_system(), -from.n_ancilla()));
  }
  return out;
}

inline void append_terms(std::vector<PauliTerm>& dst, const std::vector<PauliString>& gens, const RealVector& theta) {
  for (std::size_t j = 0; j < gens.size(); ++j) dst.push_back({theta(static_cast<Eigen::Index>(j)), gens[j]});
}

struct StepOutcome {
  DensityMatrix next;
  double grad_inf = 0.0;
  double min_eig = std::numeric_limits<double>::quiet_NaN();
};

/// One SSGD iteration from the system state `rho` with generator family `g`.
inline StepOutcome ssgd_step(const DenseOperator& h, const DensityMatrix& rho, const GeneratorSet& g, const SsgdConfig& cfg,
                             Rng& rng) {
  const RegisterLayout& layout = g.layout;
  if (layout.n_system() != rho.layout().n_system()) throw layout_error("generator set and state differ in system size");

  const std::vector<PauliString> sys_local = to_system_only(g.system_gens, layout);
  const RealVector grad = system_gradient(h, rho, sys_local);
  RealVector g_s = grad;
  if (const double var = cfg.gradient_noise_variance(); var > 0.0 && g_s.size() > 0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(var));
    for (Eigen::Index j = 0; j < g_s.size(); ++j) g_s(j) += noise(rng);
  }
  const RealVector theta_s = g_s * cfg.step_system;
  const double grad_inf = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;

  const bool dissipative = !cfg.unitary_only && !g.ancilla_gens.empty();
  if (!dissipative) {
    std::vector<PauliTerm> terms;
    append_terms(terms, sys_local, theta_s);
    return {apply_generator_step(rho, terms), grad_inf};
  }

  if (layout.n_ancilla() == 1) {
    const DensityMatrix joint = attach_ancilla(rho, 1);
    RealMatrix k = hessian(h, joint, g.ancilla_gens);
    add_hessian_noise(k, cfg.hessian_noise_variance, rng);
    const AncillaDirection dir = ancilla_direction_full(k, cfg.e_tol);
    std::vector<PauliTerm> terms;
    append_terms(terms, g.system_gens, theta_s);
    append_terms(terms, g.ancilla_gens, cfg.ancilla_angles(dir.direction));
    return {reset_ancilla(apply_generator_step(joint, terms)), grad_inf, dir.min_eigenvalue};
  }

  // Several ancillas. With no system generators in the same step, words that
  // each touch one ancilla and act on disjoint system qubits give a K that is
  // block diagonal per ancilla and a unitary that factorises, so one reusable
  // ancilla reproduces the joint update exactly.
  std::map<int, std::vector<PauliString>> groups;
  bool factorisable = g.system_gens.empty();
  for (const auto& p : g.ancilla_gens) {
    const std::uint64_t anc = p.support_mask() & layout.ancilla_mask();
    if (std::popcount(anc) != 1) {
      factorisable = false;
      break;
    }
    groups[std::countr_zero(anc)].push_back(p);
  }
  std::uint64_t seen = 0;
  for (const auto& [a, words] : groups) {
    std::uint64_t sys = 0;
    for (const auto& p : words) sys |= p.support_mask() & ~layout.ancilla_mask();
    if (sys & seen) factorisable = false;
    seen |= sys;
  }

  if (!factorisable) {
    if (layout.total() > 10) throw layout_error("joint multi-ancilla update too large for dense simulation");
    const DensityMatrix joint = attach_ancilla(rho, layout.n_ancilla());
    RealMatrix k = hessian(h, joint, g.ancilla_gens);
    add_hessian_noise(k, cfg.hessian_noise_variance, rng);
    const AncillaDirection dir = ancilla_direction_full(k, cfg.e_tol);
    std::vector<PauliTerm> terms;
    append_terms(terms, g.system_gens, theta_s);
    append_terms(terms, g.ancilla_gens, cfg.ancilla_angles(dir.direction));
    return {reset_ancilla(apply_generator_step(joint, terms)), grad_inf, dir.min_eigenvalue};
  }

  const DensityMatrix joint = attach_ancilla(rho, 1);
  std::vector<std::vector<PauliTerm>> blocks;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& [a, words] : groups) {
    std::vector<PauliString> local;
    for (const auto& p : words) local.push_back(onto_single_ancilla(p, layout, a));
    RealMatrix k = hessian(h, joint, local);
    add_hessian_noise(k, cfg.hessian_noise_variance, rng);
    const AncillaDirection dir = ancilla_direction_full(k, cfg.e_tol);
    min_eig = std::min(min_eig, dir.min_eigenvalue);
    std::vector<PauliTerm> terms;
    append_terms(terms, local, cfg.ancilla_angles(dir.direction));
    blocks.push_back(std::move(terms));
  }
  DensityMatrix state = rho;
  for (const auto& terms : blocks) state = reset_ancilla(apply_generator_step(attach_ancilla(state, 1), terms));
  return {state, grad_inf, min_eig};
}

template <typename PhaseFn>
RunResult run_loop(const DenseOperator& h, const DensityMatrix& rho0, const SsgdConfig& cfg, PhaseFn&& gens_for) {
  cfg.validate();
  if (rho0.layout().n_ancilla() != 0) throw layout_error("SSGD expects a system-only initial state");
  if (h.layout != rho0.layout()) throw layout_error("Hamiltonian and state layouts differ");

  Rng rng = stream_rng(cfg.seed, 0);
  std::optional<Vector> ground;
  if (cfg.track_fidelity && rho0.layout().n_system() <= 8) ground = ground_state_vector(h);

  RunResult result{rho0, {}, false};
  int streak = 0;
  for (int t = 0; t < cfg.max_iters; ++t) {
    const GeneratorSet& g = gens_for(static_cast<std::size_t>(t));
    StepOutcome step = ssgd_step(h, result.final_state, g, cfg, rng);
    result.final_state = step.next.sanitized();

    TrajectoryRecord rec;
    rec.iter = t;
    rec.energy = expectation(result.final_state, h);
    rec.grad_norm_system = step.grad_inf;
    rec.min_hessian_eig = step.min_eig;
    rec.neel = neel_order(result.final_state);
    if (ground) rec.state_fidelity_ground = (ground->adjoint() * result.final_state.matrix() * *ground)(0, 0).real();
    result.trace.push_back(rec);

    const bool second_order = std::isnan(step.min_eig) || step.min_eig >= -cfg.e_tol;
    streak = (step.grad_inf < cfg.convergence_grad_tol && second_order) ? streak + 1 : 0;
    if (streak >= cfg.convergence_window) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace detail

inline RunResult run(const DenseOperator& h, const DensityMatrix& rho0, const GeneratorSet& gens, const SsgdConfig& cfg) {
  return detail::run_loop(h, rho0, cfg, [&](std::size_t) -> const GeneratorSet& { return gens; });
}

/// Brickwall mode: the active family rotates with the schedule phase.
inline RunResult run(const DenseOperator& h, const DensityMatrix& rho0, const BrickwallSchedule& schedule, const SsgdConfig& cfg) {
  std::vector<GeneratorSet> phases;
  for (std::size_t t = 0; t < schedule.period(); ++t) phases.push_back(gens_at_phase(schedule, t));
  return detail::run_loop(h, rho0, cfg, [&](std::size_t t) -> const GeneratorSet& { return phases[t % phases.size()]; });
}

struct SignCheckVerdict {
  int trials = 0;
  int passed = 0;
  double worst_relative_change = -std::numeric_limits<double>::infinity();
  bool ok() const { return passed == trials; }
};

/// On random two-qubit instances, a step theta_S = g_S dt must lower E to first
/// order whenever the gradient is non-negligible.
inline SignCheckVerdict sign_convention_check(int trials = 100, std::uint64_t seed = 7, double dt = 1e-4) {
  SignCheckVerdict v;
  const RegisterLayout layout(2, 0);
  const GeneratorSet gens = build_standard(2, layout);
  for (int s = 0; s < trials; ++s) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(s));
    const DensityMatrix rho = random_density_matrix(layout, rng);
    const DenseOperator h = random_hermitian(layout, rng);
    const RealVector g = system_gradient(h, rho, gens.system_gens);
    std::vector<PauliTerm> terms;
    detail::append_terms(terms, gens.system_gens, g * dt);
    const double delta = expectation(apply_generator_step(rho, terms), h) - expectation(rho, h);
    ++v.trials;
    const double gn2 = g.squaredNorm();
    if (std::sqrt(gn2) <= 1e-6) {
      ++v.passed;
      continue;
    }
    // First order: delta ~ -dt |g|^2.
    const double rel = delta / (dt * gn2);
    v.worst_relative_change = std::max(v.worst_relative_change, rel);
    if (delta < 0.0) ++v.passed;
  }
  return v;
}

}  // namespace ssgd

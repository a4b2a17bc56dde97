#pragma once

// Numerical checks of the optimality theory: Lindbladian first-order
// derivatives, the Hessian/Lindbladian identity, Haar-state gradient sizes and
// the brickwall energy-variance bound.

#include "ssgd/optimizer.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>

namespace ssgd {

/// Jump operator L acting on system sites [first_site, first_site + window).
struct LindbladOp {
  Matrix jump;
  int first_site = 0;
  int window = 1;

  void validate(const RegisterLayout& layout) const {
    if (window < 1 || first_site < 0 || first_site + window > layout.n_system())
      throw layout_error("Lindblad window outside the system register");
    const Eigen::Index d = Eigen::Index{1} << window;
    if (jump.rows() != d || jump.cols() != d) throw value_error("jump operator dimension does not match its window");
    if (!jump.allFinite()) throw value_error("jump operator has non-finite entries");
  }
};

/// Lifts an operator on a contiguous window of system sites to the whole
/// system register (site 0 is the most significant bit).
inline Matrix embed_window(const Matrix& op, int first_site, int window, int n_system) {
  const auto left = Eigen::Index{1} << first_site;
  const auto right = Eigen::Index{1} << (n_system - first_site - window);
  return Eigen::kroneckerProduct(Matrix::Identity(left, left), Eigen::kroneckerProduct(op, Matrix::Identity(right, right)).eval());
}

inline Matrix embedded_jump(const LindbladOp& lb, const RegisterLayout& layout) {
  lb.validate(layout);
  return embed_window(lb.jump, lb.first_site, lb.window, layout.n_system());
}

/// L rho L^dag - 1/2 {L^dag L, rho}.
inline Matrix lindblad_apply(const Matrix& l, const Matrix& rho) {
  const Matrix ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

/// Tr(L(rho) H) at theta = 0.
inline double lindblad_derivative(const DenseOperator& h, const DensityMatrix& rho, const LindbladOp& lb) {
  if (rho.layout().n_ancilla() != 0) throw layout_error("lindblad_derivative expects a system-only state");
  if (h.layout != rho.layout()) throw layout_error("Hamiltonian and state layouts differ");
  const Matrix l = embedded_jump(lb, rho.layout());
  const cplx v = trace_of_product(lindblad_apply(l, rho.matrix()), h.matrix);
  const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff() * std::max(1.0, l.squaredNorm()));
  if (std::abs(v.imag()) > 1e-12 * scale) throw value_error("Tr(L(rho) H) has a non-negligible imaginary part");
  return v.real();
}

/// Column-stacking superoperator: vec(L(rho)) = S vec(rho).
inline Matrix lindblad_superoperator(const Matrix& l) {
  const auto d = l.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix ldl = l.adjoint() * l;
  return Matrix(Eigen::kroneckerProduct(l.conjugate(), l)) - 0.5 * Matrix(Eigen::kroneckerProduct(id, ldl)) -
         0.5 * Matrix(Eigen::kroneckerProduct(ldl.transpose(), id));
}

/// Tr(H e^{theta L}(rho)) through the dense superoperator exponential.
inline double lindblad_evolved_energy(const DenseOperator& h, const DensityMatrix& rho, const LindbladOp& lb, double theta) {
  const Matrix l = embedded_jump(lb, rho.layout());
  const auto d = rho.matrix().rows();
  const Matrix s = lindblad_superoperator(l);
  const Matrix prop = (theta * s).exp();
  const Vector v = prop * Eigen::Map<const Vector>(rho.matrix().data(), d * d);
  const Eigen::Map<const Matrix> out(v.data(), d, d);
  return trace_of_product(Matrix(out), h.matrix).real();
}

/// Central difference of the evolved energy at theta = 0.
inline double lindblad_derivative_fd(const DenseOperator& h, const DensityMatrix& rho, const LindbladOp& lb, double step = 1e-5) {
  return (lindblad_evolved_energy(h, rho, lb, step) - lindblad_evolved_energy(h, rho, lb, -step)) / (2.0 * step);
}

inline LindbladOp random_lindblad(int first_site, int window, Rng& rng) {
  const Eigen::Index d = Eigen::Index{1} << window;
  return {complex_gaussian(d, d, rng), first_site, window};
}

struct LindbladCheck {
  double lhs = 0.0;  // Tr(L(rho) H)
  double rhs = 0.0;  // 1/2 alpha^T K alpha
  double abs_error = 0.0;
  double block_error = 0.0;
  double reconstruction_error = 0.0;
  double min_hessian_eig = 0.0;
  double corollary_bound = 0.0;
  bool corollary_ok = true;
  RealVector alpha;
  RealMatrix hessian;
  bool passed(double tol = 1e-8) const { return abs_error <= tol && block_error <= 1e-12 && corollary_ok; }
};

/// Builds G = X (x) A + Y (x) B from L = A + iB on the one-ancilla layout,
/// expands it over `gens`, and compares Tr(L(rho) H) with 1/2 a^T K a.
inline LindbladCheck check_lindblad_identity(const DenseOperator& h, const DensityMatrix& rho, const LindbladOp& lb,
                                 const std::vector<PauliString>& gens, double e_tol = 1e-3) {
  const RegisterLayout sys = rho.layout();
  if (sys.n_ancilla() != 0) throw layout_error("check_lindblad_identity expects a system-only state");
  const RegisterLayout joint = sys.with_ancilla(1);
  lb.validate(sys);

  // Every X/Y (x) P with P on the window must be available.
  for (const auto& p : detail::all_words(joint.total(), [&] {
         std::vector<int> q;
         for (int s = 0; s < lb.window; ++s) q.push_back(joint.system_qubit(lb.first_site + s));
         return q;
       }())) {
    for (Axis a : {Axis::X, Axis::Y}) {
      PauliString w = p;
      w.set_axis(joint.ancilla_qubit(0), a);
      if (std::find(gens.begin(), gens.end(), w) == gens.end())
        throw value_error("generator family lacks " + w.str() + " needed to express G");
    }
  }

  const Matrix l = embedded_jump(lb, sys);
  const auto d = l.rows();
  Matrix g = Matrix::Zero(2 * d, 2 * d);
  g.topRightCorner(d, d) = l.adjoint();
  g.bottomLeftCorner(d, d) = l;

  LindbladCheck r;
  r.alpha.resize(static_cast<Eigen::Index>(gens.size()));
  Matrix rebuilt = Matrix::Zero(2 * d, 2 * d);
  for (std::size_t j = 0; j < gens.size(); ++j) {
    check_on_layout(gens[j], joint);
    const cplx c = trace_product(gens[j], g) / static_cast<double>(2 * d);
    r.alpha(static_cast<Eigen::Index>(j)) = c.real();
    rebuilt += c.real() * to_dense(gens[j], joint);
  }
  r.reconstruction_error = (rebuilt - g).cwiseAbs().maxCoeff();
  if (r.reconstruction_error > 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw value_error("G is not spanned by the generator family");

  const DensityMatrix rt = attach_ancilla(rho, 1);
  r.hessian = hessian(h, rt, gens);
  r.lhs = lindblad_derivative(h, rho, lb);
  r.rhs = 0.5 * r.alpha.dot(r.hessian * r.alpha);
  r.abs_error = std::abs(r.lhs - r.rhs);

  Matrix expected = Matrix::Zero(2 * d, 2 * d);
  expected.topRightCorner(d, d) = -rho.matrix() * l.adjoint();
  expected.bottomLeftCorner(d, d) = l * rho.matrix();
  const Matrix ad = g * rt.matrix() - rt.matrix() * g;
  r.block_error = (ad - expected).cwiseAbs().maxCoeff();

  r.min_hessian_eig = r.hessian.rows() ? Eigen::SelfAdjointEigenSolver<RealMatrix>(r.hessian).eigenvalues().minCoeff() : 0.0;
  r.corollary_bound = -0.5 * e_tol * r.alpha.squaredNorm();
  if (r.min_hessian_eig >= -e_tol) r.corollary_ok = r.lhs >= r.corollary_bound - 1e-10;
  return r;
}

struct LindbladInstance {
  DenseOperator h;
  DensityMatrix rho;
  LindbladOp lb;
  std::vector<PauliString> gens;
};

/// Random H, rho and L (window of k - 1 sites, at least one) with the standard
/// single-ancilla G_A of locality k.
inline LindbladInstance random_lindblad_instance(int n_system, int k, Rng& rng) {
  const RegisterLayout sys(n_system, 0);
  const int window = std::max(1, k - 1);
  if (window > n_system) throw value_error("Lindblad window larger than the system");
  std::uniform_int_distribution<int> pick(0, n_system - window);
  const int first = pick(rng);
  DensityMatrix rho = random_density_matrix(sys, rng);
  DenseOperator h = random_hermitian(sys, rng);
  LindbladOp lb = random_lindblad(first, window, rng);
  std::vector<PauliString> gens = build_standard(std::max(k, window + 1), sys.with_ancilla(1)).ancilla_gens;
  return {std::move(h), std::move(rho), std::move(lb), std::move(gens)};
}

// ---------------------------------------------------------------------------

struct HaarSurvey {
  int n_system = 0;
  std::vector<double> max_gradient;  // one per sample

  double median() const {
    if (max_gradient.empty()) return 0.0;
    std::vector<double> v = max_gradient;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
  }
};

/// max_P |2 Im <psi|P H|psi>| over system generators for Haar-random |psi>.
inline HaarSurvey haar_gradient_survey(const DenseOperator& h, const std::vector<PauliString>& gens, int samples, Rng& rng) {
  if (h.layout.n_ancilla() != 0) throw layout_error("haar_gradient_survey expects a system-only Hamiltonian");
  if (samples < 0) throw value_error("sample count must be >= 0");
  HaarSurvey out;
  out.n_system = h.layout.n_system();
  const auto d = h.matrix.rows();
  std::vector<PauliAction> acts;
  for (const auto& p : gens) {
    check_on_layout(p, h.layout);
    acts.emplace_back(p);
  }
  for (int s = 0; s < samples; ++s) {
    const Vector psi = haar_state(d, rng);
    const Vector hpsi = h.matrix * psi;
    double best = 0.0;
    for (const auto& a : acts) {
      cplx acc{0.0, 0.0};  // <P psi | H psi>
      for (Eigen::Index b = 0; b < d; ++b) {
        const auto ub = static_cast<std::uint64_t>(b);
        acc += std::conj(a.amplitude(ub) * psi(b)) * hpsi(static_cast<Eigen::Index>(ub ^ a.xmask));
      }
      best = std::max(best, std::abs(2.0 * acc.imag()));
    }
    out.max_gradient.push_back(best);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct VarianceEstimate {
  double variance = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double mean = 0.0;
  int samples = 0;
  /// Empirical variance minus three standard errors still clears the bound.
  bool above_bound() const { return variance - 3.0 * std_error >= bound; }
};

/// ||H||_HS^2 / 5^(k(f+1)) with the normalised norm Tr(H^2)/2^n, k = 2, f = 5.
inline double variance_lower_bound(const DenseOperator& h, int k = 2, int f = 5) {
  const double hs = h.matrix.squaredNorm() / static_cast<double>(h.matrix.rows());
  return hs / std::pow(5.0, k * (f + 1));
}

/// Energy of |0..0> after `layers` schedule steps, every two-qubit block drawn
/// Haar-uniformly. Ancilla steps couple ancilla j to system qubit j and reset it.
inline double brickwall_sample(const DenseOperator& h, const BrickwallSchedule& s, int layers, Rng& rng) {
  const RegisterLayout sys(s.n_system, 0);
  const RegisterLayout one = sys.with_ancilla(1);
  DensityMatrix rho = DensityMatrix::basis_state(sys, 0);
  for (int t = 0; t < layers; ++t) {
    const BrickPhase phase = s.phase_at(static_cast<std::size_t>(t));
    if (phase == BrickPhase::ancilla_layer) {
      for (int j = 0; j < s.n_system; ++j) {
        const Matrix u = haar_unitary(4, rng);
        rho = reset_ancilla(apply_local_unitary(attach_ancilla(rho, 1), u, {one.ancilla_qubit(0), one.system_qubit(j)}));
      }
    } else {
      for (const auto& [a, b] : s.pairs(phase)) rho = apply_local_unitary(rho, haar_unitary(4, rng), {a, b});
    }
  }
  return expectation(rho, h);
}

inline VarianceEstimate brickwall_variance(const DenseOperator& h, const BrickwallSchedule& s, int layers, int samples, Rng& rng) {
  if (h.layout != RegisterLayout(s.n_system, 0)) throw layout_error("Hamiltonian does not match the schedule's system size");
  if (layers < 1) throw value_error("brickwall_variance needs at least one layer");
  if (samples < 2) throw value_error("brickwall_variance needs at least two samples");
  std::vector<double> e;
  e.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) e.push_back(brickwall_sample(h, s, layers, rng));

  VarianceEstimate v;
  v.samples = samples;
  v.bound = variance_lower_bound(h);
  const double n = samples;
  for (double x : e) v.mean += x;
  v.mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : e) {
    const double dx = x - v.mean;
    m2 += dx * dx;
    m4 += dx * dx * dx * dx;
  }
  v.variance = m2 / (n - 1.0);
  m4 /= n;
  const double s4 = v.variance * v.variance;
  v.std_error = std::sqrt(std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * s4) / n));
  return v;
}

}  // namespace ssgd

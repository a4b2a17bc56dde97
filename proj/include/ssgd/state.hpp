#pragma once

// Dense density matrices on the joint ancilla (x) system register.

#include "ssgd/pauli.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace ssgd {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

inline double hermitian_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Operator on a register, e.g. a Hamiltonian or an observable.
struct DenseOperator {
  Matrix matrix;
  RegisterLayout layout;

  DenseOperator(Matrix m, RegisterLayout l) : matrix(std::move(m)), layout(l) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    if (matrix.rows() != d || matrix.cols() != d) throw layout_error("operator dimension does not match layout");
  }

  static DenseOperator from_terms(const std::vector<PauliTerm>& terms, const RegisterLayout& l) {
    return DenseOperator(dense_sum(terms, l), l);
  }

  bool is_hermitian(double tol = 1e-10) const { return hermitian_defect(matrix) <= tol; }
};

/// I_A (x) H on a layout that carries ancilla qubits in front of the system.
inline DenseOperator extend_to(const DenseOperator& h, const RegisterLayout& joint) {
  if (h.layout.n_ancilla() != 0) throw layout_error("operator must be system-only to extend");
  if (joint.n_system() != h.layout.n_system()) throw layout_error("system size mismatch");
  const auto d = h.matrix.rows();
  const auto blocks = static_cast<Eigen::Index>(std::size_t{1} << joint.n_ancilla());
  Matrix out = Matrix::Zero(d * blocks, d * blocks);
  for (Eigen::Index a = 0; a < blocks; ++a) out.block(a * d, a * d, d, d) = h.matrix;
  return DenseOperator(std::move(out), joint);
}

class DensityMatrix {
 public:
  /// Validated construction: Hermitian, unit trace, PSD within tolerance.
  DensityMatrix(Matrix m, RegisterLayout layout) : matrix_(std::move(m)), layout_(layout) {
    const auto d = static_cast<Eigen::Index>(layout_.dim());
    if (matrix_.rows() != d || matrix_.cols() != d) throw layout_error("density matrix dimension does not match layout");
    if (hermitian_defect(matrix_) > kHermitianTol) throw value_error("density matrix is not Hermitian");
    if (std::abs(matrix_.trace() - cplx{1.0, 0.0}) > kTraceTol) throw value_error("density matrix trace is not 1");
    if (min_eigenvalue() < -kPsdTol) throw value_error("density matrix is not positive semidefinite");
  }

  /// Skips validation; used by the engine on outputs of trace-preserving maps.
  static DensityMatrix trusted(Matrix m, RegisterLayout layout) { return DensityMatrix(Unchecked{}, std::move(m), layout); }

  static DensityMatrix basis_state(const RegisterLayout& layout, std::uint64_t index) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    if (index >= layout.dim()) throw value_error("basis index out of range");
    Matrix m = Matrix::Zero(d, d);
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return trusted(std::move(m), layout);
  }

  /// Bitstring over system sites, site 0 first, e.g. "000111".
  static DensityMatrix from_bitstring(std::string_view bits) {
    return basis_state(RegisterLayout(static_cast<int>(bits.size()), 0), parse_bitstring(bits));
  }

  static DensityMatrix maximally_mixed(const RegisterLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    return trusted(Matrix::Identity(d, d) / static_cast<double>(d), layout);
  }

  static DensityMatrix pure(const Vector& psi, const RegisterLayout& layout) {
    if (psi.size() != static_cast<Eigen::Index>(layout.dim())) throw layout_error("state vector dimension mismatch");
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw value_error("zero state vector");
    const Vector v = psi / norm;
    return trusted(v * v.adjoint(), layout);
  }

  static std::uint64_t parse_bitstring(std::string_view bits) {
    if (bits.empty() || bits.size() > kMaxQubits) throw value_error("bad bitstring length");
    std::uint64_t idx = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw value_error("bitstring may only contain 0 and 1");
      idx = (idx << 1U) | static_cast<std::uint64_t>(c == '1');
    }
    return idx;
  }

  const Matrix& matrix() const { return matrix_; }
  const RegisterLayout& layout() const { return layout_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Hermitian part, renormalised. Eigenvalues are floored at zero only when
  /// the most negative one is below -kPsdTol.
  DensityMatrix sanitized() const {
    Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.eigenvalues().minCoeff() < -kPsdTol) {
      const RealVector clipped = es.eigenvalues().cwiseMax(0.0);
      h = es.eigenvectors() * clipped.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    }
    h /= h.trace().real();
    return trusted(std::move(h), layout_);
  }

 private:
  struct Unchecked {};
  DensityMatrix(Unchecked, Matrix m, RegisterLayout layout) : matrix_(std::move(m)), layout_(layout) {}

  Matrix matrix_;
  RegisterLayout layout_;
};

/// |0..0><0..0|_A (x) rho.
inline DensityMatrix attach_ancilla(const DensityMatrix& rho, int n_ancilla) {
  if (n_ancilla < 0) throw value_error("negative ancilla count");
  if (rho.layout().n_ancilla() != 0) throw layout_error("attach_ancilla expects a system-only state");
  if (n_ancilla == 0) return rho;
  const RegisterLayout joint = rho.layout().with_ancilla(n_ancilla);
  const auto d = static_cast<Eigen::Index>(joint.dim());
  const auto ds = rho.matrix().rows();
  Matrix m = Matrix::Zero(d, d);
  m.topLeftCorner(ds, ds) = rho.matrix();
  return DensityMatrix::trusted(std::move(m), joint);
}

/// Tr_A over the whole ancilla register.
inline DensityMatrix reset_ancilla(const DensityMatrix& joint) {
  const auto& l = joint.layout();
  if (l.n_ancilla() < 1) throw layout_error("reset_ancilla: layout has no ancilla");
  const RegisterLayout sys = l.system_only();
  const auto ds = static_cast<Eigen::Index>(sys.dim());
  const auto blocks = static_cast<Eigen::Index>(std::size_t{1} << l.n_ancilla());
  Matrix m = Matrix::Zero(ds, ds);
  for (Eigen::Index a = 0; a < blocks; ++a) m += joint.matrix().block(a * ds, a * ds, ds, ds);
  return DensityMatrix::trusted(std::move(m), sys);
}

/// Number of leading rows/columns outside of which the matrix is exactly zero.
/// Lets conjugations skip the empty blocks of |0><0| (x) rho.
inline Eigen::Index active_extent(const Matrix& m) {
  Eigen::Index n = m.rows();
  while (n > 1) {
    const Eigen::Index half = n / 2;
    const bool tail_zero = m.block(half, 0, n - half, n).isZero(0.0) && m.block(0, half, n, n - half).isZero(0.0);
    if (!tail_zero) break;
    n = half;
  }
  return n;
}

/// exp(-i G) for Hermitian G via eigendecomposition.
inline Matrix unitary_from_hermitian(const Matrix& generator) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(generator);
  const RealVector& w = es.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -w(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// U rho U^dagger with U = exp(-i sum_j theta_j P_j).
inline DensityMatrix apply_generator_step(const DensityMatrix& rho, const std::vector<PauliTerm>& terms) {
  for (const auto& t : terms) {
    check_on_layout(t.word, rho.layout());
    if (!std::isfinite(t.coefficient)) throw value_error("non-finite generator coefficient");
    if (!t.word.is_hermitian()) throw value_error("generator " + t.word.str() + " is not Hermitian");
  }
  const bool trivial = std::all_of(terms.begin(), terms.end(), [](const PauliTerm& t) { return t.coefficient == 0.0; });
  if (trivial) return rho;

  const Matrix u = unitary_from_hermitian(dense_sum(terms, rho.layout()));
  const Eigen::Index k = active_extent(rho.matrix());
  const Matrix ul = u.leftCols(k);
  Matrix out = ul * rho.matrix().topLeftCorner(k, k) * ul.adjoint();
  return DensityMatrix::trusted(std::move(out), rho.layout());
}

/// Conjugates by a unitary acting on the listed global qubits (first listed
/// qubit is the most significant factor of `u`).
inline DensityMatrix apply_local_unitary(const DensityMatrix& rho, const Matrix& u, const std::vector<int>& qubits) {
  const int n = rho.layout().total();
  const auto m = static_cast<int>(qubits.size());
  if (u.rows() != (Eigen::Index{1} << m) || u.cols() != u.rows()) throw layout_error("local unitary size mismatch");
  std::vector<std::uint64_t> bits(m);
  std::uint64_t mask = 0;
  for (int i = 0; i < m; ++i) {
    if (qubits[i] < 0 || qubits[i] >= n) throw layout_error("local unitary qubit outside register");
    bits[i] = std::uint64_t{1} << (n - 1 - qubits[i]);
    if (mask & bits[i]) throw layout_error("repeated qubit in local unitary");
    mask |= bits[i];
  }
  const std::size_t d = rho.layout().dim();
  const std::size_t local = std::size_t{1} << m;
  auto spread = [&](std::uint64_t base, std::size_t s) {
    std::uint64_t idx = base;
    for (int i = 0; i < m; ++i)
      if ((s >> (m - 1 - i)) & 1U) idx |= bits[i];
    return static_cast<Eigen::Index>(idx);
  };
  Matrix out = rho.matrix();
  std::vector<Eigen::Index> idx(local);
  // Left multiplication by U on row groups.
  for (std::uint64_t base = 0; base < d; ++base) {
    if (base & mask) continue;
    for (std::size_t s = 0; s < local; ++s) idx[s] = spread(base, s);
    Matrix rows(static_cast<Eigen::Index>(local), out.cols());
    for (std::size_t s = 0; s < local; ++s) rows.row(static_cast<Eigen::Index>(s)) = out.row(idx[s]);
    rows = u * rows;
    for (std::size_t s = 0; s < local; ++s) out.row(idx[s]) = rows.row(static_cast<Eigen::Index>(s));
  }
  // Right multiplication by U^dagger on column groups.
  const Matrix ud = u.adjoint();
  for (std::uint64_t base = 0; base < d; ++base) {
    if (base & mask) continue;
    for (std::size_t s = 0; s < local; ++s) idx[s] = spread(base, s);
    Matrix cols(out.rows(), static_cast<Eigen::Index>(local));
    for (std::size_t s = 0; s < local; ++s) cols.col(static_cast<Eigen::Index>(s)) = out.col(idx[s]);
    cols = cols * ud;
    for (std::size_t s = 0; s < local; ++s) out.col(idx[s]) = cols.col(static_cast<Eigen::Index>(s));
  }
  return DensityMatrix::trusted(std::move(out), rho.layout());
}

/// Tr(A B) without forming the product.
inline cplx trace_of_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

/// Tr(rho O) for Hermitian O.
inline double expectation(const DensityMatrix& rho, const DenseOperator& obs) {
  if (!(rho.layout() == obs.layout)) throw layout_error("expectation: layout mismatch");
  if (!obs.is_hermitian(1e-10)) throw value_error("expectation: observable is not Hermitian");
  const cplx v = trace_of_product(rho.matrix(), obs.matrix);
  const double scale = std::max(1.0, obs.matrix.cwiseAbs().maxCoeff());
  if (std::abs(v.imag()) > 1e-12 * scale) throw value_error("expectation has a non-negligible imaginary part");
  return v.real();
}

}  // namespace ssgd

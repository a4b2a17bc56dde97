#pragma once

// Random instances: Ginibre density matrices, GUE-like Hermitian operators,
// Haar states and Haar unitaries.

#include "ssgd/state.hpp"

#include <Eigen/QR>

#include <random>

namespace ssgd {

using Rng = std::mt19937_64;

/// Independent stream for trajectory `index` of a run seeded with `master`.
inline Rng stream_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32U),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32U)};
  return Rng(seq);
}

inline Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = n01(rng);
      const double im = n01(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

inline DensityMatrix random_density_matrix(const RegisterLayout& layout, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(layout.dim());
  const Matrix g = complex_gaussian(d, d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix::trusted(std::move(rho), layout);
}

inline DenseOperator random_hermitian(const RegisterLayout& layout, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(layout.dim());
  const Matrix g = complex_gaussian(d, d, rng);
  return DenseOperator(0.5 * (g + g.adjoint()), layout);
}

/// Normalised complex Gaussian vector.
inline Vector haar_state(Eigen::Index dim, Rng& rng) {
  Vector v = complex_gaussian(dim, 1, rng);
  return v / v.norm();
}

/// QR of a complex Gaussian matrix with the phases of diag(R) divided out.
inline Matrix haar_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix g = complex_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a > 0.0) ? d / a : cplx{1.0, 0.0};
  }
  return q;
}

}  // namespace ssgd

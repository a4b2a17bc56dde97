#pragma once

// Benchmark Hamiltonians: the 1D transverse-field Ising chain and a ring of
// Rydberg atoms, plus the observables used to classify SSGD outcomes.

#include "ssgd/state.hpp"

#include <array>
#include <numbers>
#include <optional>

namespace ssgd {

enum class Boundary { open, periodic };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }
inline Boundary boundary_from_string(std::string_view s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw value_error("unknown boundary '" + std::string(s) + "'");
}

/// H = -J sum Z_i Z_{i+1} - h_x sum X_i - h_z sum Z_i (dimensionless).
struct TfimParams {
  int n_sites = 6;
  double J = 1.0;
  double h_x = 0.25;
  double h_z = 0.25;
  Boundary boundary = Boundary::open;

  void validate() const {
    if (n_sites < 2) throw value_error("TFIM needs at least two sites");
    if (!std::isfinite(J) || !std::isfinite(h_x) || !std::isfinite(h_z)) throw value_error("TFIM couplings must be finite");
  }
};

/// Rydberg ring. Frequencies are given as f/2pi in MHz, lengths in um; the
/// Hamiltonian is built in rad/us.
struct RydbergParams {
  int n_atoms = 6;
  double rabi_over_2pi = 1.0;
  double lattice_spacing = 8.0;
  double blockade_radius = 9.76;
  double detuning_glob_over_2pi = 2.5;
  double detuning_loc_over_2pi = 0.625;
  /// C6 in rad/us * um^6. When unset, C6 = Omega * R_b^6.
  std::optional<double> c6;

  void validate() const {
    if (n_atoms < 2 || n_atoms % 2 != 0) throw value_error("Rydberg ring needs an even number of atoms >= 2");
    if (!(lattice_spacing > 0.0) || !(blockade_radius > 0.0)) throw value_error("Rydberg lengths must be positive");
    if (!(rabi_over_2pi >= 0.0) || !std::isfinite(rabi_over_2pi)) throw value_error("Rabi frequency must be finite and >= 0");
    if (rabi_over_2pi == 0.0 && !c6) throw value_error("Omega = 0 requires an explicit C6");
    if (!std::isfinite(detuning_glob_over_2pi) || !std::isfinite(detuning_loc_over_2pi))
      throw value_error("detunings must be finite");
  }

  double omega() const { return 2.0 * std::numbers::pi * rabi_over_2pi; }
  double c6_coefficient() const { return c6 ? *c6 : omega() * std::pow(blockade_radius, 6); }
  /// Delta_j = Delta_glob + (-1)^j Delta_loc, rad/us.
  double detuning(int j) const {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return 2.0 * std::numbers::pi * (detuning_glob_over_2pi + sign * detuning_loc_over_2pi);
  }
  /// Ring of circumradius a / (2 sin(pi/N)), so neighbours sit a apart.
  std::array<double, 2> position(int j) const {
    const double radius = lattice_spacing / (2.0 * std::sin(std::numbers::pi / n_atoms));
    const double phi = 2.0 * std::numbers::pi * j / n_atoms;
    return {radius * std::cos(phi), radius * std::sin(phi)};
  }
};

inline std::vector<PauliTerm> tfim_terms(const TfimParams& p) {
  p.validate();
  const int n = p.n_sites;
  std::vector<PauliTerm> terms;
  const int bonds = p.boundary == Boundary::periodic ? n : n - 1;
  for (int i = 0; i < bonds; ++i) {
    PauliString zz(n);
    zz.set_axis(i, Axis::Z);
    zz.set_axis((i + 1) % n, Axis::Z);
    terms.push_back({-p.J, zz});
  }
  for (int i = 0; i < n; ++i) {
    terms.push_back({-p.h_x, PauliString::single(n, i, Axis::X)});
    terms.push_back({-p.h_z, PauliString::single(n, i, Axis::Z)});
  }
  return terms;
}

inline DenseOperator build_tfim(const TfimParams& p) {
  return DenseOperator::from_terms(tfim_terms(p), RegisterLayout(p.n_sites, 0));
}

inline DenseOperator build_rydberg(const RydbergParams& p) {
  p.validate();
  const int n = p.n_atoms;
  const RegisterLayout layout(n, 0);
  const auto d = static_cast<Eigen::Index>(layout.dim());
  const double c6 = p.c6_coefficient();

  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto ri = p.position(i);
      const auto rj = p.position(j);
      const double dist = std::hypot(ri[0] - rj[0], ri[1] - rj[1]);
      if (dist < 1e-12) throw value_error("coincident atom positions");
      v[i][j] = c6 / std::pow(dist, 6);
    }

  // Diagonal part: -sum Delta_i n_i + sum_{i<j} V_ij n_i n_j, with n_i = 1 on |1>.
  Matrix h = Matrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    auto occ = [&](int site) { return ((static_cast<std::uint64_t>(b) >> (n - 1 - site)) & 1U) != 0; };
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!occ(i)) continue;
      e -= p.detuning(i);
      for (int j = i + 1; j < n; ++j)
        if (occ(j)) e += v[i][j];
    }
    h(b, b) = e;
  }
  std::vector<PauliTerm> drive;
  for (int i = 0; i < n; ++i) drive.push_back({p.omega() / 2.0, PauliString::single(n, i, Axis::X)});
  h += dense_sum(drive, layout);
  return DenseOperator(std::move(h), layout);
}

/// (1/N) sum_j (-1)^j <Z_j>, sites counted from 0.
inline double neel_order(const DensityMatrix& rho) {
  if (rho.layout().n_ancilla() != 0) throw layout_error("neel_order expects a system-only state");
  const int n = rho.layout().n_system();
  const auto d = rho.matrix().rows();
  double acc = 0.0;
  for (Eigen::Index b = 0; b < d; ++b) {
    const double p = rho.matrix()(b, b).real();
    if (p == 0.0) continue;
    double stag = 0.0;
    for (int j = 0; j < n; ++j) {
      const double z = ((static_cast<std::uint64_t>(b) >> (n - 1 - j)) & 1U) ? -1.0 : 1.0;
      stag += (j % 2 == 0 ? 1.0 : -1.0) * z;
    }
    acc += p * stag;
  }
  return acc / n;
}

struct ReferenceEnergies {
  double ground = 0.0;
  std::vector<double> spectrum;  // ascending
};

inline ReferenceEnergies reference_energies(const DenseOperator& h) {
  if (!h.is_hermitian()) throw value_error("reference_energies: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix, Eigen::EigenvaluesOnly);
  ReferenceEnergies out;
  out.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.ground = out.spectrum.front();
  return out;
}

/// Lowest eigenvector (first one returned by the solver if degenerate).
inline Vector ground_state_vector(const DenseOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  return es.eigenvectors().col(0);
}

}  // namespace ssgd

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ssgd;

TEST(Tfim, MatchesKroneckerConstruction) {
  for (bool periodic : {false, true}) {
    TfimParams p{5, 1.3, 0.4, -0.2, periodic ? Boundary::periodic : Boundary::open};
    const Matrix expect = oracle::tfim(5, 1.3, 0.4, -0.2, periodic);
    EXPECT_LT((build_tfim(p).matrix - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Tfim, TwoSiteZeroFieldSpectrum) {
  const auto ref = reference_energies(build_tfim({2, 1.0, 0.0, 0.0, Boundary::open}));
  ASSERT_EQ(ref.spectrum.size(), 4U);
  EXPECT_NEAR(ref.ground, -1.0, 1e-14);
  EXPECT_NEAR(ref.spectrum[1], -1.0, 1e-14);
  EXPECT_NEAR(ref.spectrum[2], 1.0, 1e-14);
  EXPECT_NEAR(ref.spectrum[3], 1.0, 1e-14);
}

TEST(Tfim, ZeroLongitudinalFieldCommutesWithSpinFlip) {
  const auto h = build_tfim({6, 1.0, 0.7, 0.0, Boundary::open});
  const Matrix flip = oracle::word("XXXXXX");
  EXPECT_LE((h.matrix * flip - flip * h.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Tfim, DefaultPointSpectrumMatchesIndependentSolver) {
  const auto h = build_tfim({6, 1.0, 0.25, 0.25, Boundary::open});
  const auto ref = reference_energies(h);
  Eigen::ComplexEigenSolver<Matrix> ces(oracle::tfim(6, 1.0, 0.25, 0.25, false));
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i) ev.push_back(ces.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ref.spectrum[i], ev[i], 1e-10);
}

TEST(Tfim, RejectsBadParameters) {
  EXPECT_THROW(build_tfim({1, 1.0, 0.0, 0.0, Boundary::open}), value_error);
  EXPECT_THROW(build_tfim({4, std::nan(""), 0.0, 0.0, Boundary::open}), value_error);
  EXPECT_THROW(boundary_from_string("twisted"), value_error);
}

TEST(Rydberg, ZeroRabiIsDiagonalWithEmptyVacuum) {
  RydbergParams p;
  p.rabi_over_2pi = 0.0;
  p.c6 = 1000.0;
  const auto h = build_rydberg(p);
  const Matrix off = h.matrix - Matrix(h.matrix.diagonal().asDiagonal());
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(h.matrix(0, 0), cplx(0.0, 0.0));
}

TEST(Rydberg, TwoAtomDoubleExcitationEnergy) {
  RydbergParams p;
  p.n_atoms = 2;
  p.rabi_over_2pi = 0.0;
  p.c6 = 5000.0;
  p.lattice_spacing = 6.0;
  const auto h = build_rydberg(p);
  const double expect = -(p.detuning(0) + p.detuning(1)) + 5000.0 / std::pow(6.0, 6);
  EXPECT_NEAR(h.matrix(3, 3).real(), expect, 1e-12);
  EXPECT_NEAR(h.matrix(2, 2).real(), -p.detuning(0), 1e-12);  // |10>: site 0 excited
}

TEST(Rydberg, ZeroRabiNeedsExplicitC6) {
  RydbergParams p;
  p.rabi_over_2pi = 0.0;
  EXPECT_THROW(build_rydberg(p), value_error);
  p.n_atoms = 5;
  p.c6 = 1.0;
  EXPECT_THROW(build_rydberg(p), value_error);
}

TEST(Rydberg, RingGeometryAndUnits) {
  RydbergParams p;
  const auto a = p.position(0), b = p.position(1);
  EXPECT_NEAR(std::hypot(a[0] - b[0], a[1] - b[1]), p.lattice_spacing, 1e-12);
  EXPECT_NEAR(p.omega(), 2.0 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(p.detuning(0), 2.0 * std::numbers::pi * 3.125, 1e-12);
  EXPECT_NEAR(p.detuning(1), 2.0 * std::numbers::pi * 1.875, 1e-12);
  EXPECT_NEAR(p.c6_coefficient(), p.omega() * std::pow(9.76, 6), 1e-6);
}

TEST(Rydberg, RealHermitianAndNeelGroundState) {
  const auto h = build_rydberg(RydbergParams{});
  EXPECT_EQ(h.matrix.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(h.is_hermitian());
  const Vector g = ground_state_vector(h);
  Eigen::Index best = 0;
  g.cwiseAbs().maxCoeff(&best);
  EXPECT_EQ(best, static_cast<Eigen::Index>(DensityMatrix::parse_bitstring("101010")));
}

TEST(Neel, BasisStatesAndMixedState) {
  EXPECT_DOUBLE_EQ(neel_order(DensityMatrix::from_bitstring("010101")), 1.0);
  EXPECT_DOUBLE_EQ(neel_order(DensityMatrix::from_bitstring("101010")), -1.0);
  EXPECT_DOUBLE_EQ(neel_order(DensityMatrix::maximally_mixed(RegisterLayout(6, 0))), 0.0);
  EXPECT_THROW(neel_order(DensityMatrix::maximally_mixed(RegisterLayout(2, 1))), layout_error);
}

TEST(Neel, LinearAndBounded) {
  Rng rng(21);
  const RegisterLayout l(4, 0);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_density_matrix(l, rng), b = random_density_matrix(l, rng);
    const auto mix = DensityMatrix::trusted(0.3 * a.matrix() + 0.7 * b.matrix(), l);
    EXPECT_NEAR(neel_order(mix), 0.3 * neel_order(a) + 0.7 * neel_order(b), 1e-14);
    EXPECT_LE(std::abs(neel_order(a)), 1.0);
  }
}

TEST(ReferenceEnergies, SingleZ) {
  const auto ref = reference_energies(DenseOperator(oracle::word("Z"), RegisterLayout(1, 0)));
  EXPECT_DOUBLE_EQ(ref.ground, -1.0);
  EXPECT_DOUBLE_EQ(ref.spectrum[1], 1.0);
}

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ssgd;

TEST(Lindblad, ZeroJumpGivesZero) {
  Rng rng(1);
  const RegisterLayout l(2, 0);
  const LindbladOp lb{Matrix::Zero(2, 2), 0, 1};
  EXPECT_EQ(lindblad_derivative(random_hermitian(l, rng), random_density_matrix(l, rng), lb), 0.0);
}

TEST(Lindblad, DecayOnExcitedStateHandValue) {
  Matrix l = Matrix::Zero(2, 2);
  l(0, 1) = 1.0;  // |0><1|
  const auto rho = DensityMatrix::from_bitstring("1");
  const DenseOperator z(oracle::word("Z"), RegisterLayout(1, 0));
  const LindbladOp lb{l, 0, 1};
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  expect(1, 1) = -1.0;
  EXPECT_LT((lindblad_apply(l, rho.matrix()) - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(lindblad_derivative(z, rho, lb), 2.0);
}

TEST(Lindblad, MatchesSuperoperatorFiniteDifference) {
  for (int t = 0; t < 10; ++t) {
    Rng rng = stream_rng(2, static_cast<std::uint64_t>(t));
    const RegisterLayout l(2, 0);
    const auto rho = random_density_matrix(l, rng);
    const auto h = random_hermitian(l, rng);
    const auto lb = random_lindblad(t % 2, 1, rng);
    EXPECT_NEAR(lindblad_derivative(h, rho, lb), lindblad_derivative_fd(h, rho, lb), 1e-7);
  }
}

TEST(Lindblad, SuperoperatorUsesColumnStacking) {
  Rng rng(3);
  const Matrix l = complex_gaussian(2, 2, rng);
  const Matrix rho = random_density_matrix(RegisterLayout(1, 0), rng).matrix();
  const Matrix s = lindblad_superoperator(l);
  const Vector v = s * Eigen::Map<const Vector>(rho.data(), 4);
  const Matrix direct = lindblad_apply(l, rho);
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 2; ++r) EXPECT_NEAR(std::abs(v(c * 2 + r) - direct(r, c)), 0.0, 1e-14);
}

TEST(Lindblad, WindowValidation) {
  const RegisterLayout l(2, 0);
  const auto rho = DensityMatrix::maximally_mixed(l);
  const DenseOperator h(Matrix::Zero(4, 4), l);
  EXPECT_THROW(lindblad_derivative(h, rho, {Matrix::Zero(2, 2), 2, 1}), layout_error);
  EXPECT_THROW(lindblad_derivative(h, rho, {Matrix::Zero(4, 4), 0, 1}), value_error);
}

TEST(LindbladIdentity, HermitianJumpSingleQubit) {
  Rng rng(4);
  const RegisterLayout l(1, 0);
  const Matrix g = complex_gaussian(2, 2, rng);
  const LindbladOp lb{0.5 * (g + g.adjoint()), 0, 1};
  // X/Y on the ancilla times every axis on the single system qubit.
  std::vector<std::string> words;
  for (char a : std::string("XY"))
    for (char s : std::string("IXYZ")) words.push_back(s == 'I' ? std::string(1, a) + "0" : std::string(1, a) + "0." + s + "1");
  const auto fam = build_custom(words, RegisterLayout(1, 1));
  const auto r = check_lindblad_identity(random_hermitian(l, rng), random_density_matrix(l, rng), lb, fam.ancilla_gens);
  EXPECT_LE(r.abs_error, 1e-10);
  EXPECT_LE(r.block_error, 1e-12);
}

TEST(LindbladIdentity, ZeroJumpBothSidesVanish) {
  Rng rng(5);
  const auto in = random_lindblad_instance(2, 2, rng);
  const LindbladOp zero{Matrix::Zero(2, 2), 0, 1};
  const auto r = check_lindblad_identity(in.h, in.rho, zero, in.gens);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(LindbladIdentity, RandomInstancesHoldIdentity) {
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Rng rng = stream_rng(6, static_cast<std::uint64_t>(t));
    const auto in = random_lindblad_instance(2, 2, rng);
    const auto r = check_lindblad_identity(in.h, in.rho, in.lb, in.gens);
    worst = std::max(worst, r.abs_error);
    EXPECT_LE(r.block_error, 1e-12);
    EXPECT_TRUE(r.corollary_ok);
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(LindbladIdentity, AlphaReconstructsG) {
  Rng rng(7);
  const auto in = random_lindblad_instance(3, 2, rng);
  const auto r = check_lindblad_identity(in.h, in.rho, in.lb, in.gens);
  EXPECT_LE(r.reconstruction_error, 1e-12);
  EXPECT_LE(r.abs_error, 1e-8);
}

TEST(LindbladIdentity, MissingGeneratorIsAnError) {
  Rng rng(8);
  auto in = random_lindblad_instance(2, 2, rng);
  ASSERT_EQ(in.gens.back(), PauliString::parse("Y0.Z2", 3));
  in.gens.pop_back();
  EXPECT_NO_THROW(check_lindblad_identity(in.h, in.rho, {in.lb.jump, 0, 1}, in.gens));
  EXPECT_THROW(check_lindblad_identity(in.h, in.rho, {in.lb.jump, 1, 1}, in.gens), value_error);
}

TEST(LindbladIdentity, CorollaryAtGroundState) {
  // At the ground state K is PSD, so no Lindbladian lowers the energy.
  const auto h = build_tfim({3, 1.0, 0.4, 0.3, Boundary::open});
  const auto rho = DensityMatrix::pure(ground_state_vector(h), h.layout);
  const auto gens = build_standard(2, RegisterLayout(3, 1)).ancilla_gens;
  for (int t = 0; t < 10; ++t) {
    Rng rng = stream_rng(9, static_cast<std::uint64_t>(t));
    const auto lb = random_lindblad(t % 3, 1, rng);
    const auto r = check_lindblad_identity(h, rho, lb, gens);
    EXPECT_GE(r.min_hessian_eig, -1e-10);
    EXPECT_GE(r.lhs, -1e-10);
    EXPECT_TRUE(r.passed());
  }
}

TEST(HaarSurvey, ZeroHamiltonianGivesZeroGradients) {
  Rng rng(10);
  const RegisterLayout l(3, 0);
  const auto s = haar_gradient_survey(DenseOperator(Matrix::Zero(8, 8), l), build_standard(2, l).system_gens, 20, rng);
  ASSERT_EQ(s.max_gradient.size(), 20U);
  for (double g : s.max_gradient) EXPECT_EQ(g, 0.0);
}

TEST(HaarSurvey, AgreesWithDensityMatrixGradient) {
  Rng rng(11);
  const auto h = build_tfim({3, 1.0, 0.25, 0.25, Boundary::open});
  const auto gens = build_standard(2, h.layout).system_gens;
  Rng copy = rng;
  const auto s = haar_gradient_survey(h, gens, 1, rng);
  const Vector psi = haar_state(8, copy);
  const double direct = system_gradient(h, DensityMatrix::pure(psi, h.layout), gens).cwiseAbs().maxCoeff();
  EXPECT_NEAR(s.max_gradient[0], direct, 1e-12);
}

TEST(HaarSurvey, MedianShrinksFromFourToEightSites) {
  auto median_at = [](int n) {
    Rng rng = stream_rng(12, static_cast<std::uint64_t>(n));
    const auto h = build_tfim({n, 1.0, 0.25, 0.25, Boundary::open});
    return haar_gradient_survey(h, build_standard(2, h.layout).system_gens, 200, rng).median();
  };
  EXPECT_LT(median_at(8), median_at(4));
}

TEST(HaarSurvey, FixedSeedRegression) {
  Rng rng(2024);
  const auto h = build_tfim({4, 1.0, 0.25, 0.25, Boundary::open});
  const auto s = haar_gradient_survey(h, build_standard(2, h.layout).system_gens, 50, rng);
  EXPECT_NEAR(s.median(), 1.4208565649517131, 1e-12);
}

TEST(Variance, ZeroHamiltonian) {
  Rng rng(13);
  const auto v = brickwall_variance(DenseOperator(Matrix::Zero(4, 4), RegisterLayout(2, 0)), build_brickwall(2), 4, 50, rng);
  EXPECT_EQ(v.variance, 0.0);
  EXPECT_EQ(v.bound, 0.0);
  EXPECT_TRUE(v.above_bound());
}

TEST(Variance, SingleZAboveClosedFormBound) {
  Rng rng(14);
  const DenseOperator z0(oracle::word("ZI"), RegisterLayout(2, 0));
  EXPECT_DOUBLE_EQ(variance_lower_bound(z0), 1.0 / std::pow(5.0, 12));
  const auto v = brickwall_variance(z0, build_brickwall(2), 4, 500, rng);
  EXPECT_TRUE(v.above_bound()) << v.variance << " " << v.std_error;
}

TEST(Variance, RejectsBadArguments) {
  Rng rng(15);
  const auto h = build_tfim({4, 1.0, 0.25, 0.25, Boundary::open});
  EXPECT_THROW(brickwall_variance(h, build_brickwall(6), 4, 10, rng), layout_error);
  EXPECT_THROW(brickwall_variance(h, build_brickwall(4), 0, 10, rng), value_error);
}

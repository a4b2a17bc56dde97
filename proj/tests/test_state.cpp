#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ssgd;

TEST(DensityMatrix, RejectsInvalidMatrices) {
  const RegisterLayout l(1, 0);
  Matrix m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix(m, l), value_error);  // not Hermitian
  m << 0.6, 0.0, 0.0, 0.6;
  EXPECT_THROW(DensityMatrix(m, l), value_error);  // trace
  m << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(DensityMatrix(m, l), value_error);  // not PSD
  EXPECT_THROW(DensityMatrix(Matrix::Identity(4, 4) / 4.0, l), layout_error);
  m << 0.5, 0.5, 0.5, 0.5;
  EXPECT_NO_THROW(DensityMatrix(m, l));
}

TEST(DensityMatrix, BitstringOrderingPutsSiteZeroFirst) {
  const auto rho = DensityMatrix::from_bitstring("100");
  EXPECT_EQ(rho.matrix()(4, 4), cplx(1.0, 0.0));
  EXPECT_EQ(DensityMatrix::parse_bitstring("000111"), 7U);
  EXPECT_THROW(DensityMatrix::parse_bitstring("01a"), value_error);
}

TEST(Ancilla, AttachThenResetIsIdentity) {
  Rng rng(5);
  const auto rho = random_density_matrix(RegisterLayout(2, 0), rng);
  for (int na : {1, 2}) {
    const auto joint = attach_ancilla(rho, na);
    EXPECT_EQ(joint.layout(), RegisterLayout(2, na));
    EXPECT_LT((reset_ancilla(joint).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Ancilla, AttachedStateIsZeroTensorRho) {
  Rng rng(6);
  const auto rho = random_density_matrix(RegisterLayout(2, 0), rng);
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  EXPECT_LT((attach_ancilla(rho, 1).matrix() - oracle::kron(zero, rho.matrix())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Ancilla, ResetMatchesNaivePartialTrace) {
  Rng rng(7);
  for (int na : {1, 2}) {
    const auto joint = random_density_matrix(RegisterLayout(2, na), rng);
    const Matrix expect = oracle::partial_trace_leading(joint.matrix(), na, 2);
    EXPECT_LT((reset_ancilla(joint).matrix() - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(GeneratorStep, MatchesSeriesExponential) {
  Rng rng(8);
  const RegisterLayout l(2, 1);
  const auto rho = attach_ancilla(random_density_matrix(RegisterLayout(2, 0), rng), 1);
  const std::vector<PauliTerm> terms{{0.3, PauliString::parse("X0.Z1", 3)}, {-0.7, PauliString::parse("Y2", 3)},
                                     {0.2, PauliString::parse("Y0.X1.X2", 3)}};
  Matrix g = Matrix::Zero(8, 8);
  for (const auto& t : terms) g += t.coefficient * oracle::dense(t.word);
  const Matrix u = oracle::expm(cplx(0, -1) * g);
  const Matrix expect = u * rho.matrix() * u.adjoint();
  const auto out = apply_generator_step(rho, terms);
  EXPECT_LT((out.matrix() - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
}

TEST(GeneratorStep, ZeroCoefficientsLeaveStateUntouched) {
  Rng rng(9);
  const auto rho = random_density_matrix(RegisterLayout(2, 0), rng);
  const auto out = apply_generator_step(rho, {{0.0, PauliString::parse("X0", 2)}});
  EXPECT_EQ(out.matrix(), rho.matrix());
}

TEST(GeneratorStep, RejectsBadTerms) {
  const auto rho = DensityMatrix::maximally_mixed(RegisterLayout(2, 0));
  EXPECT_THROW(apply_generator_step(rho, {{std::nan(""), PauliString::parse("X0", 2)}}), value_error);
  EXPECT_THROW(apply_generator_step(rho, {{0.1, PauliString::parse("i*X0", 2)}}), value_error);
  EXPECT_THROW(apply_generator_step(rho, {{0.1, PauliString::parse("X0", 3)}}), layout_error);
}

TEST(LocalUnitary, MatchesKroneckerEmbedding) {
  Rng rng(10);
  const auto rho = random_density_matrix(RegisterLayout(3, 0), rng);
  const Matrix u = haar_unitary(4, rng);
  // Element-wise embedding: qubit 2 is the high bit of u's index, qubit 0 the low bit.
  auto qbit = [](int b, int q) { return (b >> (2 - q)) & 1; };
  Matrix full = Matrix::Zero(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      if (qbit(r, 1) == qbit(c, 1)) full(r, c) = u(2 * qbit(r, 2) + qbit(r, 0), 2 * qbit(c, 2) + qbit(c, 0));
  const Matrix expect = full * rho.matrix() * full.adjoint();
  EXPECT_LT((apply_local_unitary(rho, u, {2, 0}).matrix() - expect).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Expectation, RealValuedAndLayoutChecked) {
  const auto rho = DensityMatrix::from_bitstring("01");
  const DenseOperator z0(oracle::word("ZI"), RegisterLayout(2, 0));
  EXPECT_DOUBLE_EQ(expectation(rho, z0), 1.0);
  const DenseOperator z1(oracle::word("IZ"), RegisterLayout(2, 0));
  EXPECT_DOUBLE_EQ(expectation(rho, z1), -1.0);
  EXPECT_THROW(expectation(attach_ancilla(rho, 1), z0), layout_error);
  Matrix nh = oracle::word("XI");
  nh(0, 2) = cplx(0, 1);
  EXPECT_THROW(expectation(rho, DenseOperator(nh, RegisterLayout(2, 0))), value_error);
}

TEST(Sanitize, ProjectsSmallNegativeEigenvalues) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0 + 1e-8;
  m(1, 1) = -1e-8;
  const auto rho = DensityMatrix::trusted(m, RegisterLayout(1, 0)).sanitized();
  EXPECT_GE(rho.min_eigenvalue(), -1e-15);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
}

TEST(HaarSampling, UnitaryAndNormalised) {
  Rng rng(12);
  const Matrix u = haar_unitary(4, rng);
  EXPECT_LT((u * u.adjoint() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(haar_state(16, rng).norm(), 1.0, 1e-14);
}

TEST(HaarSampling, StreamsAreReproducible) {
  Rng a = stream_rng(42, 3), b = stream_rng(42, 3), c = stream_rng(42, 4);
  EXPECT_EQ(a(), b());
  EXPECT_NE(stream_rng(42, 3)(), c());
}

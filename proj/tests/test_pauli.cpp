#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ssgd;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(RegisterLayout, AncillaQubitsComeFirst) {
  RegisterLayout l(3, 2);
  EXPECT_EQ(l.total(), 5);
  EXPECT_EQ(l.dim(), 32U);
  EXPECT_EQ(l.ancilla_qubit(1), 1);
  EXPECT_EQ(l.system_qubit(0), 2);
  EXPECT_TRUE(l.is_ancilla(1));
  EXPECT_FALSE(l.is_ancilla(2));
  EXPECT_EQ(l.ancilla_mask(), 0b11U);
  EXPECT_THROW(RegisterLayout(0, 1), layout_error);
  EXPECT_THROW(RegisterLayout(2, -1), layout_error);
}

TEST(PauliString, SingleQubitProductTable) {
  const char axes[] = {'I', 'X', 'Y', 'Z'};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto pa = PauliString::single(1, 0, static_cast<Axis>(a));
      const auto pb = PauliString::single(1, 0, static_cast<Axis>(b));
      const Matrix expect = oracle::pauli2(axes[a]) * oracle::pauli2(axes[b]);
      EXPECT_LT(max_diff(oracle::dense(pa * pb), expect), 1e-15) << axes[a] << axes[b];
    }
}

TEST(PauliString, XTimesYIsIZ) {
  const auto x = PauliString::single(1, 0, Axis::X);
  const auto y = PauliString::single(1, 0, Axis::Y);
  const auto p = x * y;
  EXPECT_EQ(p.axis(0), Axis::Z);
  EXPECT_EQ(p.phase_exponent(), 1);
}

TEST(PauliString, RandomProductsMatchKronecker) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> ax(0, 3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 4;
    PauliString a(n), b(n);
    for (int q = 0; q < n; ++q) {
      a.set_axis(q, static_cast<Axis>(ax(rng)));
      b.set_axis(q, static_cast<Axis>(ax(rng)));
    }
    a = a.with_phase(ax(rng));
    const Matrix prod = oracle::dense(a) * oracle::dense(b);
    EXPECT_LT(max_diff(oracle::dense(a * b), prod), 1e-14);
    const bool commute = max_diff(prod, oracle::dense(b) * oracle::dense(a)) < 1e-12;
    EXPECT_EQ(a.commutes_with(b), commute);
  }
}

TEST(PauliString, CommutatorOfAnticommutingPair) {
  const auto x = PauliString::single(2, 0, Axis::X);
  const auto z = PauliString::single(2, 0, Axis::Z);
  const auto c = commutator(x, z);
  ASSERT_TRUE(c.has_value());
  const Matrix expect = oracle::dense(x) * oracle::dense(z) - oracle::dense(z) * oracle::dense(x);
  EXPECT_LT(max_diff(c->coefficient * oracle::dense(c->word), expect), 1e-15);
  EXPECT_FALSE(commutator(x, PauliString::single(2, 1, Axis::Z)).has_value());
}

TEST(PauliString, ParseAndPrintRoundTrip) {
  const auto p = PauliString::parse("-i*X0.Z3", 4);
  EXPECT_EQ(p.axis(0), Axis::X);
  EXPECT_EQ(p.axis(3), Axis::Z);
  EXPECT_EQ(p.phase_exponent(), 3);
  EXPECT_EQ(PauliString::parse(p.str(), 4), p);
  EXPECT_EQ(PauliString::parse("Y1", 2).str(), "+1*Y1");
  EXPECT_TRUE(PauliString::parse("I", 3).is_identity_word());
  EXPECT_THROW(PauliString::parse("X5", 3), std::invalid_argument);
  EXPECT_THROW(PauliString::parse("Q0", 3), std::invalid_argument);
}

TEST(PauliString, SupportAndHermiticity) {
  const auto p = PauliString::parse("X0.Y2", 3);
  EXPECT_EQ(p.weight(), 2);
  EXPECT_EQ(p.support(), (std::vector<int>{0, 2}));
  EXPECT_TRUE(p.is_hermitian());
  EXPECT_FALSE(p.with_phase(1).is_hermitian());
  const auto s = p.shifted(5, 2);
  EXPECT_EQ(s.axis(2), Axis::X);
  EXPECT_EQ(s.axis(4), Axis::Y);
}

TEST(DenseAction, ToDenseMatchesKronecker) {
  for (const auto& axes : oracle::all_axis_strings(3)) {
    std::vector<Axis> v;
    for (char c : axes) v.push_back(static_cast<Axis>(std::string("IXYZ").find(c)));
    const auto p = PauliString::from_axes(v);
    EXPECT_LT(max_diff(to_dense(p, RegisterLayout(3, 0)), oracle::word(axes)), 1e-15) << axes;
  }
}

TEST(DenseAction, TraceAndMultiplyMatchDense) {
  Rng rng(11);
  const RegisterLayout l(3, 0);
  const Matrix m = complex_gaussian(8, 8, rng);
  for (const auto& w : {"X0.Y1", "Z2", "Y0.Y1.Y2", "-i*X1.Z2"}) {
    const auto p = PauliString::parse(w, 3);
    const Matrix pd = oracle::dense(p);
    EXPECT_LT(std::abs(trace_product(p, m) - (pd * m).trace()), 1e-12) << w;
    EXPECT_LT(max_diff(left_multiply(p, m), pd * m), 1e-13) << w;
    EXPECT_LT(max_diff(right_multiply(m, p), m * pd), 1e-13) << w;
  }
}

TEST(DenseAction, DenseSumRejectsWrongLayout) {
  EXPECT_THROW(to_dense(PauliString::parse("X0", 2), RegisterLayout(3, 0)), layout_error);
  const Matrix h = dense_sum({{0.5, PauliString::parse("Z0", 2)}, {2.0, PauliString::parse("X0.X1", 2)}}, RegisterLayout(2, 0));
  EXPECT_LT(max_diff(h, 0.5 * oracle::word("ZI") + 2.0 * oracle::word("XX")), 1e-15);
}

#pragma once

// Multi-qubit Pauli words, register layouts and their dense lowering.
//
// Qubit ordering: ancilla qubits take the lowest global indices and system
// qubits follow. Global qubit q is the q-th Kronecker factor from the left,
// i.e. it lives on bit (n - 1 - q) of a computational-basis index. With this
// ordering |0><0|_A (x) rho is the top-left block of the joint matrix.

#include <Eigen/Dense>

#include <bit>
#include <charconv>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssgd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr int kMaxQubits = 62;

class layout_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class value_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Joint ancilla + system register. Ancilla j is global qubit j, system qubit
/// j is global qubit n_ancilla + j.
class RegisterLayout {
 public:
  explicit RegisterLayout(int n_system = 1, int n_ancilla = 0)
      : n_system_(n_system), n_ancilla_(n_ancilla) {
    if (n_system < 1) throw layout_error("layout needs at least one system qubit");
    if (n_ancilla < 0) throw layout_error("negative ancilla count");
    if (n_system + n_ancilla > kMaxQubits) throw layout_error("too many qubits");
  }

  int n_system() const { return n_system_; }
  int n_ancilla() const { return n_ancilla_; }
  int total() const { return n_system_ + n_ancilla_; }
  std::size_t dim() const { return std::size_t{1} << total(); }

  int ancilla_qubit(int j) const { return j; }
  int system_qubit(int j) const { return n_ancilla_ + j; }
  bool is_ancilla(int q) const { return q >= 0 && q < n_ancilla_; }

  /// Bit mask (qubit-indexed) of the ancilla qubits.
  std::uint64_t ancilla_mask() const { return (std::uint64_t{1} << n_ancilla_) - 1; }

  RegisterLayout system_only() const { return RegisterLayout(n_system_, 0); }
  RegisterLayout with_ancilla(int n) const { return RegisterLayout(n_system_, n); }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

 private:
  int n_system_;
  int n_ancilla_;
};

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char axis_char(Axis a) { return "IXYZ"[static_cast<int>(a)]; }

/// A Pauli word i^k * (P_0 (x) P_1 (x) ... ) on a fixed number of qubits.
/// Axes are stored as symplectic bit masks (bit q = qubit q), Y = x & z.
class PauliString {
 public:
  explicit PauliString(int n_qubits = 1) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw layout_error("invalid qubit count");
  }

  static PauliString single(int n_qubits, int qubit, Axis a) {
    PauliString p(n_qubits);
    p.set_axis(qubit, a);
    return p;
  }

  static PauliString from_axes(const std::vector<Axis>& axes, int phase_exponent = 0) {
    PauliString p(static_cast<int>(axes.size()));
    for (int q = 0; q < p.n_; ++q) p.set_axis(q, axes[q]);
    p.phase_ = static_cast<std::uint8_t>(((phase_exponent % 4) + 4) % 4);
    return p;
  }

  /// Parses the text form `+1*X0.Z3` (phase, '*', axis-index pairs joined by
  /// '.'). The phase prefix is optional; `I` alone denotes the identity word.
  static PauliString parse(std::string_view text, int n_qubits);

  int n_qubits() const { return n_; }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }

  Axis axis(int q) const {
    check_qubit(q);
    const int xb = (x_ >> q) & 1U;
    const int zb = (z_ >> q) & 1U;
    if (xb && zb) return Axis::Y;
    if (xb) return Axis::X;
    if (zb) return Axis::Z;
    return Axis::I;
  }

  void set_axis(int q, Axis a) {
    check_qubit(q);
    const std::uint64_t bit = std::uint64_t{1} << q;
    x_ &= ~bit;
    z_ &= ~bit;
    if (a == Axis::X || a == Axis::Y) x_ |= bit;
    if (a == Axis::Z || a == Axis::Y) z_ |= bit;
  }

  /// Phase as i^k, k in {0,1,2,3}.
  int phase_exponent() const { return phase_; }
  cplx phase() const { return unit_phase(phase_); }
  PauliString with_phase(int k) const {
    PauliString p = *this;
    p.phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4);
    return p;
  }

  std::uint64_t support_mask() const { return x_ | z_; }
  std::vector<int> support() const {
    std::vector<int> out;
    for (int q = 0; q < n_; ++q)
      if ((support_mask() >> q) & 1U) out.push_back(q);
    return out;
  }
  int weight() const { return std::popcount(support_mask()); }
  bool is_identity_word() const { return support_mask() == 0; }
  bool is_hermitian() const { return (phase_ % 2) == 0; }

  bool commutes_with(const PauliString& o) const {
    return (std::popcount((x_ & o.z_) ^ (z_ & o.x_)) % 2) == 0;
  }

  /// Same word padded/moved onto a register with `n_qubits` qubits, global
  /// index q mapped to q + shift.
  PauliString shifted(int n_qubits, int shift) const {
    PauliString p(n_qubits);
    for (int q : support()) p.set_axis(q + shift, axis(q));
    p.phase_ = phase_;
    return p;
  }

  std::string str() const {
    static constexpr const char* kPhase[] = {"+1", "+i", "-1", "-i"};
    std::string out = kPhase[phase_];
    out += '*';
    if (is_identity_word()) return out + 'I';
    bool first = true;
    for (int q : support()) {
      if (!first) out += '.';
      first = false;
      out += axis_char(axis(q));
      out += std::to_string(q);
    }
    return out;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

  static cplx unit_phase(int k) {
    switch (((k % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

 private:
  friend PauliString multiply(const PauliString& a, const PauliString& b);

  void check_qubit(int q) const {
    if (q < 0 || q >= n_) throw layout_error("qubit index " + std::to_string(q) + " outside register");
  }

  int n_;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  std::uint8_t phase_ = 0;
};

/// Real coefficient times a Pauli word.
struct PauliTerm {
  double coefficient = 0.0;
  PauliString word;
};

inline PauliString multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw layout_error("multiply: Pauli words on different registers");
  int k = a.phase_exponent() + b.phase_exponent();
  for (int q = 0; q < a.n_qubits(); ++q) {
    const int pa = static_cast<int>(a.axis(q));
    const int pb = static_cast<int>(b.axis(q));
    if (pa == 0 || pb == 0 || pa == pb) continue;
    // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
    k += ((pb - pa + 3) % 3 == 1) ? 1 : 3;
  }
  PauliString out(a.n_qubits());
  out.x_ = a.x_ ^ b.x_;
  out.z_ = a.z_ ^ b.z_;
  out.phase_ = static_cast<std::uint8_t>(k % 4);
  return out;
}

inline PauliString operator*(const PauliString& a, const PauliString& b) { return multiply(a, b); }

/// [a, b]: absent when the words commute, otherwise 2 * (a b).
inline std::optional<PauliTerm> commutator(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw layout_error("commutator: Pauli words on different registers");
  if (a.commutes_with(b)) return std::nullopt;
  return PauliTerm{2.0, multiply(a, b)};
}

inline PauliString PauliString::parse(std::string_view text, int n_qubits) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  int k = 0;
  if (auto star = text.find('*'); star != std::string_view::npos) {
    const std::string_view ph = trim(text.substr(0, star));
    if (ph == "+1" || ph == "1") k = 0;
    else if (ph == "+i" || ph == "i") k = 1;
    else if (ph == "-1") k = 2;
    else if (ph == "-i") k = 3;
    else throw value_error("bad Pauli phase '" + std::string(ph) + "'");
    text = trim(text.substr(star + 1));
  }
  PauliString p(n_qubits);
  p.phase_ = static_cast<std::uint8_t>(k);
  if (text == "I" || text.empty()) return p;
  while (!text.empty()) {
    const auto dot = text.find('.');
    const std::string_view tok = trim(text.substr(0, dot));
    text = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (tok.size() < 2) throw value_error("bad Pauli token '" + std::string(tok) + "'");
    Axis a;
    switch (tok.front()) {
      case 'X': a = Axis::X; break;
      case 'Y': a = Axis::Y; break;
      case 'Z': a = Axis::Z; break;
      case 'I': a = Axis::I; break;
      default: throw value_error("bad Pauli axis in '" + std::string(tok) + "'");
    }
    int q = -1;
    const auto* first = tok.data() + 1;
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, q);
    if (ec != std::errc{} || ptr != last) throw value_error("bad qubit index in '" + std::string(tok) + "'");
    if (q < 0 || q >= n_qubits) throw layout_error("Pauli token '" + std::string(tok) + "' outside register");
    if (p.axis(q) != Axis::I) throw value_error("repeated qubit in Pauli word");
    p.set_axis(q, a);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Dense action. P|b> = i^(k + #Y) (-1)^popcount(b & zmask) |b ^ xmask>, with the
// masks expressed in basis-index bit positions.

struct PauliAction {
  std::uint64_t xmask = 0;
  std::uint64_t zmask = 0;
  cplx base{1.0, 0.0};

  explicit PauliAction(const PauliString& p) {
    const int n = p.n_qubits();
    for (int q = 0; q < n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
      if ((p.x_bits() >> q) & 1U) xmask |= bit;
      if ((p.z_bits() >> q) & 1U) zmask |= bit;
    }
    base = PauliString::unit_phase(p.phase_exponent() + std::popcount(p.x_bits() & p.z_bits()));
  }

  /// Amplitude of P|b> on |b ^ xmask>.
  cplx amplitude(std::uint64_t b) const { return (std::popcount(b & zmask) & 1) ? -base : base; }
};

inline void check_on_layout(const PauliString& p, const RegisterLayout& layout) {
  if (p.n_qubits() != layout.total()) throw layout_error("Pauli word " + p.str() + " not defined on this layout");
}

inline Matrix to_dense(const PauliString& p, const RegisterLayout& layout) {
  check_on_layout(p, layout);
  const auto d = static_cast<Eigen::Index>(layout.dim());
  const PauliAction act(p);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    m(static_cast<Eigen::Index>(ub ^ act.xmask), b) = act.amplitude(ub);
  }
  return m;
}

/// Accumulates sum_j c_j P_j into a dense matrix.
inline Matrix dense_sum(const std::vector<PauliTerm>& terms, const RegisterLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.dim());
  Matrix m = Matrix::Zero(d, d);
  for (const auto& t : terms) {
    check_on_layout(t.word, layout);
    if (t.coefficient == 0.0) continue;
    const PauliAction act(t.word);
    for (Eigen::Index b = 0; b < d; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      m(static_cast<Eigen::Index>(ub ^ act.xmask), b) += t.coefficient * act.amplitude(ub);
    }
  }
  return m;
}

/// Tr(P M) in O(dim).
inline cplx trace_product(const PauliString& p, const Matrix& m) {
  const PauliAction act(p);
  cplx acc{0.0, 0.0};
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    const auto c = static_cast<std::uint64_t>(a) ^ act.xmask;
    // (P M)_{aa} = amp(c) M_{c a} with a = c ^ x.
    acc += act.amplitude(c) * m(static_cast<Eigen::Index>(c), a);
  }
  return acc;
}

/// P M, touching each entry once.
inline Matrix left_multiply(const PauliString& p, const Matrix& m) {
  const PauliAction act(p);
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.rows(); ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    out.row(static_cast<Eigen::Index>(uc ^ act.xmask)) = act.amplitude(uc) * m.row(c);
  }
  return out;
}

/// M P.
inline Matrix right_multiply(const Matrix& m, const PauliString& p) {
  const PauliAction act(p);
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index b = 0; b < m.cols(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    out.col(b) = act.amplitude(ub) * m.col(static_cast<Eigen::Index>(ub ^ act.xmask));
  }
  return out;
}

}  // namespace ssgd

#pragma once

// Generator families G = G_A u G_S: k-local system words, ancilla-coupled
// words that actually entangle with |0>_A, and the alternating brickwall
// schedule.

#include "ssgd/models.hpp"
#include "ssgd/pauli.hpp"

#include <algorithm>
#include <array>

namespace ssgd {

struct GeneratorSet {
  std::vector<PauliString> system_gens;
  std::vector<PauliString> ancilla_gens;
  int k = 0;
  RegisterLayout layout;

  std::size_t size() const { return system_gens.size() + ancilla_gens.size(); }

  /// Drops G_A; the purely unitary ablation.
  GeneratorSet unitary_only() const {
    GeneratorSet out = *this;
    out.ancilla_gens.clear();
    return out;
  }
};

namespace detail {

inline std::vector<std::vector<int>> windows(int n_system, int width, Boundary boundary) {
  std::vector<std::vector<int>> out;
  if (width == 0) {
    out.emplace_back();
    return out;
  }
  const bool wrap = boundary == Boundary::periodic && width < n_system;
  const int starts = wrap ? n_system : n_system - width + 1;
  for (int s = 0; s < starts; ++s) {
    std::vector<int> w;
    for (int i = 0; i < width; ++i) w.push_back((s + i) % n_system);
    out.push_back(std::move(w));
  }
  return out;
}

/// Every axis assignment over `qubits` in lexicographic I < X < Y < Z order,
/// first listed qubit most significant.
inline std::vector<PauliString> all_words(int n_qubits, const std::vector<int>& qubits) {
  std::vector<PauliString> out;
  const auto m = static_cast<int>(qubits.size());
  const std::size_t count = std::size_t{1} << (2 * m);
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    PauliString p(n_qubits);
    for (int i = 0; i < m; ++i) {
      const auto a = static_cast<Axis>((code >> (2 * (m - 1 - i))) & 3U);
      p.set_axis(qubits[i], a);
    }
    out.push_back(p);
  }
  return out;
}

inline void push_unique(std::vector<PauliString>& dst, const PauliString& p) {
  if (std::find(dst.begin(), dst.end(), p) == dst.end()) dst.push_back(p);
}

}  // namespace detail

/// True when the word can move |0>_A out of itself, i.e. <0|P_A|0> = 0.
inline bool entangles_ancilla(const PauliString& p, const RegisterLayout& layout) {
  return (p.x_bits() & layout.ancilla_mask()) != 0;
}

/// Standard single-ancilla family. G_S: all non-identity words on every window
/// of k adjacent system qubits. G_A: {X, Y} on the ancilla times any word
/// (identity included) on a window of k - 1 adjacent system qubits. A layout
/// without ancilla yields an empty G_A.
inline GeneratorSet build_standard(int k, const RegisterLayout& layout, Boundary boundary = Boundary::open) {
  if (k < 1) throw value_error("generator locality k must be >= 1");
  if (k > layout.n_system()) throw value_error("generator locality k exceeds the number of system qubits");
  if (layout.n_ancilla() > 1) throw layout_error("standard generator set uses a single ancilla");

  GeneratorSet g{{}, {}, k, layout};
  const int n = layout.total();
  auto to_global = [&](std::vector<int> w) {
    for (int& q : w) q = layout.system_qubit(q);
    return w;
  };

  for (const auto& w : detail::windows(layout.n_system(), k, boundary))
    for (const auto& p : detail::all_words(n, to_global(w)))
      if (!p.is_identity_word()) detail::push_unique(g.system_gens, p);

  if (layout.n_ancilla() == 1) {
    for (const auto& w : detail::windows(layout.n_system(), k - 1, boundary)) {
      std::vector<int> qubits{layout.ancilla_qubit(0)};
      for (int q : to_global(w)) qubits.push_back(q);
      for (const auto& p : detail::all_words(n, qubits))
        if (entangles_ancilla(p, layout)) detail::push_unique(g.ancilla_gens, p);
    }
  }
  return g;
}

/// Custom family from text words (global indices on `layout`). Words that
/// touch an ancilla go to G_A and must pass the entanglement filter.
inline GeneratorSet build_custom(const std::vector<std::string>& words, const RegisterLayout& layout) {
  GeneratorSet g{{}, {}, 0, layout};
  for (const auto& w : words) {
    PauliString p = PauliString::parse(w, layout.total());
    if (p.is_identity_word()) throw value_error("identity word is not a valid generator");
    if (!p.is_hermitian()) throw value_error("generator " + p.str() + " is not Hermitian");
    p = p.with_phase(0);
    if ((p.support_mask() & layout.ancilla_mask()) != 0) {
      if (!entangles_ancilla(p, layout)) throw value_error("ancilla generator " + p.str() + " has <0|P_A|0> != 0");
      detail::push_unique(g.ancilla_gens, p);
    } else {
      detail::push_unique(g.system_gens, p);
    }
    g.k = std::max(g.k, p.weight());
  }
  return g;
}

enum class BrickPhase { ancilla_layer, even_bonds, odd_bonds };

inline std::string to_string(BrickPhase p) {
  switch (p) {
    case BrickPhase::ancilla_layer: return "ancilla_layer";
    case BrickPhase::even_bonds: return "even_bonds";
    default: return "odd_bonds";
  }
}

/// N system qubits, N ancillas (ancilla j paired with system qubit j). Bonds
/// are 0-indexed: even = (0,1),(2,3),..., odd = (1,2),(3,4),... plus the wrap
/// bond (N-1, 0) on a periodic chain.
struct BrickwallSchedule {
  int n_system = 2;
  Boundary boundary = Boundary::open;
  std::vector<BrickPhase> phase_sequence;
  std::vector<std::array<int, 2>> even_pairs;
  std::vector<std::array<int, 2>> odd_pairs;

  RegisterLayout layout() const { return RegisterLayout(n_system, n_system); }
  std::size_t period() const { return phase_sequence.size(); }
  BrickPhase phase_at(std::size_t t) const { return phase_sequence[t % period()]; }
  const std::vector<std::array<int, 2>>& pairs(BrickPhase p) const {
    return p == BrickPhase::even_bonds ? even_pairs : odd_pairs;
  }
};

inline BrickwallSchedule build_brickwall(int n_system, Boundary boundary = Boundary::open) {
  if (n_system < 2 || n_system % 2 != 0) throw value_error("brickwall schedule needs an even number of system qubits");
  BrickwallSchedule s;
  s.n_system = n_system;
  s.boundary = boundary;
  s.phase_sequence = {BrickPhase::ancilla_layer, BrickPhase::even_bonds, BrickPhase::ancilla_layer, BrickPhase::odd_bonds};
  for (int j = 0; j + 1 < n_system; j += 2) s.even_pairs.push_back({j, j + 1});
  for (int j = 1; j + 1 < n_system; j += 2) s.odd_pairs.push_back({j, j + 1});
  if (boundary == Boundary::periodic) s.odd_pairs.push_back({n_system - 1, 0});
  return s;
}

inline GeneratorSet gens_at_phase(const BrickwallSchedule& s, std::size_t t) {
  const RegisterLayout layout = s.layout();
  const int n = layout.total();
  GeneratorSet g{{}, {}, 2, layout};
  const BrickPhase phase = s.phase_at(t);
  if (phase == BrickPhase::ancilla_layer) {
    for (int j = 0; j < s.n_system; ++j)
      for (const auto& p : detail::all_words(n, {layout.ancilla_qubit(j), layout.system_qubit(j)}))
        if (entangles_ancilla(p, layout)) g.ancilla_gens.push_back(p);
  } else {
    for (const auto& [a, b] : s.pairs(phase))
      for (const auto& p : detail::all_words(n, {layout.system_qubit(a), layout.system_qubit(b)}))
        if (!p.is_identity_word()) detail::push_unique(g.system_gens, p);
  }
  return g;
}

}  // namespace ssgd

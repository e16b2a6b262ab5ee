#pragma once

// Compilation of Pauli exponentials and the full commuting evolution
// unitary into the fixed gate set, a peephole optimizer, and a
// simultaneous-diagonalization backend for commuting Pauli sets.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gqsim/bosonmap.hpp"
#include "gqsim/circuit.hpp"
#include "gqsim/pauli.hpp"

namespace gqsim {

// e^{i pi/4 Z_c X_t} lowered to one CNOT plus single-qubit gates:
//   e^{i pi/4 Z X} = e^{i pi/4 X_t} e^{i pi/4 Z_c} e^{-i pi/4} CNOT(c,t)
// with e^{i pi/4 Z} = e^{i pi/4} Sdg and e^{i pi/4 X} = RX(-pi/2); the
// explicit phases cancel, so the tracked global phase stays 0.
inline Circuit decompose_zx(int n_qubits, int control, int target) {
  if (control == target) {
    throw std::invalid_argument("decompose_zx: equal qubit indices");
  }
  Circuit c(n_qubits);
  c.append(Gate::cnot(control, target));
  c.append(Gate::sdg(control));
  c.append(Gate::rx(target, -kPi / 2));
  return c;
}

namespace detail {

// Single-qubit basis change B with B X B^dag = P for P in {X, Y, Z},
// appended in circuit order; append_inverse emits B^dag.
inline void append_basis_change(Circuit& c, int q, char letter) {
  switch (letter) {
    case 'X':
      break;
    case 'Y':  // B = S
      c.append(Gate::s(q));
      break;
    case 'Z':  // B = e^{i pi/4 Y} = S RX(-pi/2) Sdg
      c.append(Gate::sdg(q));
      c.append(Gate::rx(q, -kPi / 2));
      c.append(Gate::s(q));
      break;
    default:
      throw std::logic_error("append_basis_change: bad letter");
  }
}

inline void append_basis_change_inverse(Circuit& c, int q, char letter) {
  switch (letter) {
    case 'X':
      break;
    case 'Y':
      c.append(Gate::sdg(q));
      break;
    case 'Z':
      c.append(Gate::sdg(q));
      c.append(Gate::rx(q, kPi / 2));
      c.append(Gate::s(q));
      break;
    default:
      throw std::logic_error("append_basis_change_inverse: bad letter");
  }
}

// exp(i theta P_a) on the anchor qubit, exact including global phase.
inline void append_anchor_rotation(Circuit& c, int q, char letter,
                                   double theta) {
  switch (letter) {
    case 'X':
      c.append(Gate::rx(q, -2 * theta));
      break;
    case 'Y':  // S exp(i theta X) Sdg
      c.append(Gate::sdg(q));
      c.append(Gate::rx(q, -2 * theta));
      c.append(Gate::s(q));
      break;
    case 'Z':  // exp(i theta Z) = e^{i theta} U1(-2 theta)
      c.append(Gate::u1(q, -2 * theta));
      c.add_phase(theta);
      break;
    default:
      throw std::logic_error("append_anchor_rotation: bad letter");
  }
}

}  // namespace detail

// Compiles exp(i theta P) for a non-identity Hermitian Pauli string P.
//
// The conjugation-chain construction (anchor X-rotation conjugated through
// one e^{i pi/4 Z_a X_j} pair per support qubit, each lowered to a CNOT)
// collapses, after cancelling the redundant rotations, to a CNOT star on
// the anchor around a single axis rotation, with basis-change gates on
// support qubits carrying Y or Z factors. That collapsed form is emitted
// directly: a weight-w string costs exactly 2(w-1) CNOTs, and any
// weight-4 X/Y string stays within 9 single-qubit gates.
inline Circuit compile_z_rotation(int n_qubits, std::uint64_t z_mask,
                                  double theta);

inline Circuit compile_pauli_exponential(const PauliString& p, double theta) {
  if (p.is_identity()) {
    throw std::invalid_argument("compile_pauli_exponential: identity string");
  }
  if (!p.is_hermitian()) {
    throw std::invalid_argument(
        "compile_pauli_exponential: non-Hermitian string");
  }
  if (p.letter_phase() == complexd{-1, 0}) theta = -theta;

  // The CNOT star spreads X from its control, so the anchor must carry an
  // X or Y factor. Strings with no such factor are pure Z rotations.
  if (p.x_mask() == 0) {
    return compile_z_rotation(p.n_qubits(), p.z_mask(), theta);
  }

  std::vector<int> support;
  int anchor = -1;
  for (int q = 0; q < p.n_qubits(); ++q) {
    const char l = p.letter_at(q);
    if (l == 'I') continue;
    support.push_back(q);
    if (anchor < 0 && l != 'Z') anchor = q;
  }
  // Put the anchor first; the remaining order stays ascending.
  std::erase(support, anchor);
  support.insert(support.begin(), anchor);

  Circuit c(p.n_qubits());
  for (int k = 1; k < static_cast<int>(support.size()); ++k) {
    detail::append_basis_change_inverse(c, support[k],
                                        p.letter_at(support[k]));
  }
  for (int k = static_cast<int>(support.size()) - 1; k >= 1; --k) {
    c.append(Gate::cnot(anchor, support[k]));
  }
  detail::append_anchor_rotation(c, anchor, p.letter_at(anchor), theta);
  for (int k = 1; k < static_cast<int>(support.size()); ++k) {
    c.append(Gate::cnot(anchor, support[k]));
  }
  for (int k = static_cast<int>(support.size()) - 1; k >= 1; --k) {
    detail::append_basis_change(c, support[k], p.letter_at(support[k]));
  }
  return c;
}

// X gates on exactly the qubits that are 1 in the encoded two-mode ground
// state (qubits 1, 2, 4, 5 for the 6-qubit map).
inline Circuit prepare_ground_state(const BosonQubitMap& map) {
  if (map.n_modes() != 2 || map.cutoff() != 2) {
    throw std::invalid_argument("prepare_ground_state: expects 2 modes, N_p=2");
  }
  const FockBasisState ground({0, 0}, 2);
  const std::string bits = map.encode_fock(ground);
  Circuit c(map.total_qubits());
  for (int q = 0; q < map.total_qubits(); ++q) {
    if (bits[q] == '1') c.append(Gate::x(q));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Peephole optimizer
// ---------------------------------------------------------------------------

namespace detail {

inline bool gates_commute(const Gate& a, const Gate& b) {
  auto touches = [](const Gate& g, int q) {
    return g.target == q || (g.is_cnot() && g.control == q);
  };
  // disjoint supports
  if (!touches(a, b.target) && !(b.is_cnot() && touches(a, b.control)) &&
      !touches(b, a.target) && !(a.is_cnot() && touches(b, a.control))) {
    return true;
  }
  if (a.is_cnot() && b.is_cnot()) {
    if (a.control == b.control && a.target != b.target) return true;
    if (a.target == b.target && a.control != b.control) return true;
    return a.control == b.control && a.target == b.target;
  }
  if (a.is_cnot() != b.is_cnot()) {
    const Gate& cx = a.is_cnot() ? a : b;
    const Gate& sq = a.is_cnot() ? b : a;
    if (sq.is_diagonal() && sq.target == cx.control && sq.target != cx.target)
      return true;
    if (sq.is_x_axis() && sq.target == cx.target) return true;
    return false;
  }
  // same-qubit single-qubit gates
  if (a.is_diagonal() && b.is_diagonal()) return true;
  if (a.is_x_axis() && b.is_x_axis()) return true;
  return false;
}

// (u1-angle, shed phase) for a diagonal gate.
inline std::pair<double, double> as_u1(const Gate& g) {
  switch (g.kind) {
    case GateKind::S: return {kPi / 2, 0.0};
    case GateKind::Sdg: return {-kPi / 2, 0.0};
    case GateKind::U1: return {g.angle, 0.0};
    case GateKind::RZ: return {g.angle, -g.angle / 2};
    default: throw std::logic_error("as_u1: not diagonal");
  }
}

// (rx-angle, shed phase) for an x-axis gate.
inline std::pair<double, double> as_rx(const Gate& g) {
  switch (g.kind) {
    case GateKind::X: return {kPi, kPi / 2};
    case GateKind::SqrtX: return {kPi / 2, kPi / 4};
    case GateKind::RX: return {g.angle, 0.0};
    default: throw std::logic_error("as_rx: not x-axis");
  }
}

constexpr double kAngleEps = 1e-12;

// Merge of two same-qubit, same-axis gates; returns true and fills
// `merged` (empty when the pair cancels), adding shed phase to `phase`.
inline bool try_merge(const Gate& a, const Gate& b, std::vector<Gate>& merged,
                      double& phase) {
  if (a.is_cnot() || b.is_cnot() || a.target != b.target) return false;
  if (a.is_diagonal() && b.is_diagonal()) {
    auto [la, pa] = as_u1(a);
    auto [lb, pb] = as_u1(b);
    phase += pa + pb;
    double l = std::remainder(la + lb, 2 * kPi);
    if (std::abs(l) > kAngleEps) merged.push_back(Gate::u1(a.target, l));
    return true;
  }
  if (a.is_x_axis() && b.is_x_axis()) {
    auto [ta, pa] = as_rx(a);
    auto [tb, pb] = as_rx(b);
    phase += pa + pb;
    double t = std::remainder(ta + tb, 4 * kPi);
    if (std::abs(std::abs(t) - 2 * kPi) < kAngleEps) {
      phase += kPi;  // RX(2 pi) = -I
    } else if (std::abs(t) > kAngleEps) {
      merged.push_back(Gate::rx(a.target, t));
    }
    return true;
  }
  return false;
}

}  // namespace detail

// Applies, to fixpoint: inverse-pair cancellation and same-axis rotation
// merging, across gates that can be commuted together (disjoint supports,
// diagonal gates through CNOT controls, X-axis gates through CNOT
// targets). Unitary preserved exactly; gate counts never increase.
inline Circuit peephole_optimize(const Circuit& input) {
  std::vector<Gate> gates = input.gates();
  double phase = input.global_phase();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < gates.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < gates.size(); ++j) {
        std::vector<Gate> merged;
        bool hit = false;
        if (gates[i].is_cnot() && gates[j] == gates[i]) {
          hit = true;  // CNOT pair cancels
        } else if (detail::try_merge(gates[i], gates[j], merged, phase)) {
          hit = true;
        }
        if (hit) {
          std::vector<Gate> out(gates.begin(), gates.begin() + i);
          out.insert(out.end(), gates.begin() + i + 1, gates.begin() + j);
          out.insert(out.end(), merged.begin(), merged.end());
          out.insert(out.end(), gates.begin() + j + 1, gates.end());
          gates = std::move(out);
          changed = true;
          break;
        }
        if (!detail::gates_commute(gates[i], gates[j])) break;
      }
    }
  }
  Circuit c(input.n_qubits());
  for (const auto& g : gates) c.append(g);
  c.set_phase(phase);
  return c;
}

// ---------------------------------------------------------------------------
// Simultaneous diagonalization of a commuting Pauli set
// ---------------------------------------------------------------------------

namespace detail {

// P -> G P G^dag for the Clifford generators used by the diagonalizer,
// computed exactly in the Pauli algebra via generator images.
struct CliffordOp {
  enum Kind { S, Sdg, H, Cnot } kind;
  int a;       // qubit (S/Sdg/H) or control (Cnot)
  int b = -1;  // target (Cnot)
};

inline PauliString conjugate(const PauliString& p, const CliffordOp& op) {
  const int n = p.n_qubits();
  auto X = [&](int q) { return PauliString::single_letter(n, 'X', q); };
  auto Y = [&](int q) { return PauliString::single_letter(n, 'Y', q); };
  auto Z = [&](int q) { return PauliString::single_letter(n, 'Z', q); };
  auto neg = [&](PauliString s) {
    return PauliString(n, s.x_mask(), s.z_mask(), s.phase_exp() + 2);
  };
  // Images of the XZ generators on the touched qubits.
  auto image_x = [&](int q) -> PauliString {
    switch (op.kind) {
      case CliffordOp::S: return Y(q);                       // S X Sdg = Y
      case CliffordOp::Sdg: return neg(Y(q));                // Sdg X S = -Y
      case CliffordOp::H: return Z(q);
      case CliffordOp::Cnot:
        if (q == op.a) return X(op.a).multiply(X(op.b));     // X_c -> X_c X_t
        return X(q);                                         // X_t -> X_t
    }
    throw std::logic_error("unreachable");
  };
  auto image_z = [&](int q) -> PauliString {
    switch (op.kind) {
      case CliffordOp::S:
      case CliffordOp::Sdg: return Z(q);
      case CliffordOp::H: return X(q);
      case CliffordOp::Cnot:
        if (q == op.b) return Z(op.a).multiply(Z(op.b));     // Z_t -> Z_c Z_t
        return Z(q);                                         // Z_c -> Z_c
    }
    throw std::logic_error("unreachable");
  };
  auto touched = [&](int q) {
    return q == op.a || (op.kind == CliffordOp::Cnot && q == op.b);
  };

  PauliString out(n, 0, 0, p.phase_exp());
  for (int q = 0; q < n; ++q) {
    const bool x = (p.x_mask() >> q) & 1, z = (p.z_mask() >> q) & 1;
    if (!x && !z) continue;
    if (!touched(q)) {
      PauliString factor(n, x ? (1ull << q) : 0, z ? (1ull << q) : 0, 0);
      out = out.multiply(factor);
      continue;
    }
    if (x) out = out.multiply(image_x(q));
    if (z) out = out.multiply(image_z(q));
  }
  return out;
}

}  // namespace detail

struct DiagonalizationResult {
  Circuit clifford_prefix;  // V built from {S, Sdg, H-like, CNOT}
  // One entry per input term: z-support mask of V P V^dag and the real
  // coefficient with the conjugated string's sign folded in.
  std::vector<std::pair<std::uint64_t, double>> z_rotation_layer;
  bool all_z_type = false;
  std::string report;
};

// Builds a Clifford circuit V such that V P_i V^dag is Z-type for every
// term of the commuting sum h. Processes terms in canonical order; each
// pivot H never disturbs already-diagonal terms because commutation with
// the in-progress term forbids a Z on the pivot qubit.
inline DiagonalizationResult diagonalize_commuting_set(const PauliSum& h) {
  if (!h.all_terms_commute()) {
    throw std::invalid_argument("diagonalize_commuting_set: non-commuting set");
  }
  const int n = h.n_qubits();
  std::vector<PauliString> strings;
  std::vector<double> coeffs;
  for (const auto& [c, p] : h.terms()) {
    if (std::abs(c.imag()) > 1e-12 || !p.is_hermitian()) {
      throw std::invalid_argument("diagonalize_commuting_set: non-Hermitian");
    }
    strings.push_back(p);
    coeffs.push_back(c.real());
  }

  std::vector<detail::CliffordOp> ops;
  auto apply = [&](detail::CliffordOp op) {
    ops.push_back(op);
    for (auto& s : strings) s = detail::conjugate(s, op);
  };

  for (std::size_t i = 0; i < strings.size(); ++i) {
    if (strings[i].x_mask() == 0) continue;
    const int pivot = std::countr_zero(strings[i].x_mask());
    // Clear the other x-bits of this term onto the pivot.
    for (int q = pivot + 1; q < n; ++q) {
      if ((strings[i].x_mask() >> q) & 1) {
        apply({detail::CliffordOp::Cnot, pivot, q});
      }
    }
    // Remove a Y on the pivot, then rotate the lone X into Z.
    if ((strings[i].z_mask() >> pivot) & 1) {
      apply({detail::CliffordOp::Sdg, pivot});
    }
    apply({detail::CliffordOp::H, pivot});
  }

  DiagonalizationResult out{Circuit(n)};
  for (const auto& op : ops) {
    switch (op.kind) {
      case detail::CliffordOp::S:
        out.clifford_prefix.append(Gate::s(op.a));
        break;
      case detail::CliffordOp::Sdg:
        out.clifford_prefix.append(Gate::sdg(op.a));
        break;
      case detail::CliffordOp::H:
        // [S, sqrt(X), S] = e^{i pi/4} H
        out.clifford_prefix.append(Gate::s(op.a));
        out.clifford_prefix.append(Gate::sqrt_x(op.a));
        out.clifford_prefix.append(Gate::s(op.a));
        out.clifford_prefix.add_phase(-kPi / 4);
        break;
      case detail::CliffordOp::Cnot:
        out.clifford_prefix.append(Gate::cnot(op.a, op.b));
        break;
    }
  }

  out.all_z_type = true;
  std::ostringstream rep;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const auto& s = strings[i];
    if (s.x_mask() != 0) out.all_z_type = false;
    const complexd ph = s.letter_phase();
    if (std::abs(ph.imag()) > 1e-12) {
      throw std::logic_error("diagonalize_commuting_set: complex sign");
    }
    out.z_rotation_layer.emplace_back(s.z_mask(), coeffs[i] * ph.real());
    rep << "term " << i << ": " << s.to_string()
        << (s.x_mask() == 0 ? " (Z-type)" : " (NOT Z-type)") << "\n";
  }
  rep << "prefix: " << out.clifford_prefix.cnot_count() << " CNOTs, "
      << out.clifford_prefix.single_qubit_count() << " single-qubit gates\n";
  out.report = rep.str();
  return out;
}

// exp(i theta * Z-string) via a CNOT parity ladder into the lowest support
// qubit, exact including global phase.
inline Circuit compile_z_rotation(int n_qubits, std::uint64_t z_mask,
                                  double theta) {
  Circuit c(n_qubits);
  if (z_mask == 0) {
    c.add_phase(theta);
    return c;
  }
  const int anchor = std::countr_zero(z_mask);
  std::vector<int> rest;
  for (int q = anchor + 1; q < n_qubits; ++q) {
    if ((z_mask >> q) & 1) rest.push_back(q);
  }
  for (int q : rest) c.append(Gate::cnot(q, anchor));
  c.append(Gate::u1(anchor, -2 * theta));
  c.add_phase(theta);
  for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
    c.append(Gate::cnot(*it, anchor));
  }
  return c;
}

enum class CompilerBackend { Naive, Peephole, Diagonalize };

inline const char* backend_name(CompilerBackend b) {
  switch (b) {
    case CompilerBackend::Naive: return "naive";
    case CompilerBackend::Peephole: return "peephole";
    case CompilerBackend::Diagonalize: return "diagonalize";
  }
  return "?";
}

// Compiles exp(i eps * h) for a Hermitian sum of pairwise-commuting terms
// as the exact product of per-term exponentials (no Trotter error).
// Ground-state preparation is not included.
inline Circuit compile_full_unitary(
    const PauliSum& h, double eps,
    CompilerBackend backend = CompilerBackend::Naive) {
  const auto& terms = h.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (!terms[i].second.commutes(terms[j].second)) {
        throw std::invalid_argument(
            "compile_full_unitary: non-commuting terms " +
            terms[i].second.to_string() + " and " +
            terms[j].second.to_string());
      }
    }
  }
  for (const auto& [c, p] : terms) {
    if (std::abs(c.imag()) > 1e-12 || !p.is_hermitian()) {
      throw std::invalid_argument("compile_full_unitary: non-Hermitian sum");
    }
  }

  if (backend == CompilerBackend::Diagonalize) {
    const auto diag = diagonalize_commuting_set(h);
    Circuit c(h.n_qubits());
    c.extend(diag.clifford_prefix);
    for (const auto& [mask, coeff] : diag.z_rotation_layer) {
      c.extend(compile_z_rotation(h.n_qubits(), mask, eps * coeff));
    }
    c.extend(diag.clifford_prefix.inverse());
    return peephole_optimize(c);
  }

  Circuit c(h.n_qubits());
  for (const auto& [coeff, p] : terms) {
    c.extend(compile_pauli_exponential(p, eps * coeff.real()));
  }
  if (backend == CompilerBackend::Peephole) return peephole_optimize(c);
  return c;
}

}  // namespace gqsim

#pragma once

// Exact statevector execution of circuits, the independent
// matrix-exponential oracle, and fidelity evaluation.
//
// Amplitude indexing: basis index bit k corresponds to qubit k (qubit 0 is
// the least significant bit internally). Rendered bitstrings put qubit 0
// leftmost; BosonQubitMap::bitstring_to_index is the one bridge between
// the two conventions.

#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gqsim/bosonmap.hpp"
#include "gqsim/circuit.hpp"
#include "gqsim/pauli.hpp"
#include "gqsim/physics.hpp"

namespace gqsim {

class Statevector {
 public:
  explicit Statevector(int n_qubits)
      : n_(n_qubits), amps_(std::size_t{1} << n_qubits, complexd{0, 0}) {
    if (n_qubits <= 0 || n_qubits > 24) {
      throw std::invalid_argument("Statevector: qubit count out of range");
    }
    amps_[0] = 1.0;
  }

  static Statevector basis_state(int n_qubits, std::uint64_t index) {
    Statevector sv(n_qubits);
    if (index >= sv.dim()) throw std::out_of_range("basis_state: bad index");
    sv.amps_[0] = 0.0;
    sv.amps_[index] = 1.0;
    return sv;
  }

  int n_qubits() const { return n_; }
  std::uint64_t dim() const { return amps_.size(); }
  const std::vector<complexd>& amplitudes() const { return amps_; }
  complexd amplitude(std::uint64_t index) const { return amps_.at(index); }

  double norm2() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  void apply_gate(const Gate& g) {
    if (g.target < 0 || g.target >= n_ ||
        (g.is_cnot() && (g.control < 0 || g.control >= n_))) {
      throw std::out_of_range("apply_gate: qubit index out of range");
    }
    if (g.is_cnot()) {
      const std::uint64_t cbit = 1ull << g.control;
      const std::uint64_t tbit = 1ull << g.target;
      for (std::uint64_t i = 0; i < dim(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
      }
      return;
    }
    const auto m = g.matrix2();
    const std::uint64_t tbit = 1ull << g.target;
    for (std::uint64_t i = 0; i < dim(); ++i) {
      if (i & tbit) continue;
      const complexd a0 = amps_[i], a1 = amps_[i | tbit];
      amps_[i] = m(0, 0) * a0 + m(0, 1) * a1;
      amps_[i | tbit] = m(1, 0) * a0 + m(1, 1) * a1;
    }
  }

  // Direct application of a single-qubit Pauli (used for noise injection).
  void apply_pauli(int qubit, char letter) {
    if (qubit < 0 || qubit >= n_) {
      throw std::out_of_range("apply_pauli: qubit index out of range");
    }
    const std::uint64_t bit = 1ull << qubit;
    switch (letter) {
      case 'I':
        return;
      case 'X':
        for (std::uint64_t i = 0; i < dim(); ++i) {
          if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
        }
        return;
      case 'Y':
        for (std::uint64_t i = 0; i < dim(); ++i) {
          if (!(i & bit)) {
            const complexd a0 = amps_[i];
            amps_[i] = complexd{0, -1} * amps_[i | bit];
            amps_[i | bit] = complexd{0, 1} * a0;
          }
        }
        return;
      case 'Z':
        for (std::uint64_t i = 0; i < dim(); ++i) {
          if (i & bit) amps_[i] = -amps_[i];
        }
        return;
      default:
        throw std::invalid_argument("apply_pauli: unknown letter");
    }
  }

  void apply_phase(double radians) {
    const complexd ph = std::polar(1.0, radians);
    for (auto& a : amps_) a *= ph;
  }

  Eigen::VectorXcd to_eigen() const {
    Eigen::VectorXcd v(static_cast<long>(dim()));
    for (std::uint64_t i = 0; i < dim(); ++i) v[static_cast<long>(i)] = amps_[i];
    return v;
  }

  static Statevector from_eigen(const Eigen::VectorXcd& v) {
    int n = 0;
    while ((1l << n) < v.size()) ++n;
    if ((1l << n) != v.size()) {
      throw std::invalid_argument("from_eigen: dimension not a power of two");
    }
    Statevector sv(n);
    for (long i = 0; i < v.size(); ++i) sv.amps_[i] = v[i];
    return sv;
  }

  // State dump as JSON (index, real, imaginary) for debugging.
  std::string to_json() const {
    std::ostringstream out;
    out << "[";
    for (std::uint64_t i = 0; i < dim(); ++i) {
      if (i) out << ", ";
      out << "{\"index\": " << i
          << ", \"re\": " << Circuit::format_angle(amps_[i].real())
          << ", \"im\": " << Circuit::format_angle(amps_[i].imag()) << "}";
    }
    out << "]";
    return out.str();
  }

 private:
  int n_;
  std::vector<complexd> amps_;
};

// Left-to-right gate application, including the recorded global phase.
inline Statevector run(const Circuit& c, Statevector initial) {
  if (c.n_qubits() != initial.n_qubits()) {
    throw std::invalid_argument("run: dimension mismatch");
  }
  for (const auto& g : c.gates()) initial.apply_gate(g);
  initial.apply_phase(c.global_phase());
  return initial;
}

inline Statevector run(const Circuit& c) {
  return run(c, Statevector(c.n_qubits()));
}

// Dense unitary of a circuit, global phase included. Column j is the image
// of basis state j.
inline MatrixXcd circuit_unitary(const Circuit& c) {
  PauliString::check_dense_size(c.n_qubits());
  const long dim = 1l << c.n_qubits();
  MatrixXcd u(dim, dim);
  for (long j = 0; j < dim; ++j) {
    const auto col = run(c, Statevector::basis_state(c.n_qubits(), j));
    u.col(j) = col.to_eigen();
  }
  return u;
}

// exp(i eps H) by Hermitian eigendecomposition of the dense sum.
inline MatrixXcd exact_evolution_oracle(const PauliSum& h, double eps) {
  const MatrixXcd hd = h.to_dense();
  if ((hd - hd.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("exact_evolution_oracle: non-Hermitian input");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hd);
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::VectorXcd phases(w.size());
  for (long k = 0; k < w.size(); ++k) phases[k] = std::polar(1.0, eps * w[k]);
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Largest absolute entry of u - e^{i phi} v over the optimal phi, i.e.
// distance up to global phase.
inline double unitary_distance_up_to_phase(const MatrixXcd& u,
                                           const MatrixXcd& v) {
  const complexd tr = (v.adjoint() * u).trace();
  const complexd ph = std::abs(tr) < 1e-14 ? complexd{1, 0} : tr / std::abs(tr);
  return (u - ph * v).cwiseAbs().maxCoeff();
}

inline double fidelity(const Statevector& reference, const Statevector& state) {
  if (reference.dim() != state.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  complexd overlap = 0;
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    overlap += std::conj(reference.amplitude(i)) * state.amplitude(i);
  }
  return std::norm(overlap);
}

// Squared amplitude on the encoded two-mode ground-state codeword.
inline double p0_fidelity_proxy(const Statevector& state,
                                const BosonQubitMap& map) {
  const FockBasisState ground(std::vector<int>(map.n_modes(), 0),
                              map.cutoff());
  return std::norm(state.amplitude(map.encode_fock_index(ground)));
}

struct QutritReduction {
  TwoQutritState state;
  double leakage;  // probability weight outside the codespace
};

// Projects a 6-qubit state onto the 9 two-mode codewords, reports the
// discarded weight, and renormalizes.
inline QutritReduction reduce_to_qutrits(const Statevector& state,
                                         const BosonQubitMap& map) {
  if (map.n_modes() != 2 || map.cutoff() != 2 ||
      state.n_qubits() != map.total_qubits()) {
    throw std::invalid_argument("reduce_to_qutrits: expects the 6-qubit map");
  }
  QutritReduction out{};
  double kept = 0;
  for (int na = 0; na < 3; ++na) {
    for (int nb = 0; nb < 3; ++nb) {
      const FockBasisState f({na, nb}, 2);
      const complexd a = state.amplitude(map.encode_fock_index(f));
      out.state(na, nb) = a;
      kept += std::norm(a);
    }
  }
  if (kept < 1e-12) {
    throw std::runtime_error("reduce_to_qutrits: degenerate projection");
  }
  out.leakage = std::max(0.0, state.norm2() - kept);
  out.state.normalize();
  return out;
}

}  // namespace gqsim

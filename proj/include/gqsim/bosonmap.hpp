#pragma once

// Unary encoding of truncated bosonic Fock spaces into qubit registers and
// the mapping of mode operators to Pauli sums.
//
// Bitstring convention: qubit 0 is the leftmost character of a rendered
// bitstring. Within a mode block of N_p+1 qubits, Fock state |n> maps to
// the pattern with a 0 at block position n and 1 everywhere else, so for
// N_p = 2: |0> -> 011, |1> -> 101, |2> -> 110.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gqsim/pauli.hpp"

namespace gqsim {

struct FockBasisState {
  std::vector<int> occupations;  // one per mode
  int cutoff;                    // N_p, max excitations per mode

  FockBasisState(std::vector<int> occ, int n_p)
      : occupations(std::move(occ)), cutoff(n_p) {
    for (int n : occupations) {
      if (n < 0 || n > cutoff) {
        throw std::domain_error("FockBasisState: occupation exceeds cutoff");
      }
    }
  }

  bool operator==(const FockBasisState& o) const {
    return occupations == o.occupations && cutoff == o.cutoff;
  }
};

class BosonQubitMap {
 public:
  BosonQubitMap(int n_modes, int cutoff) : n_modes_(n_modes), cutoff_(cutoff) {
    if (n_modes <= 0 || cutoff <= 0) {
      throw std::invalid_argument("BosonQubitMap: bad shape");
    }
  }

  int n_modes() const { return n_modes_; }
  int cutoff() const { return cutoff_; }
  int qubits_per_mode() const { return cutoff_ + 1; }
  int total_qubits() const { return n_modes_ * (cutoff_ + 1); }
  int block_start(int mode) const { return mode * qubits_per_mode(); }

  // Encoded bitstring with qubit 0 as the leftmost character.
  std::string encode_fock(const FockBasisState& s) const {
    if (static_cast<int>(s.occupations.size()) != n_modes_ ||
        s.cutoff != cutoff_) {
      throw std::domain_error("encode_fock: state inconsistent with map");
    }
    std::string bits(total_qubits(), '1');
    for (int m = 0; m < n_modes_; ++m) {
      bits[block_start(m) + s.occupations[m]] = '0';
    }
    return bits;
  }

  // Exact inverse of encode_fock on codewords; nullopt for anything else.
  std::optional<FockBasisState> decode_bitstring(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != total_qubits()) {
      throw std::invalid_argument("decode_bitstring: wrong length");
    }
    std::vector<int> occ(n_modes_);
    for (int m = 0; m < n_modes_; ++m) {
      int zero_pos = -1;
      for (int k = 0; k < qubits_per_mode(); ++k) {
        const char c = bits[block_start(m) + k];
        if (c == '0') {
          if (zero_pos >= 0) return std::nullopt;  // two zeros in a block
          zero_pos = k;
        } else if (c != '1') {
          throw std::invalid_argument("decode_bitstring: not a bitstring");
        }
      }
      if (zero_pos < 0) return std::nullopt;
      occ[m] = zero_pos;
    }
    return FockBasisState(occ, cutoff_);
  }

  // Basis index of an encoded Fock state under the simulator convention
  // (qubit k = bit k of the index).
  std::uint64_t encode_fock_index(const FockBasisState& s) const {
    return bitstring_to_index(encode_fock(s));
  }

  static std::uint64_t bitstring_to_index(const std::string& bits) {
    std::uint64_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q) {
      if (bits[q] == '1') idx |= 1ull << q;
    }
    return idx;
  }

  static std::string index_to_bitstring(std::uint64_t idx, int n_qubits) {
    std::string bits(n_qubits, '0');
    for (int q = 0; q < n_qubits; ++q) {
      if ((idx >> q) & 1) bits[q] = '1';
    }
    return bits;
  }

  // Creation operator of one mode as a Pauli sum:
  //   a^dag -> sum_{n<N_p} sqrt(n+1) sigma-^{q(n)} sigma+^{q(n+1)}
  // with block-local qubit indices, expanded into X/Y strings.
  PauliSum map_creation(int mode) const {
    if (mode < 0 || mode >= n_modes_) {
      throw std::invalid_argument("map_creation: invalid mode index");
    }
    const int nq = total_qubits();
    PauliSum out(nq);
    for (int n = 0; n < cutoff_; ++n) {
      const int lo = block_start(mode) + n;
      const PauliSum term =
          sigma_minus(nq, lo) * sigma_plus(nq, lo + 1) * std::sqrt(n + 1.0);
      for (const auto& [c, p] : term.terms()) out.add_term(c, p);
    }
    out.canonicalize();
    return out;
  }

  PauliSum map_annihilation(int mode) const {
    return map_creation(mode).adjoint();
  }

  // Image of a^dag^2 b^dag^2 + a^2 b^2 for the two-mode, N_p = 2 map:
  // the 8-term sum (1/4)(XXXX + XXYY - XYXY + XYYX + YXXY - YXYX + YYXX
  // + YYYY) on qubits (0, 2, 3, 5).
  PauliSum map_squared_pair_hamiltonian() const {
    if (n_modes_ != 2 || cutoff_ != 2) {
      throw std::invalid_argument(
          "map_squared_pair_hamiltonian: requires two modes at cutoff 2");
    }
    const int nq = total_qubits();
    // a^2 and b^2 collapse to single sigma-pair terms at cutoff 2.
    const PauliSum t = sigma_minus(nq, 0) * sigma_plus(nq, 2) *
                       sigma_minus(nq, 3) * sigma_plus(nq, 5) * 2.0;
    return t + t.adjoint();
  }

  // sigma+ = (X + iY)/2 maps |1> to |0>; sigma- is its adjoint.
  static PauliSum sigma_plus(int n_qubits, int qubit) {
    PauliSum s(n_qubits);
    s.add_term(0.5, PauliString::single_letter(n_qubits, 'X', qubit));
    s.add_term(complexd{0, 0.5},
               PauliString::single_letter(n_qubits, 'Y', qubit));
    s.canonicalize();
    return s;
  }

  static PauliSum sigma_minus(int n_qubits, int qubit) {
    return sigma_plus(n_qubits, qubit).adjoint();
  }

  // All valid Fock states in lexicographic occupation order.
  std::vector<FockBasisState> all_fock_states() const {
    std::vector<FockBasisState> out;
    std::vector<int> occ(n_modes_, 0);
    while (true) {
      out.emplace_back(occ, cutoff_);
      int m = n_modes_ - 1;
      while (m >= 0 && occ[m] == cutoff_) occ[m--] = 0;
      if (m < 0) break;
      ++occ[m];
    }
    return out;
  }

 private:
  int n_modes_, cutoff_;
};

}  // namespace gqsim

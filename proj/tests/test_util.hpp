#pragma once

// Shared helpers for the test suites: random Pauli strings and an
// independent dense matrix-exponential route (Eigen MatrixFunctions).

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gqsim/measurement.hpp"
#include "gqsim/pauli.hpp"

namespace testutil {

inline gqsim::PauliString random_string(int n_qubits, gqsim::Rng& rng,
                                        bool allow_identity = true) {
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  while (true) {
    std::vector<std::pair<int, char>> letters;
    for (int q = 0; q < n_qubits; ++q) {
      letters.emplace_back(q, kLetters[rng.next_below(4)]);
    }
    auto p = gqsim::PauliString::from_letters(n_qubits, letters);
    if (allow_identity || !p.is_identity()) return p;
  }
}

// Independent of exact_evolution_oracle (Pade-based matrix exponential).
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) { return m.exp(); }

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace testutil

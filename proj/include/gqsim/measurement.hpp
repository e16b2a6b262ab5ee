#pragma once

// Shot sampling, readout-noise injection, confusion-matrix mitigation,
// Monte-Carlo Pauli-insertion gate noise, post-selection, and estimator
// extraction.
//
// Error-bar convention: binomial standard errors on raw counts, propagated
// linearly through the mitigation inverse and the post-selection ratio.

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gqsim/bosonmap.hpp"
#include "gqsim/circuit.hpp"
#include "gqsim/simulator.hpp"

namespace gqsim {

// Counter-based generator (splitmix64). Per-shot streams are derived from
// the master seed so aggregation is order-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng derive(std::uint64_t master_seed, std::uint64_t stream) {
    Rng r(master_seed);
    // Mix the stream index through one splitmix step of its own.
    Rng s(stream ^ 0xA5A5A5A55A5A5A5Aull);
    return Rng(r.next_u64() ^ s.next_u64());
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}.
  int next_below(int n) { return static_cast<int>(next_u64() % n); }

 private:
  std::uint64_t state_;
};

struct ReadoutNoiseModel {
  // Per-qubit (p01: P(read 1 | true 0), p10: P(read 0 | true 1)).
  std::vector<std::pair<double, double>> rates;

  static ReadoutNoiseModel uniform(int n_qubits, double p01, double p10) {
    check_rate(p01);
    check_rate(p10);
    return {std::vector<std::pair<double, double>>(n_qubits, {p01, p10})};
  }

  static ReadoutNoiseModel noiseless(int n_qubits) {
    return uniform(n_qubits, 0.0, 0.0);
  }

  static void check_rate(double p) {
    if (!(p >= 0.0 && p < 0.5)) {
      throw std::domain_error(
          "ReadoutNoiseModel: rates must lie in [0, 0.5) for invertibility");
    }
  }

  int n_qubits() const { return static_cast<int>(rates.size()); }

  bool is_noiseless() const {
    for (auto [a, b] : rates) {
      if (a != 0.0 || b != 0.0) return false;
    }
    return true;
  }
};

struct GateNoiseModel {
  double p_single = 0.0;  // depolarizing probability per single-qubit gate
  double p_cnot = 0.0;    // per two-qubit gate

  GateNoiseModel() = default;
  GateNoiseModel(double p1, double p2) : p_single(p1), p_cnot(p2) {
    if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1) {
      throw std::domain_error("GateNoiseModel: probabilities outside [0,1]");
    }
  }

  bool is_noiseless() const { return p_single == 0.0 && p_cnot == 0.0; }
};

struct CountsTable {
  std::map<std::string, long long> counts;  // bitstring (qubit 0 leftmost)
  long long total_shots = 0;

  void record(const std::string& bits) {
    ++counts[bits];
    ++total_shots;
  }

  std::string to_json() const {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& [bits, n] : counts) {
      if (!first) out << ", ";
      first = false;
      out << "\"" << bits << "\": " << n;
    }
    out << "}";
    return out.str();
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "bitstring,count\n";
    for (const auto& [bits, n] : counts) out << bits << "," << n << "\n";
    return out.str();
  }
};

namespace detail {

inline std::string sample_bitstring(const Statevector& state, Rng& rng) {
  const double u = rng.next_double();
  double acc = 0;
  std::uint64_t idx = state.dim() - 1;
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    acc += std::norm(state.amplitude(i));
    if (u < acc) {
      idx = i;
      break;
    }
  }
  return BosonQubitMap::index_to_bitstring(idx, state.n_qubits());
}

inline void flip_readout(std::string& bits, const ReadoutNoiseModel& noise,
                         Rng& rng) {
  for (int q = 0; q < static_cast<int>(bits.size()); ++q) {
    const auto [p01, p10] = noise.rates.at(q);
    const double p = bits[q] == '0' ? p01 : p10;
    if (p > 0 && rng.next_double() < p) bits[q] = bits[q] == '0' ? '1' : '0';
  }
}

}  // namespace detail

// Draws ideal outcomes from |amplitude|^2, then flips each readout bit
// independently per the confusion model. Deterministic for a fixed seed.
inline CountsTable sample(const Statevector& state, long long shots,
                          const ReadoutNoiseModel& noise, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
  if (noise.n_qubits() != state.n_qubits()) {
    throw std::invalid_argument("sample: noise model qubit count mismatch");
  }
  CountsTable table;
  for (long long s = 0; s < shots; ++s) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(s));
    std::string bits = detail::sample_bitstring(state, rng);
    detail::flip_readout(bits, noise, rng);
    table.record(bits);
  }
  return table;
}

// One Monte-Carlo trajectory: after each gate, with the model's
// probability, a uniformly random non-identity Pauli is inserted on the
// gate's support.
inline Statevector run_noisy_trajectory(const Circuit& c, Statevector initial,
                                        const GateNoiseModel& noise,
                                        Rng& rng) {
  static constexpr char kPaulis[] = {'X', 'Y', 'Z'};
  for (const auto& g : c.gates()) {
    initial.apply_gate(g);
    const double p = g.is_cnot() ? noise.p_cnot : noise.p_single;
    if (p <= 0 || rng.next_double() >= p) continue;
    if (g.is_cnot()) {
      const int which = rng.next_below(15) + 1;  // skip II
      const int lc = which / 4, lt = which % 4;
      if (lc) initial.apply_pauli(g.control, kPaulis[lc - 1]);
      if (lt) initial.apply_pauli(g.target, kPaulis[lt - 1]);
    } else {
      initial.apply_pauli(g.target, kPaulis[rng.next_below(3)]);
    }
  }
  initial.apply_phase(c.global_phase());
  return initial;
}

// Full noisy pipeline front end: every shot is its own gate-noise
// trajectory followed by one measurement with readout noise.
inline CountsTable sample_noisy(const Circuit& c, const Statevector& initial,
                                long long shots, const GateNoiseModel& gate_noise,
                                const ReadoutNoiseModel& readout_noise,
                                std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_noisy: shots must be >= 1");
  CountsTable table;
  for (long long s = 0; s < shots; ++s) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(s));
    const Statevector out = run_noisy_trajectory(c, initial, gate_noise, rng);
    std::string bits = detail::sample_bitstring(out, rng);
    detail::flip_readout(bits, readout_noise, rng);
    table.record(bits);
  }
  return table;
}

// Quasi-probability vector over all bitstrings (indexed by basis index),
// with per-entry standard errors propagated from the raw counts.
struct QuasiProbs {
  int n_qubits = 0;
  std::vector<double> p;      // may contain slightly negative entries
  std::vector<double> sigma;  // propagated standard errors
  double negativity_mass = 0; // total weight of negative entries
  double condition_number = 1;

  double at_bitstring(const std::string& bits) const {
    return p.at(BosonQubitMap::bitstring_to_index(bits));
  }
  double sigma_at_bitstring(const std::string& bits) const {
    return sigma.at(BosonQubitMap::bitstring_to_index(bits));
  }
};

// Applies the inverse of the tensor-product 2x2 calibration matrices to
// the empirical distribution. Entries may come out slightly negative and
// are reported as-is; clip_negative switches on clip-and-renormalize.
inline QuasiProbs mitigate_readout(const CountsTable& counts,
                                   const ReadoutNoiseModel& noise,
                                   bool clip_negative = false) {
  const int n = noise.n_qubits();
  const std::uint64_t dim = 1ull << n;
  if (counts.total_shots <= 0) {
    throw std::invalid_argument("mitigate_readout: empty counts");
  }
  QuasiProbs out;
  out.n_qubits = n;
  out.p.assign(dim, 0.0);
  std::vector<double> var(dim, 0.0);
  const double shots = static_cast<double>(counts.total_shots);
  for (const auto& [bits, c] : counts.counts) {
    const double f = c / shots;
    out.p[BosonQubitMap::bitstring_to_index(bits)] = f;
    var[BosonQubitMap::bitstring_to_index(bits)] = f * (1.0 - f) / shots;
  }

  // Per-qubit inverse confusion matrix; columns indexed by true bit.
  // A = [[1-p01, p10], [p01, 1-p10]].
  for (int q = 0; q < n; ++q) {
    const auto [p01, p10] = noise.rates.at(q);
    const double det = 1.0 - p01 - p10;
    if (std::abs(det) < 1e-12) {
      throw std::domain_error("mitigate_readout: singular calibration matrix");
    }
    const double inv[2][2] = {{(1.0 - p10) / det, -p10 / det},
                              {-p01 / det, (1.0 - p01) / det}};
    // Condition number (2-norm) of the 2x2 calibration matrix.
    {
      const double a = 1.0 - p01, b = p10, c = p01, d = 1.0 - p10;
      const double t = a * a + b * b + c * c + d * d;
      const double s = std::sqrt(std::max(0.0, t * t - 4 * det * det));
      const double smax = std::sqrt((t + s) / 2), smin = std::sqrt((t - s) / 2);
      out.condition_number *= smax / std::max(smin, 1e-300);
    }
    const std::uint64_t bit = 1ull << q;
    for (std::uint64_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const double v0 = out.p[i], v1 = out.p[i | bit];
      out.p[i] = inv[0][0] * v0 + inv[0][1] * v1;
      out.p[i | bit] = inv[1][0] * v0 + inv[1][1] * v1;
      const double w0 = var[i], w1 = var[i | bit];
      var[i] = inv[0][0] * inv[0][0] * w0 + inv[0][1] * inv[0][1] * w1;
      var[i | bit] = inv[1][0] * inv[1][0] * w0 + inv[1][1] * inv[1][1] * w1;
    }
  }

  out.sigma.resize(dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    out.sigma[i] = std::sqrt(std::max(0.0, var[i]));
    if (out.p[i] < 0) out.negativity_mass += -out.p[i];
  }
  if (clip_negative) {
    double total = 0;
    for (auto& v : out.p) total += (v = std::max(0.0, v));
    if (total <= 0) {
      throw std::domain_error("mitigate_readout: clipped distribution empty");
    }
    for (std::uint64_t i = 0; i < dim; ++i) {
      out.p[i] /= total;
      out.sigma[i] /= total;
    }
  }
  return out;
}

inline std::string mitigation_report(const QuasiProbs& q) {
  std::ostringstream out;
  out << "{\"condition_number\": " << Circuit::format_angle(q.condition_number)
      << ", \"negativity_mass\": " << Circuit::format_angle(q.negativity_mass)
      << "}";
  return out.str();
}

// Post-selection onto the two codewords of interest: the encoded ground
// state and the encoded |2>|2> state.
struct PostselectResult {
  double weight_ground = 0;   // renormalized
  double weight_excited = 0;  // renormalized
  double sigma_ground = 0;    // pre-normalization standard errors
  double sigma_excited = 0;
  double discard_fraction = 0;
  double retained_raw = 0;  // raw (unnormalized) retained weight
};

namespace detail {

inline PostselectResult postselect_weights(double w0, double w22, double s0,
                                           double s22, double total) {
  const double kept = w0 + w22;
  if (!(total > 0) || kept <= 0) {
    throw std::runtime_error("postselect: all weight discarded");
  }
  PostselectResult out;
  out.retained_raw = kept;
  out.discard_fraction = std::max(0.0, 1.0 - kept / total);
  out.weight_ground = w0 / kept;
  out.weight_excited = w22 / kept;
  out.sigma_ground = s0;
  out.sigma_excited = s22;
  return out;
}

}  // namespace detail

inline PostselectResult postselect(const CountsTable& counts,
                                   const BosonQubitMap& map) {
  const std::string ground = map.encode_fock(FockBasisState({0, 0}, 2));
  const std::string excited = map.encode_fock(FockBasisState({2, 2}, 2));
  const double total = static_cast<double>(counts.total_shots);
  auto get = [&](const std::string& b) -> double {
    auto it = counts.counts.find(b);
    return it == counts.counts.end() ? 0.0 : static_cast<double>(it->second);
  };
  const double n0 = get(ground), n22 = get(excited);
  auto binom_sigma = [&](double k) {
    const double f = k / total;
    return std::sqrt(std::max(0.0, f * (1.0 - f) / total));
  };
  return detail::postselect_weights(n0 / total, n22 / total, binom_sigma(n0),
                                    binom_sigma(n22), 1.0);
}

inline PostselectResult postselect(const QuasiProbs& q,
                                   const BosonQubitMap& map) {
  const std::string ground = map.encode_fock(FockBasisState({0, 0}, 2));
  const std::string excited = map.encode_fock(FockBasisState({2, 2}, 2));
  double total = 0;
  for (double v : q.p) total += v;
  return detail::postselect_weights(q.at_bitstring(ground),
                                    q.at_bitstring(excited),
                                    q.sigma_at_bitstring(ground),
                                    q.sigma_at_bitstring(excited), total);
}

struct Estimate {
  double value = 0;
  double sigma = 0;
};

// Retained-weight ratio for the encoded ground state, with the standard
// error propagated through the post-selection ratio.
inline Estimate estimate_p0(const PostselectResult& r) {
  Estimate e;
  e.value = r.weight_ground;
  const double w0 = r.weight_ground * r.retained_raw;
  const double w22 = r.weight_excited * r.retained_raw;
  const double kept2 = r.retained_raw * r.retained_raw;
  if (kept2 > 0) {
    const double d0 = w22 / kept2;   // dP0/dw0
    const double d22 = -w0 / kept2;  // dP0/dw22
    e.sigma = std::sqrt(d0 * d0 * r.sigma_ground * r.sigma_ground +
                        d22 * d22 * r.sigma_excited * r.sigma_excited);
  }
  return e;
}

}  // namespace gqsim

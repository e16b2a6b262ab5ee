#pragma once

// Physical constants, the gravitational coupling between the two
// oscillators, theoretical target states, and the entanglement measure.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace gqsim {

// CODATA 2018, pinned so outputs are bit-reproducible.
namespace constants {
inline constexpr double kNewtonG = 6.67430e-11;        // m^3 kg^-1 s^-2
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
}  // namespace constants

struct PhysicalParams {
  double omega_m;  // oscillator angular frequency, Hz
  double d;        // separation, m
  double t;        // evolution time, s

  PhysicalParams(double omega, double separation, double time)
      : omega_m(omega), d(separation), t(time) {
    if (!(omega_m > 0) || !(d > 0) || !(t >= 0)) {
      throw std::domain_error("PhysicalParams: require omega_m>0, d>0, t>=0");
    }
  }
};

// g = 9 G hbar omega_m^2 / (16 c^4 d).
inline double coupling_g(const PhysicalParams& p) {
  const double c2 = constants::kSpeedOfLight * constants::kSpeedOfLight;
  return 9.0 * constants::kNewtonG * constants::kHbar * p.omega_m * p.omega_m /
         (16.0 * c2 * c2 * p.d);
}

inline double epsilon(double g, double t) {
  if (t < 0) throw std::domain_error("epsilon: negative time");
  return g * t;
}

// Two truncated modes, amplitudes indexed by (n_A, n_B) in {0,1,2}^2.
struct TwoQutritState {
  std::array<std::complex<double>, 9> amp{};

  std::complex<double>& operator()(int n_a, int n_b) {
    return amp[3 * n_a + n_b];
  }
  const std::complex<double>& operator()(int n_a, int n_b) const {
    return amp[3 * n_a + n_b];
  }

  double norm2() const {
    double s = 0;
    for (const auto& a : amp) s += std::norm(a);
    return s;
  }

  void normalize() {
    const double n = std::sqrt(norm2());
    if (n == 0) throw std::domain_error("TwoQutritState: zero norm");
    for (auto& a : amp) a /= n;
  }
};

// (|00> + g/(2 omega_m) |22>) / sqrt(1 + (g/(2 omega_m))^2).
inline TwoQutritState theory_state(double g, double omega_m) {
  if (!(omega_m > 0)) throw std::domain_error("theory_state: omega_m <= 0");
  TwoQutritState s;
  const double r = g / (2.0 * omega_m);
  s(0, 0) = 1.0;
  s(2, 2) = r;
  s.normalize();
  return s;
}

// Second-order perturbative target (1 - eps^2)|00> + i sqrt(2) eps |22>,
// renormalized to unit norm. The |22> phase follows the sign convention of
// the compiled evolution exp(+i eps M), which populates |22> with phase +i;
// the raw amplitudes have norm 1 + O(eps^2) and are exposed unnormalized.
inline std::pair<std::complex<double>, std::complex<double>>
raw_perturbative_amplitudes(double eps) {
  return {std::complex<double>{1.0 - eps * eps, 0.0},
          std::complex<double>{0.0, std::sqrt(2.0) * eps}};
}

inline TwoQutritState perturbative_target(double eps) {
  TwoQutritState s;
  auto [a00, a22] = raw_perturbative_amplitudes(eps);
  s(0, 0) = a00;
  s(2, 2) = a22;
  s.normalize();
  return s;
}

// I-concurrence sqrt(2 (1 - Tr rho_A^2)) with rho_A the reduced
// single-mode density matrix.
inline double concurrence(const TwoQutritState& s) {
  std::array<std::array<std::complex<double>, 3>, 3> rho_a{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      std::complex<double> v = 0;
      for (int k = 0; k < 3; ++k) v += s(i, k) * std::conj(s(j, k));
      rho_a[i][j] = v;
    }
  }
  double purity = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      purity += std::real(rho_a[i][j] * std::conj(rho_a[i][j]));
    }
  }
  const double val = 2.0 * (1.0 - purity);
  return std::sqrt(std::max(0.0, val));
}

}  // namespace gqsim

#pragma once

// Exact algebra of n-qubit Pauli strings and weighted Pauli sums in a
// binary symplectic representation (one x-bit and one z-bit per qubit,
// phase kept as an exponent of i mod 4).

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace gqsim {

using complexd = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

inline complexd i_power(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// A PauliString represents i^phase_exp * prod_k X_k^{x_k} Z_k^{z_k}.
// A qubit with both bits set carries X*Z = -i*Y, so the phase shown next
// to Pauli letters differs from phase_exp by the number of Y factors.
class PauliString {
 public:
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask,
              int phase_exp = 0)
      : n_(n_qubits), x_(x_mask), z_(z_mask),
        e_(((phase_exp % 4) + 4) % 4) {
    if (n_qubits <= 0 || n_qubits > 64) {
      throw std::invalid_argument("PauliString: qubit count out of range");
    }
    const std::uint64_t valid =
        n_qubits == 64 ? ~0ull : ((1ull << n_qubits) - 1);
    if ((x_ & ~valid) || (z_ & ~valid)) {
      throw std::invalid_argument("PauliString: mask exceeds qubit count");
    }
  }

  static PauliString identity(int n_qubits) {
    return PauliString(n_qubits, 0, 0, 0);
  }

  // Builds from Pauli letters, e.g. single_letter(6, 'Y', 3) = Y on qubit 3.
  static PauliString single_letter(int n_qubits, char letter, int qubit) {
    std::vector<std::pair<int, char>> f{{qubit, letter}};
    return from_letters(n_qubits, f);
  }

  // letters: (qubit, one of I/X/Y/Z). The string carries letter phase +1.
  static PauliString from_letters(
      int n_qubits, const std::vector<std::pair<int, char>>& letters) {
    std::uint64_t x = 0, z = 0;
    int n_y = 0;
    for (auto [q, c] : letters) {
      if (q < 0 || q >= n_qubits) {
        throw std::invalid_argument("PauliString: qubit index out of range");
      }
      switch (c) {
        case 'I': break;
        case 'X': x |= 1ull << q; break;
        case 'Z': z |= 1ull << q; break;
        case 'Y': x |= 1ull << q; z |= 1ull << q; ++n_y; break;
        default:
          throw std::invalid_argument("PauliString: unknown Pauli letter");
      }
    }
    // letters = i^{#Y} * XZ-form, so phase_exp = #Y gives letter phase +1.
    return PauliString(n_qubits, x, z, n_y);
  }

  int n_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  int phase_exp() const { return e_; }

  int weight() const { return std::popcount(x_ | z_); }
  int y_count() const { return std::popcount(x_ & z_); }

  // Phase multiplying the tensor product of Pauli letters (element of
  // {+1, -1, +i, -i}).
  complexd letter_phase() const { return i_power(e_ - y_count()); }

  char letter_at(int qubit) const {
    const bool x = (x_ >> qubit) & 1, z = (z_ >> qubit) & 1;
    if (x && z) return 'Y';
    if (x) return 'X';
    if (z) return 'Z';
    return 'I';
  }

  bool is_identity() const { return x_ == 0 && z_ == 0; }

  // Hermitian iff the letter phase is real.
  bool is_hermitian() const { return (((e_ - y_count()) % 4) + 4) % 4 % 2 == 0; }

  PauliString multiply(const PauliString& other) const {
    if (n_ != other.n_) {
      throw std::invalid_argument("PauliString::multiply: qubit counts differ");
    }
    // Moving other's X factors past this string's Z factors picks up one
    // sign per crossing.
    const int crossings = std::popcount(z_ & other.x_);
    return PauliString(n_, x_ ^ other.x_, z_ ^ other.z_,
                       e_ + other.e_ + 2 * crossings);
  }

  bool commutes(const PauliString& other) const {
    if (n_ != other.n_) {
      throw std::invalid_argument("PauliString::commutes: qubit counts differ");
    }
    const int anti =
        std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_);
    return anti % 2 == 0;
  }

  PauliString adjoint() const {
    const int crossings = std::popcount(x_ & z_);
    // (X^x Z^z)^dag = Z^z X^x = (-1)^{x&z} X^x Z^z
    return PauliString(n_, x_, z_, -e_ + 2 * crossings);
  }

  bool same_letters(const PauliString& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }

  bool operator==(const PauliString& other) const {
    return same_letters(other) && e_ == other.e_;
  }

  MatrixXcd to_dense() const {
    check_dense_size(n_);
    MatrixXcd m = MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n_; ++k) {
      // Qubit k occupies bit k of the basis index (qubit 0 = LSB).
      m = Eigen::kroneckerProduct(single_qubit_xz(k), m).eval();
    }
    return i_power(e_) * m;
  }

  // Renders as e.g. "+X0 X2 X3 X5"; identity factors omitted, qubit
  // indices ascending.
  std::string to_string() const {
    std::ostringstream out;
    const complexd ph = letter_phase();
    if (ph == complexd{1, 0}) out << "+";
    else if (ph == complexd{-1, 0}) out << "-";
    else if (ph == complexd{0, 1}) out << "+i";
    else out << "-i";
    if (is_identity()) {
      out << "I";
      return out.str();
    }
    bool first = true;
    for (int q = 0; q < n_; ++q) {
      const char c = letter_at(q);
      if (c == 'I') continue;
      if (!first) out << " ";
      out << c << q;
      first = false;
    }
    return out.str();
  }

  static void check_dense_size(int n_qubits) {
    if (n_qubits > 12) {
      throw std::length_error("dense expansion limited to 12 qubits");
    }
  }

 private:
  MatrixXcd single_qubit_xz(int k) const {
    const bool x = (x_ >> k) & 1, z = (z_ >> k) & 1;
    MatrixXcd m(2, 2);
    if (x && z) {
      m << 0, -1, 1, 0;  // X*Z
    } else if (x) {
      m << 0, 1, 1, 0;
    } else if (z) {
      m << 1, 0, 0, -1;
    } else {
      m << 1, 0, 0, 1;
    }
    return m;
  }

  int n_;
  std::uint64_t x_, z_;
  int e_;
};

// Weighted list of Pauli strings. Terms are kept canonical: letter phase
// folded into the coefficient, sorted lexicographically on (x, z), merged,
// and pruned below 1e-15.
class PauliSum {
 public:
  static constexpr double kPruneThreshold = 1e-15;

  explicit PauliSum(int n_qubits) : n_(n_qubits) {
    if (n_qubits <= 0) throw std::invalid_argument("PauliSum: bad qubit count");
  }

  static PauliSum from_terms(
      int n_qubits,
      const std::vector<std::pair<complexd, PauliString>>& terms) {
    PauliSum s(n_qubits);
    for (const auto& [c, p] : terms) s.add_term(c, p);
    s.canonicalize();
    return s;
  }

  int n_qubits() const { return n_; }
  const std::vector<std::pair<complexd, PauliString>>& terms() const {
    return terms_;
  }
  std::size_t size() const { return terms_.size(); }

  void add_term(complexd coeff, const PauliString& p) {
    if (p.n_qubits() != n_) {
      throw std::invalid_argument("PauliSum: qubit counts differ");
    }
    // Fold the string's phase into the coefficient; store phase-free
    // letter form (phase_exp = #Y).
    const complexd folded = coeff * p.letter_phase();
    terms_.emplace_back(folded, PauliString(n_, p.x_mask(), p.z_mask(),
                                            p.y_count()));
    dirty_ = true;
  }

  void canonicalize() {
    if (!dirty_) return;
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) {
                if (a.second.x_mask() != b.second.x_mask())
                  return a.second.x_mask() < b.second.x_mask();
                return a.second.z_mask() < b.second.z_mask();
              });
    std::vector<std::pair<complexd, PauliString>> merged;
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().second.same_letters(t.second)) {
        merged.back().first += t.first;
      } else {
        merged.push_back(t);
      }
    }
    terms_.clear();
    for (const auto& t : merged) {
      if (std::abs(t.first) >= kPruneThreshold) terms_.push_back(t);
    }
    dirty_ = false;
  }

  PauliSum operator+(const PauliSum& other) const {
    PauliSum out(n_);
    for (const auto& [c, p] : terms_) out.add_term(c, p);
    for (const auto& [c, p] : other.terms_) out.add_term(c, p);
    out.canonicalize();
    return out;
  }

  PauliSum operator*(complexd scale) const {
    PauliSum out(n_);
    for (const auto& [c, p] : terms_) out.add_term(c * scale, p);
    out.canonicalize();
    return out;
  }

  PauliSum operator*(const PauliSum& other) const {
    PauliSum out(n_);
    for (const auto& [ca, pa] : terms_) {
      for (const auto& [cb, pb] : other.terms_) {
        out.add_term(ca * cb, pa.multiply(pb));
      }
    }
    out.canonicalize();
    return out;
  }

  PauliSum adjoint() const {
    PauliSum out(n_);
    for (const auto& [c, p] : terms_) out.add_term(std::conj(c), p.adjoint());
    out.canonicalize();
    return out;
  }

  bool all_terms_commute() const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      for (std::size_t j = i + 1; j < terms_.size(); ++j) {
        if (!terms_[i].second.commutes(terms_[j].second)) return false;
      }
    }
    return true;
  }

  MatrixXcd to_dense() const {
    PauliString::check_dense_size(n_);
    const long dim = 1l << n_;
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    for (const auto& [c, p] : terms_) m += c * p.to_dense();
    return m;
  }

  std::string to_string() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [c, p] : terms_) {
      if (!first) out << "  ";
      first = false;
      const double re = c.real(), im = c.imag();
      out.precision(12);
      if (std::abs(im) < kPruneThreshold) {
        out << (re >= 0 ? "+" : "-") << std::abs(re);
      } else {
        out << "+(" << re << (im >= 0 ? "+" : "-") << std::abs(im) << "i)";
      }
      // Strings are stored with letter phase +1 after canonicalization;
      // drop the leading "+" of the string rendering.
      out << "·" << p.to_string().substr(1);
    }
    return out.str();
  }

 private:
  int n_;
  std::vector<std::pair<complexd, PauliString>> terms_;
  bool dirty_ = false;
};

}  // namespace gqsim

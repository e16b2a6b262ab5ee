#pragma once

// Gate and Circuit types over the fixed gate set
// {X, sqrt(X), RX, RZ, U1, S, Sdg, CNOT}, with an explicit global-phase
// accumulator, plus OpenQASM 2.0 export/import and a JSON gate dump.
//
// Angle conventions: U1(l) = diag(1, e^{il}), S = U1(pi/2),
// RX(t) = exp(-i t X / 2), RZ(t) = exp(-i t Z / 2),
// sqrt(X) = e^{i pi/4} RX(pi/2).

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gqsim/pauli.hpp"

namespace gqsim {

inline constexpr double kPi = std::numbers::pi;

enum class GateKind { X, SqrtX, RX, RZ, U1, S, Sdg, CNOT };

struct Gate {
  GateKind kind;
  int target;
  int control = -1;    // CNOT only
  double angle = 0.0;  // RX/RZ/U1 only

  static Gate x(int q) { return {GateKind::X, q}; }
  static Gate sqrt_x(int q) { return {GateKind::SqrtX, q}; }
  static Gate rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
  static Gate u1(int q, double lambda) { return {GateKind::U1, q, -1, lambda}; }
  static Gate s(int q) { return {GateKind::S, q}; }
  static Gate sdg(int q) { return {GateKind::Sdg, q}; }
  static Gate cnot(int control, int target) {
    if (control == target) {
      throw std::invalid_argument("CNOT: control equals target");
    }
    return {GateKind::CNOT, target, control};
  }

  bool is_cnot() const { return kind == GateKind::CNOT; }
  bool has_angle() const {
    return kind == GateKind::RX || kind == GateKind::RZ ||
           kind == GateKind::U1;
  }

  // Diagonal in the computational basis.
  bool is_diagonal() const {
    return kind == GateKind::RZ || kind == GateKind::U1 ||
           kind == GateKind::S || kind == GateKind::Sdg;
  }

  // Generated by X on the target qubit (commutes through a CNOT target).
  bool is_x_axis() const {
    return kind == GateKind::X || kind == GateKind::SqrtX ||
           kind == GateKind::RX;
  }

  const char* name() const {
    switch (kind) {
      case GateKind::X: return "x";
      case GateKind::SqrtX: return "sx";
      case GateKind::RX: return "rx";
      case GateKind::RZ: return "rz";
      case GateKind::U1: return "u1";
      case GateKind::S: return "s";
      case GateKind::Sdg: return "sdg";
      case GateKind::CNOT: return "cx";
    }
    return "?";
  }

  // 2x2 matrix for single-qubit gates.
  Eigen::Matrix2cd matrix2() const {
    using namespace std::complex_literals;
    Eigen::Matrix2cd m;
    switch (kind) {
      case GateKind::X:
        m << 0, 1, 1, 0;
        break;
      case GateKind::SqrtX:
        m << 0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i;
        break;
      case GateKind::RX: {
        const double c = std::cos(angle / 2), s = std::sin(angle / 2);
        m << c, -1i * s, -1i * s, c;
        break;
      }
      case GateKind::RZ:
        m << std::exp(-0.5i * angle), 0, 0, std::exp(0.5i * angle);
        break;
      case GateKind::U1:
        m << 1, 0, 0, std::exp(1i * angle);
        break;
      case GateKind::S:
        m << 1, 0, 0, 1i;
        break;
      case GateKind::Sdg:
        m << 1, 0, 0, -1i;
        break;
      case GateKind::CNOT:
        throw std::logic_error("matrix2 called on CNOT");
    }
    return m;
  }

  Gate inverse() const {
    switch (kind) {
      case GateKind::X:
      case GateKind::CNOT:
        return *this;
      case GateKind::S: return sdg(target);
      case GateKind::Sdg: return s(target);
      case GateKind::RX: return rx(target, -angle);
      case GateKind::RZ: return rz(target, -angle);
      case GateKind::U1: return u1(target, -angle);
      case GateKind::SqrtX:
        // sqrt(X)^dag = e^{-i pi/4} RX(-pi/2); not in the gate set, callers
        // invert circuits via Circuit::inverse which lowers it to RX.
        return rx(target, -std::numbers::pi / 2);
    }
    throw std::logic_error("unreachable");
  }

  bool operator==(const Gate& o) const {
    return kind == o.kind && target == o.target && control == o.control &&
           angle == o.angle;
  }
};

class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_(n_qubits) {
    if (n_qubits <= 0) throw std::invalid_argument("Circuit: bad qubit count");
  }

  int n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  double global_phase() const { return phase_; }

  void add_phase(double radians) { phase_ += radians; }
  void set_phase(double radians) { phase_ = radians; }

  void append(const Gate& g) {
    if (g.target < 0 || g.target >= n_ ||
        (g.is_cnot() && (g.control < 0 || g.control >= n_))) {
      throw std::out_of_range("Circuit::append: qubit index out of range");
    }
    if (g.has_angle() && !std::isfinite(g.angle)) {
      throw std::invalid_argument("Circuit::append: non-finite angle");
    }
    gates_.push_back(g);
  }

  void extend(const Circuit& other) {
    if (other.n_ != n_) {
      throw std::invalid_argument("Circuit::extend: qubit counts differ");
    }
    for (const auto& g : other.gates_) append(g);
    phase_ += other.phase_;
  }

  Circuit inverse() const {
    Circuit inv(n_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
      if (it->kind == GateKind::SqrtX) {
        // lower to RX and shed the e^{i pi/4} phase
        inv.append(Gate::rx(it->target, -std::numbers::pi / 2));
        inv.add_phase(-std::numbers::pi / 4);
      } else {
        inv.append(it->inverse());
      }
    }
    inv.add_phase(-phase_);
    return inv;
  }

  int cnot_count() const {
    int c = 0;
    for (const auto& g : gates_) c += g.is_cnot();
    return c;
  }
  int single_qubit_count() const {
    return static_cast<int>(gates_.size()) - cnot_count();
  }

  // OpenQASM 2.0, deterministic formatting; global phase as a comment.
  std::string to_qasm() const {
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "// global phase: " << format_angle(phase_) << "\n";
    out << "qreg q[" << n_ << "];\n";
    for (const auto& g : gates_) {
      out << g.name();
      if (g.has_angle()) out << "(" << format_angle(g.angle) << ")";
      out << " ";
      if (g.is_cnot()) out << "q[" << g.control << "],";
      out << "q[" << g.target << "];\n";
    }
    return out.str();
  }

  // Parses programs produced by to_qasm (the CLI's own reader).
  static Circuit from_qasm(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Circuit c(1);
    bool have_qreg = false;
    double phase = 0.0;
    while (std::getline(in, line)) {
      if (line.rfind("// global phase:", 0) == 0) {
        phase = std::stod(line.substr(16));
        continue;
      }
      if (line.empty() || line.rfind("//", 0) == 0 ||
          line.rfind("OPENQASM", 0) == 0 || line.rfind("include", 0) == 0) {
        continue;
      }
      if (line.rfind("qreg", 0) == 0) {
        const auto lb = line.find('['), rb = line.find(']');
        c = Circuit(std::stoi(line.substr(lb + 1, rb - lb - 1)));
        have_qreg = true;
        continue;
      }
      if (!have_qreg) throw std::runtime_error("from_qasm: gate before qreg");
      c.append(parse_gate_line(line));
    }
    c.set_phase(phase);
    return c;
  }

  // JSON gate dump for golden tests: array of {kind, target, control?, angle?}.
  std::string to_json() const {
    std::ostringstream out;
    out << "{\"n_qubits\": " << n_ << ", \"global_phase\": "
        << format_angle(phase_) << ", \"gates\": [";
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      const auto& g = gates_[i];
      if (i) out << ", ";
      out << "{\"kind\": \"" << g.name() << "\", \"target\": " << g.target;
      if (g.is_cnot()) out << ", \"control\": " << g.control;
      if (g.has_angle()) out << ", \"angle\": " << format_angle(g.angle);
      out << "}";
    }
    out << "]}";
    return out.str();
  }

  static std::string format_angle(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  static Gate parse_gate_line(const std::string& line) {
    const auto sp = line.find_first_of(" (");
    const std::string name = line.substr(0, sp);
    double angle = 0.0;
    std::size_t pos = sp;
    if (line[sp] == '(') {
      const auto close = line.find(')', sp);
      angle = std::stod(line.substr(sp + 1, close - sp - 1));
      pos = close + 1;
    }
    std::vector<int> qubits;
    while ((pos = line.find('[', pos)) != std::string::npos) {
      const auto rb = line.find(']', pos);
      qubits.push_back(std::stoi(line.substr(pos + 1, rb - pos - 1)));
      pos = rb;
    }
    if (name == "x") return Gate::x(qubits.at(0));
    if (name == "sx") return Gate::sqrt_x(qubits.at(0));
    if (name == "rx") return Gate::rx(qubits.at(0), angle);
    if (name == "rz") return Gate::rz(qubits.at(0), angle);
    if (name == "u1") return Gate::u1(qubits.at(0), angle);
    if (name == "s") return Gate::s(qubits.at(0));
    if (name == "sdg") return Gate::sdg(qubits.at(0));
    if (name == "cx") return Gate::cnot(qubits.at(0), qubits.at(1));
    throw std::runtime_error("from_qasm: unknown gate " + name);
  }

  int n_;
  std::vector<Gate> gates_;
  double phase_ = 0.0;
};

}  // namespace gqsim

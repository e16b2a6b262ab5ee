#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gqsim/compiler.hpp"
#include "gqsim/measurement.hpp"
#include "gqsim/simulator.hpp"
#include "test_util.hpp"

using namespace gqsim;
using testutil::max_abs;

namespace {

const BosonQubitMap kMap(2, 2);

PauliSum mapped_hamiltonian() { return kMap.map_squared_pair_hamiltonian(); }

std::uint64_t ground_index() {
  return kMap.encode_fock_index(FockBasisState({0, 0}, 2));
}
std::uint64_t excited_index() {
  return kMap.encode_fock_index(FockBasisState({2, 2}, 2));
}

}  // namespace

TEST_CASE("elementary gate applications") {
  Statevector sv(1);
  sv.apply_gate(Gate::x(0));
  CHECK(std::abs(sv.amplitude(1) - 1.0) < 1e-15);

  // CNOT(0,1) on |10> (q0 = 1) -> |11>
  Statevector two = Statevector::basis_state(2, 0b01);
  two.apply_gate(Gate::cnot(0, 1));
  CHECK(std::abs(two.amplitude(0b11) - 1.0) < 1e-15);

  // U1(l) on |1> -> e^{il} |1>
  Statevector one = Statevector::basis_state(1, 1);
  one.apply_gate(Gate::u1(0, 0.77));
  CHECK(std::abs(one.amplitude(1) - std::polar(1.0, 0.77)) < 1e-15);
}

TEST_CASE("norm preserved after every gate") {
  Rng rng(5);
  Statevector sv(3);
  for (int step = 0; step < 50; ++step) {
    switch (rng.next_below(4)) {
      case 0: sv.apply_gate(Gate::rx(rng.next_below(3), rng.next_double())); break;
      case 1: sv.apply_gate(Gate::u1(rng.next_below(3), rng.next_double())); break;
      case 2: sv.apply_gate(Gate::sqrt_x(rng.next_below(3))); break;
      default: {
        const int c = rng.next_below(3);
        sv.apply_gate(Gate::cnot(c, (c + 1) % 3));
      }
    }
    CHECK(std::abs(1.0 - sv.norm2()) <= 1e-12);
  }
}

TEST_CASE("run applies ground-state preparation") {
  const auto prep = prepare_ground_state(kMap);
  const auto out = run(prep);
  CHECK(std::abs(out.amplitude(ground_index()) - 1.0) < 1e-14);
}

TEST_CASE("run includes the recorded global phase") {
  Circuit c(1);
  c.add_phase(kPi / 3);
  const auto out = run(c);
  CHECK(std::abs(out.amplitude(0) - std::polar(1.0, kPi / 3)) < 1e-15);
}

TEST_CASE("run dimension mismatch") {
  Circuit c(2);
  CHECK_THROWS_AS((void)run(c, Statevector(3)), std::invalid_argument);
}

TEST_CASE("exact evolution oracle basics") {
  const auto h = mapped_hamiltonian();
  const MatrixXcd id = exact_evolution_oracle(h, 0.0);
  CHECK(max_abs(id - MatrixXcd::Identity(64, 64)) < 1e-13);

  const MatrixXcd u = exact_evolution_oracle(h, 0.3);
  CHECK(max_abs(u.adjoint() * u - MatrixXcd::Identity(64, 64)) <= 1e-12);

  // cross-check against the independent Pade exponential
  const MatrixXcd ref = testutil::expm(complexd{0, 0.3} * h.to_dense());
  CHECK(max_abs(u - ref) < 1e-12);
}

TEST_CASE("oracle rejects non-Hermitian sums") {
  PauliSum bad(1);
  bad.add_term(complexd{0, 1}, PauliString::single_letter(1, 'X', 0));
  bad.canonicalize();
  CHECK_THROWS_AS((void)exact_evolution_oracle(bad, 1.0), std::invalid_argument);
}

TEST_CASE("codeword-block closed form of the oracle") {
  const auto h = mapped_hamiltonian();
  for (double eps : {0.5e-6, 0.5e-2, 0.1, 0.5}) {
    const MatrixXcd u = exact_evolution_oracle(h, eps);
    const complexd elem = u(static_cast<long>(excited_index()),
                            static_cast<long>(ground_index()));
    CHECK(std::abs(elem - complexd{0, std::sin(2 * eps)}) <= 1e-12);
    const complexd diag = u(static_cast<long>(ground_index()),
                            static_cast<long>(ground_index()));
    CHECK(std::abs(diag - std::cos(2 * eps)) <= 1e-12);
  }
}

TEST_CASE("full circuit reproduces cos/sin dynamics on the prepared state") {
  const auto h = mapped_hamiltonian();
  for (double eps : {0.5e-6, 0.5e-4, 0.5e-2, 0.1, 0.5}) {
    Circuit c = prepare_ground_state(kMap);
    c.extend(compile_full_unitary(h, eps, CompilerBackend::Naive));
    const auto out = run(c);
    CHECK(std::abs(out.amplitude(ground_index()) - std::cos(2 * eps)) < 1e-10);
    CHECK(std::abs(out.amplitude(excited_index()) -
                   complexd{0, std::sin(2 * eps)}) < 1e-10);
    // P0 + P22 closes within the codeword block
    const double p0 = std::norm(out.amplitude(ground_index()));
    const double p22 = std::norm(out.amplitude(excited_index()));
    CHECK(std::abs(p0 + p22 - 1.0) < 1e-10);
  }
}

TEST_CASE("fidelity basics") {
  const auto a = Statevector::basis_state(2, 1);
  const auto b = Statevector::basis_state(2, 2);
  CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fidelity(a, b) == 0.0);
  CHECK_THROWS_AS((void)fidelity(a, Statevector(3)), std::invalid_argument);
}

TEST_CASE("p0 proxy on the encoded ground state") {
  const auto ground = Statevector::basis_state(6, ground_index());
  CHECK(p0_fidelity_proxy(ground, kMap) == doctest::Approx(1.0));

  const auto h = mapped_hamiltonian();
  const double eps = 0.37;
  Circuit c = prepare_ground_state(kMap);
  c.extend(compile_full_unitary(h, eps));
  const auto out = run(c);
  CHECK(p0_fidelity_proxy(out, kMap) ==
        doctest::Approx(std::cos(2 * eps) * std::cos(2 * eps)).epsilon(1e-10));
}

TEST_CASE("qutrit reduction") {
  const auto ground = Statevector::basis_state(6, ground_index());
  const auto red = reduce_to_qutrits(ground, kMap);
  CHECK(std::abs(red.state(0, 0) - 1.0) < 1e-14);
  CHECK(red.leakage <= 1e-14);

  // uniform superposition over all 64 basis states: leakage = 55/64
  Circuit hadamards(6);
  for (int q = 0; q < 6; ++q) {
    // [S, sqrt(X), S] = e^{i pi/4} H
    hadamards.append(Gate::s(q));
    hadamards.append(Gate::sqrt_x(q));
    hadamards.append(Gate::s(q));
  }
  const auto sup = run(hadamards, Statevector(6));
  const auto red2 = reduce_to_qutrits(sup, kMap);
  CHECK(red2.leakage == doctest::Approx(55.0 / 64.0).epsilon(1e-10));

  // circuit output stays in the codespace
  const auto h = mapped_hamiltonian();
  Circuit c = prepare_ground_state(kMap);
  c.extend(compile_full_unitary(h, 0.3));
  const auto red3 = reduce_to_qutrits(run(c), kMap);
  CHECK(red3.leakage <= 1e-10);
}

TEST_CASE("noiseless concurrence equals sin(4 eps)") {
  const auto h = mapped_hamiltonian();
  for (double eps : {0.5e-2, 0.1, 0.3}) {
    Circuit c = prepare_ground_state(kMap);
    c.extend(compile_full_unitary(h, eps));
    const auto red = reduce_to_qutrits(run(c), kMap);
    CHECK(std::abs(concurrence(red.state) - std::sin(4 * eps)) <= 1e-9);
  }
}

TEST_CASE("degenerate projection is an error") {
  // all weight on a non-codeword
  const auto bad = Statevector::basis_state(6, 0);  // 000000
  CHECK_THROWS_AS((void)reduce_to_qutrits(bad, kMap), std::runtime_error);
}

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

MatrixXcd exponential_oracle(const PauliString& p, double theta) {
  return testutil::expm(complexd{0, theta} * p.to_dense());
}

PauliString letters(int n, const std::string& word) {
  std::vector<std::pair<int, char>> v;
  for (int q = 0; q < n; ++q) v.emplace_back(q, word.at(q));
  return PauliString::from_letters(n, v);
}

}  // namespace

TEST_CASE("decompose_zx matches exp(i pi/4 Z X) exactly") {
  const auto c = decompose_zx(2, 0, 1);
  CHECK(c.cnot_count() == 1);
  const auto zx = PauliString::from_letters(2, {{0, 'Z'}, {1, 'X'}});
  CHECK(max_abs(circuit_unitary(c) - exponential_oracle(zx, kPi / 4)) < 1e-14);

  // reversed roles, embedded in a wider register
  const auto d = decompose_zx(3, 2, 0);
  const auto zx2 = PauliString::from_letters(3, {{2, 'Z'}, {0, 'X'}});
  CHECK(max_abs(circuit_unitary(d) - exponential_oracle(zx2, kPi / 4)) < 1e-14);

  CHECK_THROWS_AS(decompose_zx(2, 1, 1), std::invalid_argument);
}

TEST_CASE("single-letter exponentials") {
  // Z rotation: one u1, no CNOT
  const auto z = PauliString::single_letter(1, 'Z', 0);
  const auto cz = compile_pauli_exponential(z, 0.4);
  CHECK(cz.cnot_count() == 0);
  CHECK(cz.single_qubit_count() == 1);
  CHECK(max_abs(circuit_unitary(cz) - exponential_oracle(z, 0.4)) < 1e-14);

  const auto x = PauliString::single_letter(1, 'X', 0);
  const auto cx = compile_pauli_exponential(x, -1.1);
  CHECK(cx.cnot_count() == 0);
  CHECK(max_abs(circuit_unitary(cx) - exponential_oracle(x, -1.1)) < 1e-14);

  const auto y = PauliString::single_letter(1, 'Y', 0);
  const auto cy = compile_pauli_exponential(y, 0.9);
  CHECK(max_abs(circuit_unitary(cy) - exponential_oracle(y, 0.9)) < 1e-14);
}

TEST_CASE("identity and non-Hermitian strings are rejected") {
  CHECK_THROWS_AS((void)compile_pauli_exponential(PauliString::identity(2), 1.0),
                  std::invalid_argument);
  // i * X carries letter phase i: not Hermitian
  const PauliString ix(1, 1, 0, 1);
  CHECK_THROWS_AS((void)compile_pauli_exponential(ix, 1.0),
                  std::invalid_argument);
}

TEST_CASE("weight-4 terms meet the gate budget and match the oracle") {
  for (const char* word : {"XXXX", "YYYY", "XXYY", "XYXY", "XYYX", "YXXY",
                           "YXYX", "YYXX"}) {
    const auto p = letters(4, word);
    const auto c = compile_pauli_exponential(p, 0.3);
    CAPTURE(word);
    CHECK(c.cnot_count() == 6);
    CHECK(c.single_qubit_count() <= 9);
    CHECK(max_abs(circuit_unitary(c) - exponential_oracle(p, 0.3)) < 1e-13);
  }
  // all-X costs a single rotation beyond the CNOT star
  CHECK(compile_pauli_exponential(letters(4, "XXXX"), 0.3).single_qubit_count()
        == 1);
}

TEST_CASE("random strings match the exponential oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + rng.next_below(5);
    const auto p = testutil::random_string(n, rng, /*allow_identity=*/false);
    const double theta = 4 * (rng.next_double() - 0.5);
    const auto c = compile_pauli_exponential(p, theta);
    CAPTURE(p.to_string());
    CAPTURE(theta);
    CHECK(c.cnot_count() == 2 * (p.weight() - 1));
    CHECK(max_abs(circuit_unitary(c) - exponential_oracle(p, theta)) < 1e-12);
  }
}

TEST_CASE("negative letter phase flips the rotation sense") {
  // -XX via XZ-form phase exponent 2
  const PauliString neg_xx(2, 0b11, 0, 2);
  const auto c = compile_pauli_exponential(neg_xx, 0.7);
  const auto xx = letters(2, "XX");
  CHECK(max_abs(circuit_unitary(c) - exponential_oracle(xx, -0.7)) < 1e-13);
}

TEST_CASE("ground-state preparation") {
  const auto prep = prepare_ground_state(kMap);
  CHECK(prep.gates().size() == 4);
  CHECK(prep.cnot_count() == 0);
  const auto out = run(prep);
  const auto idx = kMap.encode_fock_index(FockBasisState({0, 0}, 2));
  CHECK(std::abs(out.amplitude(idx) - 1.0) < 1e-15);
  CHECK_THROWS_AS((void)prepare_ground_state(BosonQubitMap(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("naive full circuit: 48 CNOTs and oracle agreement") {
  const auto h = mapped_hamiltonian();
  const auto href = h.to_dense();
  for (double eps : {0.5e-6, 0.5e-2, 0.1, 0.5}) {
    const auto c = compile_full_unitary(h, eps, CompilerBackend::Naive);
    CHECK(c.cnot_count() == 48);
    const MatrixXcd u = circuit_unitary(c);
    const MatrixXcd ref = exact_evolution_oracle(h, eps);
    CAPTURE(eps);
    CHECK(max_abs(u - ref) < 1e-12);
    // and against the independent Pade route
    CHECK(max_abs(u - testutil::expm(complexd{0, eps} * href)) < 1e-12);
  }
}

TEST_CASE("eps = 0 compiles to the identity unitary") {
  const auto h = mapped_hamiltonian();
  for (auto b : {CompilerBackend::Naive, CompilerBackend::Peephole,
                 CompilerBackend::Diagonalize}) {
    const auto c = compile_full_unitary(h, 0.0, b);
    CHECK(max_abs(circuit_unitary(c) - MatrixXcd::Identity(64, 64)) < 1e-12);
  }
}

TEST_CASE("term ordering does not change the unitary") {
  const auto h = mapped_hamiltonian();
  // same sum entered in reverse order
  PauliSum rev(h.n_qubits());
  const auto& t = h.terms();
  for (auto it = t.rbegin(); it != t.rend(); ++it) {
    rev.add_term(it->first, it->second);
  }
  rev.canonicalize();
  const auto a = compile_full_unitary(h, 0.23);
  const auto b = compile_full_unitary(rev, 0.23);
  CHECK(max_abs(circuit_unitary(a) - circuit_unitary(b)) < 1e-12);
}

TEST_CASE("non-commuting sums are rejected with the offending pair named") {
  PauliSum bad(1);
  bad.add_term(1.0, PauliString::single_letter(1, 'X', 0));
  bad.add_term(1.0, PauliString::single_letter(1, 'Z', 0));
  bad.canonicalize();
  CHECK_THROWS_WITH_AS((void)compile_full_unitary(bad, 0.1),
                       doctest::Contains("non-commuting"),
                       std::invalid_argument);
}

TEST_CASE("peephole preserves the unitary and strictly reduces CNOTs") {
  const auto h = mapped_hamiltonian();
  for (double eps : {0.5e-2, 0.3}) {
    const auto naive = compile_full_unitary(h, eps, CompilerBackend::Naive);
    const auto opt = compile_full_unitary(h, eps, CompilerBackend::Peephole);
    CAPTURE(eps);
    CHECK(opt.cnot_count() < naive.cnot_count());
    CHECK(opt.gates().size() < naive.gates().size());
    CHECK(max_abs(circuit_unitary(opt) - circuit_unitary(naive)) < 1e-12);
  }
}

TEST_CASE("peephole is idempotent and exact on hand-built circuits") {
  Circuit c(2);
  c.append(Gate::cnot(0, 1));
  c.append(Gate::cnot(0, 1));       // cancels
  c.append(Gate::s(0));
  c.append(Gate::sdg(0));           // cancels
  c.append(Gate::rx(1, 0.3));
  c.append(Gate::rx(1, -0.3));      // cancels
  c.append(Gate::u1(0, 0.5));
  const auto once = peephole_optimize(c);
  CHECK(once.gates().size() == 1);
  CHECK(once.gates()[0].kind == GateKind::U1);
  const auto twice = peephole_optimize(once);
  CHECK(twice.gates().size() == once.gates().size());
  CHECK(max_abs(circuit_unitary(once) - circuit_unitary(c)) < 1e-14);

  // merge across a commuting barrier: diagonal gates slide past a CNOT
  // control, x-axis gates past its target
  Circuit d(2);
  d.append(Gate::s(0));
  d.append(Gate::cnot(0, 1));
  d.append(Gate::sdg(0));
  d.append(Gate::rx(1, 1.2));
  d.append(Gate::cnot(0, 1));
  d.append(Gate::rx(1, -1.2));
  const auto dopt = peephole_optimize(d);
  CHECK(dopt.gates().empty());
  CHECK(max_abs(circuit_unitary(dopt) - circuit_unitary(d)) < 1e-14);

  // X X = I up to the shed phase; RX(pi) + RX(pi) = -I handled too
  Circuit e(1);
  e.append(Gate::x(0));
  e.append(Gate::x(0));
  e.append(Gate::rx(0, kPi));
  e.append(Gate::rx(0, kPi));
  const auto eopt = peephole_optimize(e);
  CHECK(eopt.gates().empty());
  CHECK(max_abs(circuit_unitary(eopt) - circuit_unitary(e)) < 1e-14);
}

TEST_CASE("peephole on random circuits never changes the unitary") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c(3);
    for (int step = 0; step < 25; ++step) {
      switch (rng.next_below(6)) {
        case 0: c.append(Gate::x(rng.next_below(3))); break;
        case 1: c.append(Gate::sqrt_x(rng.next_below(3))); break;
        case 2: c.append(Gate::rx(rng.next_below(3), rng.next_double())); break;
        case 3: c.append(Gate::u1(rng.next_below(3), rng.next_double())); break;
        case 4: c.append(Gate::s(rng.next_below(3))); break;
        default: {
          const int a = rng.next_below(3);
          c.append(Gate::cnot(a, (a + 1 + rng.next_below(2)) % 3));
        }
      }
    }
    const auto opt = peephole_optimize(c);
    CHECK(opt.gates().size() <= c.gates().size());
    CHECK(max_abs(circuit_unitary(opt) - circuit_unitary(c)) < 1e-12);
  }
}

TEST_CASE("diagonalization turns every term Z-type") {
  const auto h = mapped_hamiltonian();
  const auto diag = diagonalize_commuting_set(h);
  CHECK(diag.all_z_type);
  CHECK(diag.z_rotation_layer.size() == h.terms().size());
  for (const auto& [mask, coeff] : diag.z_rotation_layer) {
    CHECK(mask != 0);
    CHECK(std::isfinite(coeff));
  }
  CHECK(diag.report.find("NOT Z-type") == std::string::npos);

  // conjugation really is V P V^dag for each input term
  const MatrixXcd v = circuit_unitary(diag.clifford_prefix);
  for (std::size_t i = 0; i < h.terms().size(); ++i) {
    const auto& p = h.terms()[i].second;
    const PauliString zs(h.n_qubits(), 0, diag.z_rotation_layer[i].first, 0);
    const double sign =
        diag.z_rotation_layer[i].second / h.terms()[i].first.real();
    CHECK(max_abs(v * p.to_dense() * v.adjoint() - sign * zs.to_dense())
          < 1e-12);
  }
}

TEST_CASE("already-diagonal sums need no prefix") {
  PauliSum zz(2);
  zz.add_term(0.5, letters(2, "ZZ"));
  zz.add_term(-0.25, PauliString::single_letter(2, 'Z', 0));
  zz.canonicalize();
  const auto diag = diagonalize_commuting_set(zz);
  CHECK(diag.all_z_type);
  CHECK(diag.clifford_prefix.gates().empty());
}

TEST_CASE("compile_z_rotation matches the oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + rng.next_below(4);
    const std::uint64_t mask = 1 + rng.next_below((1 << n) - 1);
    const double theta = rng.next_double() - 0.5;
    const auto c = compile_z_rotation(n, mask, theta);
    const PauliString zs(n, 0, mask, 0);
    CHECK(max_abs(circuit_unitary(c) - exponential_oracle(zs, theta)) < 1e-13);
  }
  // empty mask is a pure phase
  const auto ph = compile_z_rotation(2, 0, 0.4);
  CHECK(ph.gates().empty());
  CHECK(max_abs(circuit_unitary(ph) -
                std::polar(1.0, 0.4) * MatrixXcd::Identity(4, 4)) < 1e-15);
}

TEST_CASE("diagonalize backend agrees with the other backends") {
  const auto h = mapped_hamiltonian();
  for (double eps : {0.5e-6, 0.5e-2, 0.3}) {
    const auto naive = compile_full_unitary(h, eps, CompilerBackend::Naive);
    const auto diag = compile_full_unitary(h, eps, CompilerBackend::Diagonalize);
    CAPTURE(eps);
    CHECK(max_abs(circuit_unitary(diag) - circuit_unitary(naive)) < 1e-10);
    CHECK(diag.cnot_count() < naive.cnot_count());
  }
}

TEST_CASE("backend names") {
  CHECK(std::string(backend_name(CompilerBackend::Naive)) == "naive");
  CHECK(std::string(backend_name(CompilerBackend::Peephole)) == "peephole");
  CHECK(std::string(backend_name(CompilerBackend::Diagonalize)) ==
        "diagonalize");
}

TEST_CASE("compiled QASM roundtrips through the parser") {
  const auto h = mapped_hamiltonian();
  const auto c = compile_full_unitary(h, 0.1, CompilerBackend::Peephole);
  const auto back = Circuit::from_qasm(c.to_qasm());
  REQUIRE(back.gates().size() == c.gates().size());
  CHECK(max_abs(circuit_unitary(back) - circuit_unitary(c)) < 1e-12);
}

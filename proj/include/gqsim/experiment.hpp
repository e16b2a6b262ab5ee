#pragma once

// Experiment runner: configuration, epsilon sweeps, per-point pipeline
// (compile, verify, simulate, sample, mitigate, post-select), artifact
// emission, and the standalone invariant suite.
//
// Outputs are byte-deterministic for a fixed config and seed: sweep points
// run concurrently but are written back in index order with fixed number
// formatting.

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gqsim/bosonmap.hpp"
#include "gqsim/compiler.hpp"
#include "gqsim/measurement.hpp"
#include "gqsim/physics.hpp"
#include "gqsim/simulator.hpp"

namespace gqsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PostselectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  double start = 0;
  double stop = 0;
  int points = 0;
};

struct ExperimentConfig {
  // Exactly one of: direct epsilon(s), or physical parameters.
  std::optional<double> epsilon;
  std::optional<SweepSpec> sweep;
  std::optional<PhysicalParams> physical;

  long long shots = 0;  // 0: noiseless simulation only
  std::uint64_t seed = 1;
  double readout_error = 0;
  double gate_error_1q = 0;
  double gate_error_2q = 0;
  bool mitigate = true;
  bool postselect = true;
  CompilerBackend backend = CompilerBackend::Peephole;
  std::string out_dir;  // empty: no files written

  void validate() const {
    const int direct = (epsilon ? 1 : 0) + (sweep ? 1 : 0);
    const int physical_mode = physical ? 1 : 0;
    if (direct + physical_mode != 1) {
      throw ConfigError(
          "config: supply exactly one of --epsilon, --sweep, or the physical "
          "parameters (--omega, --distance, --time)");
    }
    if (sweep) {
      if (!(sweep->start > 0) || !(sweep->stop > 0)) {
        throw ConfigError("config: sweep bounds must be positive (log grid)");
      }
      if (sweep->points < 1) {
        throw ConfigError("config: sweep needs at least one point");
      }
      if (sweep->stop < sweep->start) {
        throw ConfigError("config: sweep stop below start");
      }
    }
    if (epsilon && !(*epsilon >= 0)) {
      throw ConfigError("config: epsilon must be non-negative");
    }
    if (shots < 0) throw ConfigError("config: shots must be non-negative");
    if (readout_error < 0 || readout_error >= 0.5) {
      throw ConfigError("config: readout error must lie in [0, 0.5)");
    }
    if (gate_error_1q < 0 || gate_error_1q > 1 || gate_error_2q < 0 ||
        gate_error_2q > 1) {
      throw ConfigError("config: gate error rates must lie in [0, 1]");
    }
  }

  std::vector<double> epsilon_grid() const {
    validate();
    if (epsilon) return {*epsilon};
    if (physical) return {gqsim::epsilon(coupling_g(*physical), physical->t)};
    std::vector<double> grid;
    if (sweep->points == 1) {
      grid.push_back(sweep->start);
      return grid;
    }
    const double la = std::log(sweep->start), lb = std::log(sweep->stop);
    for (int i = 0; i < sweep->points; ++i) {
      grid.push_back(std::exp(la + (lb - la) * i / (sweep->points - 1)));
    }
    return grid;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    if (epsilon) j["epsilon"] = *epsilon;
    if (sweep) {
      j["sweep_start"] = sweep->start;
      j["sweep_stop"] = sweep->stop;
      j["sweep_points"] = sweep->points;
    }
    if (physical) {
      j["omega"] = physical->omega_m;
      j["distance"] = physical->d;
      j["time"] = physical->t;
    }
    j["shots"] = shots;
    j["seed"] = seed;
    j["readout_error"] = readout_error;
    j["gate_error_1q"] = gate_error_1q;
    j["gate_error_2q"] = gate_error_2q;
    j["mitigate"] = mitigate;
    j["postselect"] = postselect;
    j["backend"] = backend_name(backend);
    j["out"] = out_dir;
    return j;
  }

  // Flat key-value config document; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    double omega = 0, distance = 0, time = 0;
    bool have_omega = false, have_distance = false, have_time = false;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "epsilon") c.epsilon = value.get<double>();
        else if (key == "sweep_start") {
          if (!c.sweep) c.sweep = SweepSpec{};
          c.sweep->start = value.get<double>();
        } else if (key == "sweep_stop") {
          if (!c.sweep) c.sweep = SweepSpec{};
          c.sweep->stop = value.get<double>();
        } else if (key == "sweep_points") {
          if (!c.sweep) c.sweep = SweepSpec{};
          c.sweep->points = value.get<int>();
        } else if (key == "omega") {
          omega = value.get<double>();
          have_omega = true;
        } else if (key == "distance") {
          distance = value.get<double>();
          have_distance = true;
        } else if (key == "time") {
          time = value.get<double>();
          have_time = true;
        } else if (key == "shots") c.shots = value.get<long long>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "readout_error") c.readout_error = value.get<double>();
        else if (key == "gate_error_1q") c.gate_error_1q = value.get<double>();
        else if (key == "gate_error_2q") c.gate_error_2q = value.get<double>();
        else if (key == "mitigate") c.mitigate = value.get<bool>();
        else if (key == "postselect") c.postselect = value.get<bool>();
        else if (key == "backend") c.backend = parse_backend(value.get<std::string>());
        else if (key == "out") c.out_dir = value.get<std::string>();
        else throw ConfigError("config: unknown key \"" + key + "\"");
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for \"" + key + "\": " + e.what());
      }
    }
    if (have_omega || have_distance || have_time) {
      if (!(have_omega && have_distance && have_time)) {
        throw ConfigError(
            "config: omega, distance, and time must be supplied together");
      }
      try {
        c.physical = PhysicalParams(omega, distance, time);
      } catch (const std::domain_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    return c;
  }

  static CompilerBackend parse_backend(const std::string& name) {
    if (name == "naive") return CompilerBackend::Naive;
    if (name == "peephole") return CompilerBackend::Peephole;
    if (name == "diagonalize") return CompilerBackend::Diagonalize;
    throw ConfigError("config: unknown backend \"" + name +
                      "\" (naive, peephole, diagonalize)");
  }
};

struct SweepRecord {
  double eps = 0;
  int cnot_count = 0;
  int single_qubit_count = 0;
  double oracle_deviation = 0;
  double p0_exact = 0;
  double fidelity_reference = 0;  // vs the renormalized perturbative target
  double concurrence = 0;
  double leakage = 0;
  std::string qasm;
  // Sampling pipeline (shots > 0 only):
  bool sampled = false;
  double p0_estimate = 0;
  double p0_sigma = 0;
  double discard_fraction = 0;
  double mitigation_negativity = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  double coupling = 0;  // physical mode only
  std::vector<SweepRecord> records;
  std::vector<std::string> warnings;
};

namespace detail {

inline SweepRecord run_sweep_point(const ExperimentConfig& cfg, double eps,
                                   std::uint64_t point_index) {
  const BosonQubitMap map(2, 2);
  const PauliSum h = map.map_squared_pair_hamiltonian();

  SweepRecord rec;
  rec.eps = eps;

  Circuit circuit = prepare_ground_state(map);
  const Circuit evolution = compile_full_unitary(h, eps, cfg.backend);
  circuit.extend(evolution);
  rec.cnot_count = circuit.cnot_count();
  rec.single_qubit_count = circuit.single_qubit_count();
  rec.qasm = circuit.to_qasm();

  rec.oracle_deviation = unitary_distance_up_to_phase(
      circuit_unitary(evolution), exact_evolution_oracle(h, eps));
  if (rec.oracle_deviation > 1e-8) {
    throw VerificationError("compiled circuit deviates from the oracle by " +
                            Circuit::format_angle(rec.oracle_deviation));
  }

  const Statevector out = run(circuit);
  rec.p0_exact = p0_fidelity_proxy(out, map);
  const auto reduced = reduce_to_qutrits(out, map);
  rec.leakage = reduced.leakage;
  rec.concurrence = gqsim::concurrence(reduced.state);
  const TwoQutritState ref = perturbative_target(eps);
  complexd overlap = 0;
  for (int na = 0; na < 3; ++na) {
    for (int nb = 0; nb < 3; ++nb) {
      overlap += std::conj(ref(na, nb)) * reduced.state(na, nb);
    }
  }
  rec.fidelity_reference = std::norm(overlap);

  if (cfg.shots > 0) {
    rec.sampled = true;
    const auto readout =
        ReadoutNoiseModel::uniform(6, cfg.readout_error, cfg.readout_error);
    const std::uint64_t point_seed = Rng::derive(cfg.seed, point_index).next_u64();
    CountsTable counts;
    if (cfg.gate_error_1q > 0 || cfg.gate_error_2q > 0) {
      counts = sample_noisy(circuit, Statevector(6), cfg.shots,
                            GateNoiseModel(cfg.gate_error_1q, cfg.gate_error_2q),
                            readout, point_seed);
    } else {
      counts = sample(out, cfg.shots, readout, point_seed);
    }

    try {
      if (cfg.mitigate) {
        const auto quasi = mitigate_readout(counts, readout);
        rec.mitigation_negativity = quasi.negativity_mass;
        if (cfg.postselect) {
          const auto post = gqsim::postselect(quasi, map);
          const auto est = estimate_p0(post);
          rec.p0_estimate = est.value;
          rec.p0_sigma = est.sigma;
          rec.discard_fraction = post.discard_fraction;
        } else {
          const auto ground = map.encode_fock(FockBasisState({0, 0}, 2));
          rec.p0_estimate = quasi.at_bitstring(ground);
          rec.p0_sigma = quasi.sigma_at_bitstring(ground);
        }
      } else if (cfg.postselect) {
        const auto post = gqsim::postselect(counts, map);
        const auto est = estimate_p0(post);
        rec.p0_estimate = est.value;
        rec.p0_sigma = est.sigma;
        rec.discard_fraction = post.discard_fraction;
      } else {
        const auto ground = map.encode_fock(FockBasisState({0, 0}, 2));
        auto it = counts.counts.find(ground);
        const double f =
            it == counts.counts.end()
                ? 0.0
                : static_cast<double>(it->second) / cfg.shots;
        rec.p0_estimate = f;
        rec.p0_sigma = std::sqrt(std::max(0.0, f * (1 - f) / cfg.shots));
      }
    } catch (const std::runtime_error& e) {
      throw PostselectError(e.what());
    }
  }
  return rec;
}

inline std::string records_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  out << "epsilon,cnot_count,single_qubit_count,oracle_deviation,p0_exact,"
         "fidelity_reference,concurrence,leakage,p0_estimate,p0_sigma,"
         "discard_fraction\n";
  auto f = Circuit::format_angle;
  for (const auto& r : records) {
    out << f(r.eps) << "," << r.cnot_count << "," << r.single_qubit_count
        << "," << f(r.oracle_deviation) << "," << f(r.p0_exact) << ","
        << f(r.fidelity_reference) << "," << f(r.concurrence) << ","
        << f(r.leakage) << ",";
    if (r.sampled) {
      out << f(r.p0_estimate) << "," << f(r.p0_sigma) << ","
          << f(r.discard_fraction);
    } else {
      out << ",,";
    }
    out << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json result_summary(const ExperimentResult& res) {
  nlohmann::ordered_json j;
  j["config"] = res.config.to_json();
  j["config"].erase("out");  // keep the summary independent of its location
  if (res.config.physical) j["coupling_g_hz"] = res.coupling;
  j["warnings"] = res.warnings;
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : res.records) {
    nlohmann::ordered_json rj;
    rj["epsilon"] = r.eps;
    rj["cnot_count"] = r.cnot_count;
    rj["single_qubit_count"] = r.single_qubit_count;
    rj["oracle_deviation"] = r.oracle_deviation;
    rj["p0_exact"] = r.p0_exact;
    rj["fidelity_reference"] = r.fidelity_reference;
    rj["concurrence"] = r.concurrence;
    rj["leakage"] = r.leakage;
    if (r.sampled) {
      rj["p0_estimate"] = r.p0_estimate;
      rj["p0_sigma"] = r.p0_sigma;
      rj["discard_fraction"] = r.discard_fraction;
      rj["mitigation_negativity"] = r.mitigation_negativity;
    }
    recs.push_back(std::move(rj));
  }
  return j;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.config = cfg;
  if (cfg.physical) {
    res.coupling = coupling_g(*cfg.physical);
    res.warnings.push_back(
        "computed coupling g = " + Circuit::format_angle(res.coupling) +
        " Hz; for omega = 1e21 Hz, d = 1e-4 m this evaluates to ~4.9e-33 Hz, "
        "two orders of magnitude below the often-quoted ~1e-31 Hz estimate");
  }

  const auto grid = cfg.epsilon_grid();
  std::vector<std::future<SweepRecord>> futures;
  futures.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    futures.push_back(std::async(std::launch::async, detail::run_sweep_point,
                                 cfg, grid[i], static_cast<std::uint64_t>(i)));
  }
  for (auto& f : futures) res.records.push_back(f.get());

  if (!cfg.out_dir.empty()) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "config.json", cfg.to_json().dump(2) + "\n");
    detail::write_file(dir / "records.csv", detail::records_csv(res.records));
    detail::write_file(dir / "summary.json",
                       detail::result_summary(res).dump(2) + "\n");
    for (std::size_t i = 0; i < res.records.size(); ++i) {
      detail::write_file(dir / ("circuit_" + std::to_string(i) + ".qasm"),
                         res.records[i].qasm);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

struct VerificationCheck {
  std::string name;
  bool passed = false;
  double deviation = 0;  // measured quantity, check-specific
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }

  std::string to_text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
      out << (c.passed ? "PASS" : "FAIL") << "  " << c.name
          << "  (deviation " << Circuit::format_angle(c.deviation) << ")\n";
    }
    out << (all_passed() ? "all checks passed" : "CHECKS FAILED") << "\n";
    return out.str();
  }
};

// Static invariants plus circuit-vs-oracle checks over the given epsilons
// (static checks only when the list is empty).
inline VerificationReport verify_invariants(
    const std::vector<double>& epsilons = {0.5e-6, 0.5e-2, 0.1},
    CompilerBackend backend = CompilerBackend::Peephole) {
  VerificationReport rep;
  const BosonQubitMap map(2, 2);
  const PauliSum h = map.map_squared_pair_hamiltonian();
  auto add = [&](const std::string& name, bool pass, double dev) {
    rep.checks.push_back({name, pass, dev});
  };

  add("hamiltonian has 8 terms", h.terms().size() == 8,
      static_cast<double>(h.terms().size()));

  double coeff_dev = 0;
  for (const auto& [c, p] : h.terms()) {
    coeff_dev = std::max(coeff_dev, std::abs(std::abs(c.real()) - 0.25));
    coeff_dev = std::max(coeff_dev, std::abs(c.imag()));
  }
  add("coefficients are +/- 1/4", coeff_dev <= 1e-14, coeff_dev);

  bool commute = true;
  double comm_norm = 0;
  for (std::size_t i = 0; i < h.terms().size(); ++i) {
    for (std::size_t j = i + 1; j < h.terms().size(); ++j) {
      const auto& a = h.terms()[i].second;
      const auto& b = h.terms()[j].second;
      commute = commute && a.commutes(b);
      const MatrixXcd da = a.to_dense(), db = b.to_dense();
      comm_norm = std::max(comm_norm, (da * db - db * da).cwiseAbs().maxCoeff());
    }
  }
  add("all 28 term pairs commute", commute && comm_norm <= 1e-13, comm_norm);

  int max_cnot = 0, max_single = 0;
  for (const auto& [c, p] : h.terms()) {
    const auto term = compile_pauli_exponential(p, 0.1);
    max_cnot = std::max(max_cnot, term.cnot_count());
    max_single = std::max(max_single, term.single_qubit_count());
  }
  add("per-term circuits use 6 CNOTs", max_cnot == 6, max_cnot);
  add("per-term circuits use <= 9 single-qubit gates", max_single <= 9,
      max_single);

  const int naive_cnots =
      compile_full_unitary(h, 0.1, CompilerBackend::Naive).cnot_count();
  add("naive full circuit uses 48 CNOTs", naive_cnots == 48, naive_cnots);
  const int peep_cnots =
      compile_full_unitary(h, 0.1, CompilerBackend::Peephole).cnot_count();
  add("peephole reduces the CNOT count", peep_cnots < 48, peep_cnots);

  for (double eps : epsilons) {
    const auto c = compile_full_unitary(h, eps, backend);
    const double dev = unitary_distance_up_to_phase(
        circuit_unitary(c), exact_evolution_oracle(h, eps));
    add("circuit matches oracle at epsilon = " + Circuit::format_angle(eps),
        dev <= 1e-10, dev);

    const auto back = Circuit::from_qasm(c.to_qasm());
    add("QASM roundtrip at epsilon = " + Circuit::format_angle(eps),
        back.gates().size() == c.gates().size() &&
            back.to_qasm() == c.to_qasm(),
        0.0);

    Circuit full = prepare_ground_state(map);
    full.extend(c);
    const auto out = run(full);
    const auto ground = map.encode_fock_index(FockBasisState({0, 0}, 2));
    const auto excited = map.encode_fock_index(FockBasisState({2, 2}, 2));
    const double dyn = std::max(
        std::abs(out.amplitude(ground) - std::cos(2 * eps)),
        std::abs(out.amplitude(excited) - complexd{0, std::sin(2 * eps)}));
    add("closed-form dynamics at epsilon = " + Circuit::format_angle(eps),
        dyn <= 1e-10, dyn);
  }
  return rep;
}

}  // namespace gqsim

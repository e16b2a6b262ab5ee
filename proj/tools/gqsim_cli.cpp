// Command-line front end: compile | simulate | sample | verify | physics.
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure,
// 4 degenerate post-selection.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gqsim/experiment.hpp"

namespace {

using namespace gqsim;

struct CliOptions {
  std::string config_file;
  double epsilon = 0;
  std::string sweep;
  double omega = 0;
  double distance = 0;
  double time = 0;
  long long shots = 0;
  std::uint64_t seed = 1;
  double readout_error = 0;
  double gate_error_1q = 0;
  double gate_error_2q = 0;
  std::string backend = "peephole";
  bool mitigate = true;
  bool postselect = true;
  std::string out;
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_file, "JSON config file (flags override)");
  cmd->add_option("--epsilon", o.epsilon, "dimensionless evolution parameter");
  cmd->add_option("--sweep", o.sweep, "log-spaced grid start:stop:points");
  cmd->add_option("--omega", o.omega, "oscillator angular frequency [Hz]");
  cmd->add_option("--distance", o.distance, "oscillator separation [m]");
  cmd->add_option("--time", o.time, "evolution time [s]");
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--backend", o.backend,
                  "compiler backend: naive, peephole, diagonalize");
  cmd->add_option("--out", o.out, "output directory for run artifacts");
}

void add_noise_flags(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--shots", o.shots, "measurement shots");
  cmd->add_option("--readout-error", o.readout_error,
                  "per-qubit symmetric readout flip probability");
  cmd->add_option("--gate-error-1q", o.gate_error_1q,
                  "depolarizing probability per single-qubit gate");
  cmd->add_option("--gate-error-2q", o.gate_error_2q,
                  "depolarizing probability per CNOT");
  cmd->add_flag("--mitigate,!--no-mitigate", o.mitigate,
                "readout confusion-matrix mitigation");
  cmd->add_flag("--postselect,!--no-postselect", o.postselect,
                "post-select onto the two codewords");
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec s;
  const auto a = text.find(':'), b = text.rfind(':');
  if (a == std::string::npos || b == a) {
    throw ConfigError("config: --sweep expects start:stop:points");
  }
  try {
    s.start = std::stod(text.substr(0, a));
    s.stop = std::stod(text.substr(a + 1, b - a - 1));
    s.points = std::stoi(text.substr(b + 1));
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse --sweep \"" + text + "\"");
  }
  return s;
}

// Config file first, then every flag the user actually passed on top.
ExperimentConfig build_config(const CLI::App* cmd, const CliOptions& o) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ConfigError("config: cannot open " + o.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    cfg = ExperimentConfig::from_json(j);
  }

  auto passed = [&](const std::string& flag) {
    const auto* opt = cmd->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  };
  if (passed("--epsilon")) {
    cfg.epsilon = o.epsilon;
    cfg.sweep.reset();
    cfg.physical.reset();
  }
  if (passed("--sweep")) {
    cfg.sweep = parse_sweep(o.sweep);
    cfg.epsilon.reset();
    cfg.physical.reset();
  }
  if (passed("--omega") || passed("--distance") || passed("--time")) {
    double omega = o.omega, distance = o.distance, time = o.time;
    if (cfg.physical) {
      if (!passed("--omega")) omega = cfg.physical->omega_m;
      if (!passed("--distance")) distance = cfg.physical->d;
      if (!passed("--time")) time = cfg.physical->t;
    }
    try {
      cfg.physical = PhysicalParams(omega, distance, time);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.epsilon.reset();
    cfg.sweep.reset();
  }
  if (passed("--shots")) cfg.shots = o.shots;
  if (passed("--seed")) cfg.seed = o.seed;
  if (passed("--readout-error")) cfg.readout_error = o.readout_error;
  if (passed("--gate-error-1q")) cfg.gate_error_1q = o.gate_error_1q;
  if (passed("--gate-error-2q")) cfg.gate_error_2q = o.gate_error_2q;
  if (passed("--mitigate") || passed("--no-mitigate")) cfg.mitigate = o.mitigate;
  if (passed("--postselect") || passed("--no-postselect")) {
    cfg.postselect = o.postselect;
  }
  if (passed("--backend")) cfg.backend = ExperimentConfig::parse_backend(o.backend);
  if (passed("--out")) cfg.out_dir = o.out;
  return cfg;
}

void print_warnings(const ExperimentResult& res) {
  for (const auto& w : res.warnings) std::cout << "warning: " << w << "\n";
}

int cmd_compile(const CLI::App* cmd, const CliOptions& o) {
  ExperimentConfig cfg = build_config(cmd, o);
  cfg.shots = 0;
  const auto res = run_experiment(cfg);
  print_warnings(res);
  for (const auto& r : res.records) {
    std::cout << "epsilon " << Circuit::format_angle(r.eps) << ": "
              << r.cnot_count << " CNOTs, " << r.single_qubit_count
              << " single-qubit gates (backend "
              << backend_name(cfg.backend) << ")\n";
    if (cfg.out_dir.empty()) std::cout << r.qasm;
  }
  if (!cfg.out_dir.empty()) {
    std::cout << "artifacts written to " << cfg.out_dir << "\n";
  }
  return 0;
}

int cmd_simulate(const CLI::App* cmd, const CliOptions& o) {
  ExperimentConfig cfg = build_config(cmd, o);
  cfg.shots = 0;
  const auto res = run_experiment(cfg);
  print_warnings(res);
  std::cout << "epsilon,p0_exact,fidelity_reference,concurrence,leakage\n";
  auto f = Circuit::format_angle;
  for (const auto& r : res.records) {
    std::cout << f(r.eps) << "," << f(r.p0_exact) << ","
              << f(r.fidelity_reference) << "," << f(r.concurrence) << ","
              << f(r.leakage) << "\n";
  }
  if (!cfg.out_dir.empty()) {
    std::cout << "artifacts written to " << cfg.out_dir << "\n";
  }
  return 0;
}

int cmd_sample(const CLI::App* cmd, const CliOptions& o) {
  ExperimentConfig cfg = build_config(cmd, o);
  if (cfg.shots <= 0) cfg.shots = 100000;
  const auto res = run_experiment(cfg);
  print_warnings(res);
  std::cout << "epsilon,p0_exact,p0_estimate,p0_sigma,discard_fraction\n";
  auto f = Circuit::format_angle;
  for (const auto& r : res.records) {
    std::cout << f(r.eps) << "," << f(r.p0_exact) << "," << f(r.p0_estimate)
              << "," << f(r.p0_sigma) << "," << f(r.discard_fraction) << "\n";
  }
  if (!cfg.out_dir.empty()) {
    std::cout << "artifacts written to " << cfg.out_dir << "\n";
  }
  return 0;
}

int cmd_verify(const CLI::App* cmd, const CliOptions& o) {
  std::vector<double> grid = {0.5e-6, 0.5e-2, 0.1};
  CompilerBackend backend = CompilerBackend::Peephole;
  if (cmd->count("--sweep") || cmd->count("--epsilon") ||
      cmd->count("--backend") || cmd->count("--config")) {
    ExperimentConfig cfg = build_config(cmd, o);
    backend = cfg.backend;
    if (cfg.epsilon || cfg.sweep || cfg.physical) grid = cfg.epsilon_grid();
  }
  const auto rep = verify_invariants(grid, backend);
  std::cout << rep.to_text();
  return rep.all_passed() ? 0 : 3;
}

int cmd_physics(const CLI::App* cmd, const CliOptions& o) {
  if (!cmd->count("--omega") || !cmd->count("--distance")) {
    throw ConfigError("config: physics requires --omega and --distance");
  }
  const PhysicalParams p = [&] {
    try {
      return PhysicalParams(o.omega, o.distance,
                            cmd->count("--time") ? o.time : 0.0);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();
  const double g = coupling_g(p);
  const double eps = epsilon(g, p.t);
  auto f = Circuit::format_angle;
  std::cout << "coupling g = " << f(g) << " Hz\n";
  std::cout << "epsilon = g t = " << f(eps) << "\n";
  std::cout << "warning: for omega = 1e21 Hz, d = 1e-4 m this formula gives "
               "~4.9e-33 Hz, two orders of magnitude below the often-quoted "
               "~1e-31 Hz estimate; the computed value is reported as-is\n";

  const auto s = theory_state(g, p.omega_m);
  std::cout << "theory state: a00 = " << f(std::abs(s(0, 0)))
            << ", a22 = " << f(std::abs(s(2, 2)))
            << ", concurrence = " << f(concurrence(s)) << "\n";
  const auto target = perturbative_target(eps);
  std::cout << "evolved target at epsilon: |a22| = " << f(std::abs(target(2, 2)))
            << ", concurrence = " << f(concurrence(target)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode gravitational entanglement circuit toolkit"};
  app.require_subcommand(1);

  CliOptions o;
  auto* compile = app.add_subcommand("compile", "emit QASM and gate counts");
  auto* simulate = app.add_subcommand("simulate", "noiseless sweep");
  auto* sample = app.add_subcommand("sample", "noisy sampling pipeline");
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  auto* physics = app.add_subcommand("physics", "print coupling and targets");

  for (auto* cmd : {compile, simulate, sample, verify}) {
    add_common_flags(cmd, o);
  }
  add_noise_flags(sample, o);
  physics->add_option("--omega", o.omega, "oscillator angular frequency [Hz]");
  physics->add_option("--distance", o.distance, "oscillator separation [m]");
  physics->add_option("--time", o.time, "evolution time [s]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (compile->parsed()) return cmd_compile(compile, o);
    if (simulate->parsed()) return cmd_simulate(simulate, o);
    if (sample->parsed()) return cmd_sample(sample, o);
    if (verify->parsed()) return cmd_verify(verify, o);
    if (physics->parsed()) return cmd_physics(physics, o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const VerificationError& e) {
    std::cerr << "error: verification failed: " << e.what() << "\n";
    return 3;
  } catch (const PostselectError& e) {
    std::cerr << "error: post-selection degenerate: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

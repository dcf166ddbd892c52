#include "dcg/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string_view>

#include "CLI11.hpp"
#include "dcg/algorithms.hpp"
#include "dcg/config.hpp"
#include "dcg/errors.hpp"
#include "dcg/matcomp.hpp"

namespace dcg::cli {

namespace {

// rho is only derivable where the KKT system can be enumerated by hand.
std::optional<double> derived_rho(const RunConfig& cfg) {
  if (cfg.problem != "quadratic-toy") return std::nullopt;
  return solve_two_node_kkt({ScalarBoxNode{1.0, 0.0, 0.0, 1.0}, ScalarBoxNode{1.0, 1.0, 0.0, 1.0}})
      .rho;
}

void print_record(std::ostream& out, const TraceRecord& r) {
  out << "k = " << r.k << "  f = " << format_double(r.f_value)
      << "  consensus_err = " << format_double(r.consensus_err)
      << "  feas_err = " << format_double(r.feas_err) << '\n';
}

}  // namespace

Verbosity verbosity_from_env() {
  const char* v = std::getenv("DCG_LOG");
  if (!v) return Verbosity::info;
  const std::string_view s(v);
  if (s == "quiet") return Verbosity::quiet;
  if (s == "debug") return Verbosity::debug;
  return Verbosity::info;
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err, Verbosity v) {
  RunConfig cfg;
  std::optional<ConsensusProblem> problem;
  try {
    cfg = read_config_file(config_path);
    problem.emplace(build_problem(cfg));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    err << "problem setup failed: " << e.what() << '\n';
    return solver_error;
  }

  RunOptions opts;
  opts.rho = cfg.rho.value_or(derived_rho(cfg).value_or(0.0));
  try {
    const ReferenceSolution ref = centralized_reference(*problem, 20000);
    opts.f_star = ref.f_star;
    if (v == Verbosity::debug)
      err << "reference f* = " << format_double(ref.f_star)
          << ", certificate = " << format_double(ref.certificate) << '\n';
  } catch (const CapabilityError& e) {
    if (v == Verbosity::debug) err << "no reference optimum: " << e.what() << '\n';
  }

  Trace trace;
  RunHooks hooks;
  if (v == Verbosity::debug)
    hooks.on_record = [&](const IterateState& st) { err << "logged k = " << st.k << '\n'; };
  try {
    trace = run(*problem, cfg.solver(), opts, hooks);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << '\n';
    return solver_error;
  }

  if (!cfg.trace_path.empty()) {
    std::ofstream csv(cfg.trace_path, std::ios::binary);
    if (!csv) {
      err << "cannot write trace file '" << cfg.trace_path << "'\n";
      return solver_error;
    }
    write_trace_csv(csv, trace);
  }
  if (trace.error) {
    err << "solver error: " << *trace.error << '\n';
    return solver_error;
  }
  if (v != Verbosity::quiet && !trace.records.empty()) {
    print_record(out, trace.records.back());
    if (opts.f_star) out << "f* = " << format_double(*opts.f_star) << '\n';
  }
  return ok;
}

int cmd_gen(std::uint64_t seed, std::size_t n, double radius, const std::string& out_path,
            std::ostream& out, std::ostream& err, Verbosity v) {
  std::optional<matcomp::Instance> inst;
  try {
    matcomp::BuildOptions opts;
    opts.n_nodes = n;
    opts.radius = radius;
    inst.emplace(matcomp::build_instance(seed, opts));
  } catch (const ConnectivityError& e) {
    err << "error: " << e.what() << '\n';
    return solver_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "cannot write '" << out_path << "'\n";
    return solver_error;
  }
  matcomp::write_instance(file, *inst);
  if (v != Verbosity::quiet)
    out << "wrote " << out_path << ": " << inst->graph.node_count() << " nodes, "
        << inst->graph.edge_count() << " edges, seed " << inst->seed << '\n';
  return ok;
}

int cmd_check(const std::string& suite, std::ostream& out, std::ostream& err,
              const CheckOptions& opts, Verbosity v) {
  if (suite != "oracles" && suite != "bounds" && suite != "all") {
    err << "unknown suite '" << suite << "' (expected oracles, bounds or all)\n";
    return config_error;
  }
  std::vector<CheckResult> results;
  if (suite != "bounds") results = oracle_suite(opts);
  if (suite != "oracles") {
    auto more = bounds_suite(opts);
    results.insert(results.end(), more.begin(), more.end());
  }
  int failures = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failures;
    if (!r.passed)
      out << "FAIL " << r.name << ": " << r.detail << '\n';
    else if (v != Verbosity::quiet)
      out << "PASS " << r.name << " (" << r.detail << ")\n";
  }
  if (v != Verbosity::quiet)
    out << results.size() - static_cast<std::size_t>(failures) << "/" << results.size()
        << " checks passed\n";
  return failures ? check_failed : ok;
}

int main(int argc, char** argv) {
  CLI::App app{"Distributed conditional-gradient consensus solver"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a solver from a config file");
  run_cmd->add_option("config", config_path, "Config file")->required();

  std::uint64_t seed = 0;
  std::size_t n = 0;
  double radius = 0.0;
  std::string out_path;
  auto* gen_cmd = app.add_subcommand("gen", "Write a matrix-completion instance");
  gen_cmd->add_option("seed", seed)->required();
  gen_cmd->add_option("n", n)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("radius", radius)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("out", out_path)->required();

  std::string suite;
  bool wrong_sign = false;
  auto* check_cmd = app.add_subcommand("check", "Run verification suites");
  check_cmd->add_option("suite", suite, "oracles, bounds or all")->required();
  check_cmd->add_flag("--inject-wrong-sign-lmo", wrong_sign)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  const Verbosity v = verbosity_from_env();
  try {
    if (*run_cmd) return cmd_run(config_path, std::cout, std::cerr, v);
    if (*gen_cmd) return cmd_gen(seed, n, radius, out_path, std::cout, std::cerr, v);
    CheckOptions opts;
    if (wrong_sign) opts.lmo_under_test = [](const SetDescriptor& s, const Vector& c) {
      return lmo(s, Vector(-c));
    };
    return cmd_check(suite, std::cout, std::cerr, opts, v);
  } catch (const ConnectivityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return solver_error;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return solver_error;
  }
}

}  // namespace dcg::cli

#include "nfvrel/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fstream>
#include <optional>

#include "nfvrel/dfg.hpp"
#include "nfvrel/experiments.hpp"
#include "nfvrel/io.hpp"
#include "nfvrel/reliability.hpp"
#include "nfvrel/solver.hpp"

namespace nfvrel::cli {
namespace {

using nlohmann::json;

// Raised by command handlers to exit with a specific status.
struct ExitRequest {
  int code;
  std::string message;
};

void print_json(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

json feasibility_json(const FeasibilityReport& report) {
  json load = json::array();
  for (const auto& l : report.load)
    load.push_back({{"server", l.server}, {"load", l.load}, {"budget", l.budget}});
  json links = json::array();
  for (const auto& l : report.links)
    links.push_back({{"cvnf", l.cvnf}, {"rvnf", l.rvnf}, {"s", l.s}, {"t", l.t}});
  return json{{"feasible", report.feasible()},
              {"load_violations", load},
              {"composition_violations", report.composition},
              {"link_violations", links}};
}

std::pair<Instance, Solution> load_pair(const std::string& instance_path,
                                        const std::string& solution_path) {
  Instance inst = instance_from_json(read_json_file(instance_path));
  Solution sol = solution_from_json(read_json_file(solution_path));
  check_dimensions(inst, sol.cc, sol.embedding);
  return {std::move(inst), std::move(sol)};
}

struct EvaluateArgs {
  std::string instance;
  std::string solution;
  std::optional<std::uint64_t> monte_carlo;
  std::optional<std::uint64_t> seed;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  auto [inst, sol] = load_pair(a.instance, a.solution);
  const FeasibilityReport report = check_feasibility(inst, sol.cc, sol.embedding);
  json doc;
  if (a.monte_carlo) {
    if (!a.seed) throw ExitRequest{kExitUsage, "--monte-carlo requires --seed"};
    const auto mc = monte_carlo_reliability(inst, sol.cc, sol.embedding, *a.monte_carlo, *a.seed);
    doc = {{"method", "monte_carlo"},
           {"reliability", mc.value},
           {"outage", mc.outage()},
           {"stderr", *mc.std_error},
           {"n_samples", *mc.n_samples}};
  } else {
    const auto exact = exact_reliability(inst, sol.cc, sol.embedding);
    doc = {{"method", "exact"},
           {"reliability", exact.value},
           {"outage", exact.outage()},
           {"surrogate", surrogate_objective(inst, sol.cc, sol.embedding)}};
  }
  doc["feasibility"] = feasibility_json(report);
  print_json(out, doc);
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string method = "bcd";
  std::string cc = "joint";
  std::string output;
  int max_iterations = 20;
  double epsilon = 1e-9;
  std::string init = "zero";
  int restarts = 1;
  std::uint64_t node_limit = 50'000'000;
  std::uint64_t seed = 0;
  bool timing = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  if (a.cc == "joint" && a.method == "fge-only") {
    throw ExitRequest{kExitUsage, "--cc joint cannot be combined with --method fge-only"};
  }
  const Instance inst = instance_from_json(read_json_file(a.instance));

  SolverConfig cfg;
  cfg.max_iterations = a.max_iterations;
  cfg.epsilon = a.epsilon;
  cfg.init_strategy = a.init == "zero"          ? InitStrategy::kZero
                      : a.init == "round-robin" ? InitStrategy::kRoundRobin
                                                : InitStrategy::kRandom;
  cfg.restarts = a.restarts;
  cfg.node_limit = a.node_limit;
  cfg.seed = a.seed;

  std::optional<ChainComposition> cc;
  if (a.cc == "ccmin") cc = cc_min(inst.logical);
  if (a.cc == "ccmax") cc = cc_max(inst.logical);

  Solution sol;
  json report;
  bool truncated = false;
  if (a.method == "brute") {
    JointOptimum best = brute_force_joint(inst, cc);
    sol = Solution{std::move(best.embedding), std::move(best.cc)};
    report["surrogate_trace"] = json::array();
    report["iterations"] = 0;
    report["converged"] = true;
    report["nodes_explored"] = 0;
    report["node_limit_hit"] = false;
  } else {
    SolveReport r = cc ? fge_only_solve(inst, *cc, cfg) : bcd_solve(inst, cfg);
    sol = Solution{std::move(r.embedding), std::move(r.cc)};
    report["surrogate_trace"] = r.surrogate_trace;
    report["iterations"] = r.iterations;
    report["converged"] = r.converged;
    report["nodes_explored"] = r.nodes_explored;
    report["node_limit_hit"] = r.node_limit_hit;
    if (a.timing) report["wall_time_s"] = r.wall_time;
    truncated = r.node_limit_hit;
  }
  const double reliability = exact_reliability(inst, sol.cc, sol.embedding).value;
  report["method"] = a.method;
  report["cc"] = a.cc;
  report["reliability"] = reliability;
  report["outage"] = 1.0 - reliability;
  report["surrogate"] = surrogate_objective(inst, sol.cc, sol.embedding);
  report["feasibility"] = feasibility_json(check_feasibility(inst, sol.cc, sol.embedding));

  json solution = solution_to_json(sol);
  report["solution"] = solution;
  if (!a.output.empty()) {
    solution["reliability"] = reliability;
    solution["outage"] = 1.0 - reliability;
    solution["node_limit_hit"] = truncated;
    std::ofstream file(a.output);
    if (!file) throw ExitRequest{kExitUsage, fmt::format("cannot write '{}'", a.output)};
    file << solution.dump(2) << '\n';
  }
  print_json(out, report);
  return truncated ? kExitNodeLimit : kExitOk;
}

struct SweepArgs {
  std::string spec;
  std::string output;
  std::size_t threads = 1;
  bool timing = false;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const SweepSpec spec = sweep_spec_from_json(read_json_file(a.spec));
  validate_sweep_spec(spec);
  SweepOptions options;
  options.threads = a.threads;
  options.record_timing = a.timing;
  options.progress = &err;
  const SweepResult result = run_sweep(spec, options);
  if (a.output.empty()) {
    write_sweep_csv(out, result);
  } else {
    std::ofstream file(a.output);
    if (!file) throw ExitRequest{kExitUsage, fmt::format("cannot write '{}'", a.output)};
    write_sweep_csv(file, result);
  }
  return kExitOk;
}

struct DfgArgs {
  long n_vnfs = 0;
  long n_servers = 0;
  long load = 0;
  double p = 0.0;
};

int cmd_dfg_bound(const DfgArgs& a, std::ostream& out) {
  if (a.n_vnfs <= 0 || a.n_servers <= 0 || a.load <= 0) {
    throw ExitRequest{kExitUsage, "--n-vnfs, --n-servers and --load must be positive"};
  }
  const DfgInstance inst{static_cast<std::size_t>(a.n_vnfs), static_cast<std::size_t>(a.n_servers),
                         a.p, static_cast<int>(a.load)};
  const auto bound = union_bound_for(inst.n_vnfs, inst.n_servers, inst.p, inst.load_budget);
  const double exact =
      dfg_reliability(inst, balanced_embedding(inst.n_vnfs, inst.n_servers, inst.load_budget));
  json doc{{"n_vnfs", inst.n_vnfs},     {"n_servers", inst.n_servers}, {"load", inst.load_budget},
           {"p", inst.p},               {"rate", inst.rate()},         {"applicable", bound.has_value()},
           {"exact_balanced", exact}};
  if (bound) {
    doc["bound"] = *bound;
    doc["vacuous"] = *bound < 0.0;
  }
  print_json(out, doc);
  return kExitOk;
}

struct ValidateArgs {
  std::string instance;
  std::string solution;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  if (a.samples == 0) throw ExitRequest{kExitUsage, "--samples must be at least 1"};
  auto [inst, sol] = load_pair(a.instance, a.solution);
  const double exact = exact_reliability(inst, sol.cc, sol.embedding).value;
  const auto mc = monte_carlo_reliability(inst, sol.cc, sol.embedding, a.samples, a.seed);
  const double diff = std::abs(exact - mc.value);
  const bool pass = diff <= 3.0 * *mc.std_error;
  print_json(out, json{{"exact", exact},
                       {"monte_carlo", mc.value},
                       {"stderr", *mc.std_error},
                       {"n_samples", a.samples},
                       {"abs_diff", diff},
                       {"pass", pass}});
  return pass ? kExitOk : kExitValidationFail;
}

struct GenTopologyArgs {
  long n_servers = 0;
  double edge_prob = 0.0;
  std::uint64_t seed = 0;
  std::string self_links = "on";
};

int cmd_gen_topology(const GenTopologyArgs& a, std::ostream& out) {
  if (a.n_servers <= 0 || a.n_servers > static_cast<long>(kMaxServers)) {
    throw ExitRequest{kExitUsage, fmt::format("--n-servers must be in [1, {}]", kMaxServers)};
  }
  if (!(a.edge_prob >= 0.0 && a.edge_prob <= 1.0)) {
    throw ExitRequest{kExitUsage, "--edge-prob must be in [0, 1]"};
  }
  const TopologyDistribution dist{
      static_cast<std::size_t>(a.n_servers), a.edge_prob,
      a.self_links == "on" ? SelfLinkPolicy::kAlwaysOn : SelfLinkPolicy::kAlwaysOff, a.seed};
  print_json(out, topology_to_json(sample_topology(dist)));
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEnumerationLimitExceeded: return kExitEnumeration;
    default: return kExitUsage;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reliability analysis and placement for virtualized network services", "nfvrel"};
  app.require_subcommand(1);

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Reliability of a given solution");
  evaluate_cmd->add_option("--instance", evaluate.instance, "Instance JSON")->required();
  evaluate_cmd->add_option("--solution", evaluate.solution, "Solution JSON")->required();
  evaluate_cmd->add_option("--monte-carlo", evaluate.monte_carlo,
                           "Estimate with N Monte Carlo samples instead of enumerating");
  evaluate_cmd->add_option("--seed", evaluate.seed, "Monte Carlo seed");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Optimize composition and embedding");
  solve_cmd->add_option("--instance", solve.instance, "Instance JSON")->required();
  solve_cmd->add_option("--method", solve.method)
      ->check(CLI::IsMember({"bcd", "brute", "fge-only"}));
  solve_cmd->add_option("--cc", solve.cc)->check(CLI::IsMember({"joint", "ccmin", "ccmax"}));
  solve_cmd->add_option("--output", solve.output, "Where to write the solution JSON");
  solve_cmd->add_option("--max-iterations", solve.max_iterations)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--epsilon", solve.epsilon)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--init", solve.init)
      ->check(CLI::IsMember({"zero", "round-robin", "random"}));
  solve_cmd->add_option("--restarts", solve.restarts)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--node-limit", solve.node_limit)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", solve.seed);
  solve_cmd->add_flag("--timing", solve.timing, "Report wall time (breaks byte-identical output)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  sweep_cmd->add_option("--spec", sweep.spec, "Sweep spec JSON")->required();
  sweep_cmd->add_option("--output", sweep.output, "CSV path (default stdout)");
  sweep_cmd->add_option("--threads", sweep.threads)->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--timing", sweep.timing, "Record wall times in the CSV");

  DfgArgs dfg;
  auto* dfg_cmd = app.add_subcommand("dfg-bound", "Union bound for a disconnected forwarding graph");
  dfg_cmd->add_option("--n-vnfs", dfg.n_vnfs)->required();
  dfg_cmd->add_option("--n-servers", dfg.n_servers)->required();
  dfg_cmd->add_option("--load", dfg.load)->required();
  dfg_cmd->add_option("--p", dfg.p)->required()->check(CLI::Range(0.0, 1.0));

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Compare exact and Monte Carlo reliability");
  validate_cmd->add_option("--instance", validate.instance)->required();
  validate_cmd->add_option("--solution", validate.solution)->required();
  validate_cmd->add_option("--samples", validate.samples)->required();
  validate_cmd->add_option("--seed", validate.seed)->required();

  GenTopologyArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-topology", "Sample a random physical topology");
  gen_cmd->add_option("--n-servers", gen.n_servers)->required();
  gen_cmd->add_option("--edge-prob", gen.edge_prob)->required();
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("--self-links", gen.self_links)->check(CLI::IsMember({"on", "off"}));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(evaluate, out);
    if (*solve_cmd) return cmd_solve(solve, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*dfg_cmd) return cmd_dfg_bound(dfg, out);
    if (*validate_cmd) return cmd_validate(validate, out);
    if (*gen_cmd) return cmd_gen_topology(gen, out);
  } catch (const ExitRequest& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::kEnumerationLimitExceeded) {
      err << "hint: pass --monte-carlo N (evaluate) or use a smaller instance\n";
    }
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace nfvrel::cli

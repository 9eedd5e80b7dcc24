#include "nfvrel/experiments.hpp"

#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "nfvrel/dfg.hpp"
#include "nfvrel/random.hpp"
#include "nfvrel/reliability.hpp"

namespace nfvrel {
namespace {

struct TrialOutcome {
  bool ok = false;
  double outage = 0.0;
  double iterations = 0.0;
  double wall_time = 0.0;
};

int integral_value(double value, std::string_view what) {
  if (value != std::floor(value) || value < 0 || value > 1e6) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} grid value {} is not a nonnegative integer", what, value));
  }
  return static_cast<int>(value);
}

SweepSpec at_grid_point(const SweepSpec& spec, std::size_t grid_index) {
  SweepSpec point = spec;
  const double value = spec.grid.at(grid_index);
  switch (spec.param) {
    case SweepParam::kLoadBudget: point.load_budget = integral_value(value, "load_budget"); break;
    case SweepParam::kEdgeProb: point.edge_prob = value; break;
    case SweepParam::kServers:
      point.n_servers = static_cast<std::size_t>(integral_value(value, "n_servers"));
      break;
    case SweepParam::kFailureProb: point.p = value; break;
  }
  return point;
}

TrialOutcome run_method(const SweepSpec& point, const Instance& inst, SweepMethod method,
                        std::uint64_t trial_seed, bool record_timing) {
  TrialOutcome out;
  const std::size_t n_vnfs = point.n_cvnf + point.n_rvnf;
  switch (method) {
    case SweepMethod::kDfgBound: {
      const auto bound = union_bound_for(n_vnfs, point.n_servers, point.p, point.load_budget);
      if (!bound) return out;
      out.outage = 1.0 - *bound;
      out.ok = true;
      return out;
    }
    case SweepMethod::kDfgBalanced: {
      const DfgInstance dfg{n_vnfs, point.n_servers, point.p, point.load_budget};
      out.outage = 1.0 - dfg_reliability(dfg, balanced_embedding(n_vnfs, point.n_servers,
                                                                 point.load_budget));
      out.ok = true;
      return out;
    }
    default:
      break;
  }

  SolverConfig cfg = point.solver;
  cfg.seed = mix_seed(trial_seed, static_cast<std::uint64_t>(method) + 1);
  SolveReport report;
  if (method == SweepMethod::kJoint) {
    report = bcd_solve(inst, cfg);
  } else if (method == SweepMethod::kCCminFGE) {
    report = fge_only_solve(inst, cc_min(inst.logical), cfg);
  } else {
    report = fge_only_solve(inst, cc_max(inst.logical), cfg);
  }
  if (!check_feasibility(inst, report.cc, report.embedding).feasible()) return out;
  out.ok = true;
  out.outage = report.outage();
  out.iterations = report.iterations;
  out.wall_time = record_timing ? report.wall_time : 0.0;
  return out;
}

}  // namespace

PhysicalTopology sample_topology(const TopologyDistribution& dist) {
  if (!(dist.edge_prob >= 0.0 && dist.edge_prob <= 1.0)) {
    throw Error(ErrorCode::kProbabilityOutOfRange,
                fmt::format("edge probability {} is outside [0, 1]", dist.edge_prob));
  }
  if (dist.n_servers == 0 || dist.n_servers > kMaxServers) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("n_servers must be in [1, {}], got {}", kMaxServers, dist.n_servers));
  }
  std::mt19937_64 rng(dist.seed);
  PhysicalTopology topo{dist.n_servers, BoolMatrix(dist.n_servers, dist.n_servers),
                        dist.self_link_policy};
  for (std::size_t s = 0; s < dist.n_servers; ++s) {
    for (std::size_t t = s + 1; t < dist.n_servers; ++t) {
      const bool edge = uniform01(rng) < dist.edge_prob;
      topo.adjacency.set(s, t, edge);
      topo.adjacency.set(t, s, edge);
    }
    topo.adjacency.set(s, s, dist.self_link_policy == SelfLinkPolicy::kAlwaysOn);
  }
  return topo;
}

std::string_view sweep_method_name(SweepMethod method) {
  switch (method) {
    case SweepMethod::kJoint: return "Joint";
    case SweepMethod::kCCminFGE: return "CCminFGE";
    case SweepMethod::kCCmaxFGE: return "CCmaxFGE";
    case SweepMethod::kDfgBound: return "DfgBound";
    case SweepMethod::kDfgBalanced: return "DfgBalanced";
  }
  return "Joint";
}

SweepMethod parse_sweep_method(std::string_view name) {
  for (auto m : {SweepMethod::kJoint, SweepMethod::kCCminFGE, SweepMethod::kCCmaxFGE,
                 SweepMethod::kDfgBound, SweepMethod::kDfgBalanced}) {
    if (sweep_method_name(m) == name) return m;
  }
  throw Error(ErrorCode::kParseError, fmt::format("methods: unknown method '{}'", name));
}

std::string_view sweep_param_name(SweepParam param) {
  switch (param) {
    case SweepParam::kLoadBudget: return "load_budget";
    case SweepParam::kEdgeProb: return "edge_prob";
    case SweepParam::kServers: return "n_servers";
    case SweepParam::kFailureProb: return "p";
  }
  return "load_budget";
}

SweepParam parse_sweep_param(std::string_view name) {
  for (auto p : {SweepParam::kLoadBudget, SweepParam::kEdgeProb, SweepParam::kServers,
                 SweepParam::kFailureProb}) {
    if (sweep_param_name(p) == name) return p;
  }
  throw Error(ErrorCode::kParseError, fmt::format("sweep.param: unknown parameter '{}'", name));
}

void validate_sweep_spec(const SweepSpec& spec) {
  if (spec.grid.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
  if (spec.n_topologies == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_topologies must be at least 1");
  }
  if (spec.methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no methods given");
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    const SweepSpec point = at_grid_point(spec, g);
    if (!(point.edge_prob >= 0.0 && point.edge_prob <= 1.0)) {
      throw Error(ErrorCode::kProbabilityOutOfRange,
                  fmt::format("edge_prob {} is outside [0, 1]", point.edge_prob));
    }
    if (point.n_servers > kEnumerationLimit) {
      throw Error(ErrorCode::kEnumerationLimitExceeded,
                  fmt::format("n_servers {} exceeds the enumeration limit", point.n_servers));
    }
    sweep_instance(spec, g, 0);  // surfaces logical-layer errors up front
  }
}

Instance sweep_instance(const SweepSpec& spec, std::size_t grid_index, std::size_t trial) {
  const SweepSpec point = at_grid_point(spec, grid_index);
  Instance inst;
  inst.topology = sample_topology({point.n_servers, point.edge_prob, point.self_link_policy,
                                   mix_seed(spec.seed, grid_index, trial)});
  inst.failures = FailureModel::uniform(point.n_servers, point.p);
  inst.logical = LogicalLayer{point.n_cvnf, point.n_rvnf, point.capacities};
  inst.load_budget = point.load_budget;
  return validate_instance(std::move(inst));
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  validate_sweep_spec(spec);
  const std::size_t n_grid = spec.grid.size();
  const std::size_t n_trials = spec.n_topologies;
  const std::size_t n_methods = spec.methods.size();
  std::vector<TrialOutcome> outcomes(n_grid * n_trials * n_methods);

  std::mutex log_mutex;
  auto log = [&](const std::string& line) {
    if (options.progress == nullptr) return;
    std::lock_guard lock(log_mutex);
    *options.progress << line << '\n';
  };

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  const std::size_t n_tasks = n_grid * n_trials;
  auto worker = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const std::size_t g = task / n_trials;
      const std::size_t t = task % n_trials;
      const SweepSpec point = at_grid_point(spec, g);
      const std::uint64_t trial_seed = mix_seed(spec.seed, g, t);
      std::optional<Instance> inst;
      try {
        inst = sweep_instance(spec, g, t);
      } catch (const Error& e) {
        log(fmt::format("grid {} trial {}: {}", g, t, e.what()));
      }
      for (std::size_t m = 0; m < n_methods && inst; ++m) {
        try {
          outcomes[task * n_methods + m] =
              run_method(point, *inst, spec.methods[m], trial_seed, options.record_timing);
        } catch (const Error& e) {
          log(fmt::format("grid {} trial {} {}: {}", g, t, sweep_method_name(spec.methods[m]),
                          e.what()));
        }
      }
      const std::size_t finished = ++done;
      if (finished % std::max<std::size_t>(1, n_tasks / 10) == 0 || finished == n_tasks) {
        log(fmt::format("sweep: {}/{} trials", finished, n_tasks));
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(options.threads, n_tasks));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  SweepResult result;
  for (std::size_t g = 0; g < n_grid; ++g) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      double sum = 0.0, sum_sq = 0.0, iters = 0.0, wall = 0.0;
      std::size_t ok = 0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const TrialOutcome& o = outcomes[(g * n_trials + t) * n_methods + m];
        if (!o.ok) continue;
        ++ok;
        sum += o.outage;
        sum_sq += o.outage * o.outage;
        iters += o.iterations;
        wall += o.wall_time;
      }
      SweepRow row{spec.param, spec.grid[g], spec.methods[m],
                   std::numeric_limits<double>::quiet_NaN(), 0.0, ok, n_trials - ok, 0.0, 0.0};
      if (ok > 0) {
        const double n = static_cast<double>(ok);
        row.mean_outage = sum / n;
        if (ok > 1) {
          const double var = std::max(0.0, (sum_sq - n * row.mean_outage * row.mean_outage) / (n - 1));
          row.std_error = std::sqrt(var / n);
        }
        row.mean_iters = iters / n;
        row.mean_wall_time_s = wall / n;
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "param_name,param_value,method,mean_outage,stderr,n_trials,n_failed,mean_iters,"
         "mean_wall_time_s\n";
  for (const SweepRow& r : result.rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", sweep_param_name(r.param), r.param_value,
               sweep_method_name(r.method), r.mean_outage, r.std_error, r.n_trials, r.n_failed,
               r.mean_iters, r.mean_wall_time_s);
  }
}

std::vector<DfgSweepRow> dfg_sweep(std::size_t n_vnfs, std::size_t n_servers, int load, double p,
                                   DfgAxis axis, const std::vector<int>& grid) {
  std::vector<DfgSweepRow> rows;
  for (int value : grid) {
    DfgInstance inst{n_vnfs, n_servers, p, load};
    if (axis == DfgAxis::kLoad) {
      inst.load_budget = value;
    } else {
      inst.n_servers = static_cast<std::size_t>(value);
    }
    const DfgEmbedding emb = balanced_embedding(inst.n_vnfs, inst.n_servers, inst.load_budget);
    rows.push_back({inst.n_vnfs, inst.n_servers, inst.load_budget,
                    union_bound_for(inst.n_vnfs, inst.n_servers, p, inst.load_budget),
                    dfg_reliability(inst, emb)});
  }
  return rows;
}

}  // namespace nfvrel

#pragma once

// Random topologies, parameter sweeps and their CSV tables.
//
// Trial (grid index g, trial index i) of a sweep with seed S uses
// mix_seed(S, g, i) for its topology and any randomized solver start, so the
// table is identical however trials are scheduled across threads.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nfvrel/model.hpp"
#include "nfvrel/solver.hpp"

namespace nfvrel {

struct TopologyDistribution {
  std::size_t n_servers = 0;
  double edge_prob = 0.0;  // p^P, per unordered server pair
  SelfLinkPolicy self_link_policy = SelfLinkPolicy::kAlwaysOn;
  std::uint64_t seed = 0;
};

PhysicalTopology sample_topology(const TopologyDistribution& dist);

enum class SweepMethod { kJoint, kCCminFGE, kCCmaxFGE, kDfgBound, kDfgBalanced };

std::string_view sweep_method_name(SweepMethod method);
SweepMethod parse_sweep_method(std::string_view name);

enum class SweepParam { kLoadBudget, kEdgeProb, kServers, kFailureProb };

std::string_view sweep_param_name(SweepParam param);
SweepParam parse_sweep_param(std::string_view name);

struct SweepSpec {
  // Base parameters; the swept one is overridden per grid point.
  double p = 0.15;
  std::size_t n_servers = 4;
  std::size_t n_cvnf = 2;
  std::size_t n_rvnf = 4;
  std::vector<int> capacities{4, 4};
  int load_budget = 3;
  double edge_prob = 0.8;
  SelfLinkPolicy self_link_policy = SelfLinkPolicy::kAlwaysOn;

  SweepParam param = SweepParam::kLoadBudget;
  std::vector<double> grid;
  std::size_t n_topologies = 100;
  std::vector<SweepMethod> methods{SweepMethod::kJoint, SweepMethod::kCCminFGE,
                                   SweepMethod::kCCmaxFGE};
  std::uint64_t seed = 0;
  SolverConfig solver;
};

// Throws kInvalidArgument (empty grid, no trials, ...) before any work.
void validate_sweep_spec(const SweepSpec& spec);

struct SweepRow {
  SweepParam param;
  double param_value;
  SweepMethod method;
  double mean_outage;  // NaN when every trial failed
  double std_error;
  std::size_t n_trials;  // successful trials
  std::size_t n_failed;
  double mean_iters;
  double mean_wall_time_s;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid-major, methods in spec order
};

struct SweepOptions {
  std::size_t threads = 1;
  bool record_timing = false;  // wall times are reported as 0 otherwise
  std::ostream* progress = nullptr;
};

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

void write_sweep_csv(std::ostream& out, const SweepResult& result);

// Instance for one trial of a sweep.
Instance sweep_instance(const SweepSpec& spec, std::size_t grid_index, std::size_t trial);

enum class DfgAxis { kLoad, kServers };

struct DfgSweepRow {
  std::size_t n_vnfs;
  std::size_t n_servers;
  int load;
  std::optional<double> bound;  // absent when r * L is not an integer
  double exact_balanced;
};

// Union bound and exact reliability of the balanced embedding along one axis,
// the other held at `n_servers` / `load`.
std::vector<DfgSweepRow> dfg_sweep(std::size_t n_vnfs, std::size_t n_servers, int load, double p,
                                   DfgAxis axis, const std::vector<int>& grid);

}  // namespace nfvrel

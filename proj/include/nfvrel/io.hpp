#pragma once

// JSON documents for instances, solutions and sweep specs. Parse failures
// throw Error(kParseError) naming the offending field.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nfvrel/experiments.hpp"
#include "nfvrel/model.hpp"

namespace nfvrel {

struct Solution {
  Embedding embedding;
  ChainComposition cc;
};

// Keys: n_servers, adjacency, self_link_policy, failure_probs, n_cvnf,
// n_rvnf, capacities, load_budget. The result is validated.
Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& inst);

// Keys: x_c, x_r, cc_assignment. Other keys (metrics) are ignored.
Solution solution_from_json(const nlohmann::json& doc);
nlohmann::json solution_to_json(const Solution& sol);

nlohmann::json topology_to_json(const PhysicalTopology& topo);

// Keys mirror SweepSpec: p, n_servers, n_cvnf, n_rvnf, capacities,
// load_budget, edge_prob, self_link_policy, sweep {param, values},
// n_topologies, methods, seed, and an optional solver object
// {max_iterations, epsilon, init, restarts, node_limit}.
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace nfvrel

#include "nfvrel/io.hpp"

#include <fmt/format.h>
#include <fstream>

namespace nfvrel {
namespace {

using nlohmann::json;

const json& field(const json& doc, const char* key) {
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "document is not a JSON object");
  auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorCode::kParseError, fmt::format("missing field '{}'", key));
  return *it;
}

// json::get with the failing key in the message.
template <typename T>
T get_as(const json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("field '{}': {}", key, e.what()));
  }
}

template <typename T>
T get_field(const json& doc, const char* key) {
  return get_as<T>(field(doc, key), key);
}

std::size_t get_count(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::kParseError, fmt::format("field '{}' must be a nonnegative integer", key));
  }
  return v.get<std::size_t>();
}

BoolMatrix get_matrix(const json& doc, const char* key) {
  const auto rows = get_field<std::vector<std::vector<int>>>(doc, key);
  try {
    return BoolMatrix::from_rows(rows);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, fmt::format("field '{}': {}", key, e.what()));
  }
}

InitStrategy parse_init(std::string_view name) {
  if (name == "zero") return InitStrategy::kZero;
  if (name == "round-robin") return InitStrategy::kRoundRobin;
  if (name == "random") return InitStrategy::kRandom;
  throw Error(ErrorCode::kParseError,
              fmt::format("solver.init: unknown value '{}' (zero, round-robin, random)", name));
}

}  // namespace

Instance instance_from_json(const json& doc) {
  Instance inst;
  inst.topology.n_servers = get_count(doc, "n_servers");
  inst.topology.adjacency = get_matrix(doc, "adjacency");
  if (inst.topology.adjacency.rows() == 0 && inst.topology.n_servers > 0) {
    throw Error(ErrorCode::kParseError, "field 'adjacency' is empty");
  }
  inst.topology.self_link_policy =
      parse_self_link_policy(get_field<std::string>(doc, "self_link_policy"));
  inst.failures.p = get_field<std::vector<double>>(doc, "failure_probs");
  inst.logical.n_cvnf = get_count(doc, "n_cvnf");
  inst.logical.n_rvnf = get_count(doc, "n_rvnf");
  inst.logical.capacities = get_field<std::vector<int>>(doc, "capacities");
  inst.load_budget = get_field<int>(doc, "load_budget");
  return validate_instance(std::move(inst));
}

json instance_to_json(const Instance& inst) {
  return json{{"n_servers", inst.topology.n_servers},
              {"adjacency", inst.topology.adjacency.to_rows()},
              {"self_link_policy", self_link_policy_name(inst.topology.self_link_policy)},
              {"failure_probs", inst.failures.p},
              {"n_cvnf", inst.logical.n_cvnf},
              {"n_rvnf", inst.logical.n_rvnf},
              {"capacities", inst.logical.capacities},
              {"load_budget", inst.load_budget}};
}

Solution solution_from_json(const json& doc) {
  Solution sol;
  sol.embedding.x_c = get_matrix(doc, "x_c");
  sol.embedding.x_r = get_matrix(doc, "x_r");
  sol.cc.assignment = get_field<std::vector<std::size_t>>(doc, "cc_assignment");
  return sol;
}

json solution_to_json(const Solution& sol) {
  return json{{"x_c", sol.embedding.x_c.to_rows()},
              {"x_r", sol.embedding.x_r.to_rows()},
              {"cc_assignment", sol.cc.assignment}};
}

json topology_to_json(const PhysicalTopology& topo) {
  return json{{"n_servers", topo.n_servers},
              {"adjacency", topo.adjacency.to_rows()},
              {"self_link_policy", self_link_policy_name(topo.self_link_policy)}};
}

SweepSpec sweep_spec_from_json(const json& doc) {
  SweepSpec spec;
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "sweep spec is not a JSON object");
  if (doc.contains("p")) spec.p = get_field<double>(doc, "p");
  if (doc.contains("n_servers")) spec.n_servers = get_count(doc, "n_servers");
  if (doc.contains("n_cvnf")) spec.n_cvnf = get_count(doc, "n_cvnf");
  if (doc.contains("n_rvnf")) spec.n_rvnf = get_count(doc, "n_rvnf");
  if (doc.contains("capacities")) spec.capacities = get_field<std::vector<int>>(doc, "capacities");
  if (doc.contains("load_budget")) spec.load_budget = get_field<int>(doc, "load_budget");
  if (doc.contains("edge_prob")) spec.edge_prob = get_field<double>(doc, "edge_prob");
  if (doc.contains("self_link_policy")) {
    spec.self_link_policy = parse_self_link_policy(get_field<std::string>(doc, "self_link_policy"));
  }
  const json& sweep = field(doc, "sweep");
  spec.param = parse_sweep_param(get_field<std::string>(sweep, "param"));
  spec.grid = get_field<std::vector<double>>(sweep, "values");
  if (doc.contains("n_topologies")) spec.n_topologies = get_count(doc, "n_topologies");
  if (doc.contains("methods")) {
    spec.methods.clear();
    for (const auto& name : get_field<std::vector<std::string>>(doc, "methods"))
      spec.methods.push_back(parse_sweep_method(name));
  }
  spec.seed = get_field<std::uint64_t>(doc, "seed");
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (s.contains("max_iterations")) spec.solver.max_iterations = get_field<int>(s, "max_iterations");
    if (s.contains("epsilon")) spec.solver.epsilon = get_field<double>(s, "epsilon");
    if (s.contains("init")) spec.solver.init_strategy = parse_init(get_field<std::string>(s, "init"));
    if (s.contains("restarts")) spec.solver.restarts = get_field<int>(s, "restarts");
    if (s.contains("node_limit")) spec.solver.node_limit = get_field<std::uint64_t>(s, "node_limit");
  }
  return spec;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, fmt::format("'{}': {}", path.string(), e.what()));
  }
}

}  // namespace nfvrel

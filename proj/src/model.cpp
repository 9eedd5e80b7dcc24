#include "nfvrel/model.hpp"

#include <fmt/format.h>

namespace nfvrel {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kAsymmetricAdjacency: return "AsymmetricAdjacency";
    case ErrorCode::kCapacityDeficit: return "CapacityDeficit";
    case ErrorCode::kProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::kInvalidLogicalLayer: return "InvalidLogicalLayer";
    case ErrorCode::kInvalidChainComposition: return "InvalidChainComposition";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEnumerationLimitExceeded: return "EnumerationLimitExceeded";
    case ErrorCode::kNonIntegerReplication: return "NonIntegerReplication";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

BoolMatrix BoolMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  BoolMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("row {} has {} entries, expected {}", r, rows[r].size(), cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c] != 0 && rows[r][c] != 1) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("entry ({}, {}) is {}, expected 0 or 1", r, c, rows[r][c]));
      }
      m.set(r, c, rows[r][c] == 1);
    }
  }
  return m;
}

ServerMask BoolMatrix::row_mask(std::size_t r) const {
  ServerMask mask = 0;
  const std::uint8_t* row = bits_.data() + r * cols_;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (row[c]) mask |= ServerMask{1} << c;
  }
  return mask;
}

void BoolMatrix::set_row_mask(std::size_t r, ServerMask mask) {
  for (std::size_t c = 0; c < cols_; ++c) set(r, c, (mask >> c) & 1U);
}

std::size_t BoolMatrix::row_count(std::size_t r) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols_; ++c) n += bits_[r * cols_ + c];
  return n;
}

std::size_t BoolMatrix::col_count(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_; ++r) n += bits_[r * cols_ + c];
  return n;
}

std::size_t BoolMatrix::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::vector<std::vector<int>> BoolMatrix::to_rows() const {
  std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_, 0));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r][c] = (*this)(r, c) ? 1 : 0;
  return out;
}

std::string_view self_link_policy_name(SelfLinkPolicy policy) {
  switch (policy) {
    case SelfLinkPolicy::kAlwaysOn: return "AlwaysOn";
    case SelfLinkPolicy::kAlwaysOff: return "AlwaysOff";
    case SelfLinkPolicy::kAsGiven: return "AsGiven";
  }
  return "AlwaysOn";
}

SelfLinkPolicy parse_self_link_policy(std::string_view name) {
  if (name == "AlwaysOn") return SelfLinkPolicy::kAlwaysOn;
  if (name == "AlwaysOff") return SelfLinkPolicy::kAlwaysOff;
  if (name == "AsGiven") return SelfLinkPolicy::kAsGiven;
  throw Error(ErrorCode::kParseError,
              fmt::format("self_link_policy: unknown value '{}' "
                          "(expected AlwaysOn, AlwaysOff or AsGiven)", name));
}

std::size_t PhysicalTopology::degree(std::size_t s) const {
  std::size_t d = 0;
  for (std::size_t t = 0; t < n_servers; ++t) d += (t != s && adjacency(s, t)) ? 1 : 0;
  return d;
}

PhysicalTopology PhysicalTopology::complete(std::size_t n_servers, SelfLinkPolicy policy) {
  PhysicalTopology topo{n_servers, BoolMatrix(n_servers, n_servers, true), policy};
  if (policy == SelfLinkPolicy::kAlwaysOff) {
    for (std::size_t s = 0; s < n_servers; ++s) topo.adjacency.set(s, s, false);
  }
  return topo;
}

long LogicalLayer::total_capacity() const {
  long total = 0;
  for (int c : capacities) total += c;
  return total;
}

ChainComposition ChainComposition::from_assignment(std::vector<std::size_t> assignment,
                                                   const LogicalLayer& logical) {
  if (assignment.size() != logical.n_rvnf) {
    throw Error(ErrorCode::kInvalidChainComposition,
                fmt::format("chain composition covers {} RVNFs, instance has {}",
                            assignment.size(), logical.n_rvnf));
  }
  std::vector<long> counts(logical.n_cvnf, 0);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    if (assignment[v] >= logical.n_cvnf) {
      throw Error(ErrorCode::kInvalidChainComposition,
                  fmt::format("RVNF {} assigned to CVNF {}, only {} CVNFs exist", v,
                              assignment[v], logical.n_cvnf));
    }
    ++counts[assignment[v]];
  }
  for (std::size_t u = 0; u < logical.n_cvnf; ++u) {
    if (counts[u] > logical.capacities[u]) {
      throw Error(ErrorCode::kInvalidChainComposition,
                  fmt::format("CVNF {} monitors {} RVNFs, capacity is {}", u, counts[u],
                              logical.capacities[u]));
    }
  }
  return ChainComposition{std::move(assignment)};
}

std::vector<std::size_t> ChainComposition::monitored_counts(std::size_t n_cvnf) const {
  std::vector<std::size_t> counts(n_cvnf, 0);
  for (auto u : assignment)
    if (u < n_cvnf) ++counts[u];
  return counts;
}

ServerMask FailureVector::mask() const {
  ServerMask m = 0;
  for (std::size_t s = 0; s < bits.size(); ++s)
    if (bits[s]) m |= ServerMask{1} << s;
  return m;
}

FailureVector FailureVector::from_mask(ServerMask mask, std::size_t n_servers) {
  FailureVector f{std::vector<bool>(n_servers, false)};
  for (std::size_t s = 0; s < n_servers; ++s) f.bits[s] = (mask >> s) & 1U;
  return f;
}

Instance validate_instance(Instance inst) {
  const std::size_t n = inst.topology.n_servers;
  if (n == 0 || n > kMaxServers) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("n_servers must be in [1, {}], got {}", kMaxServers, n));
  }
  auto& adj = inst.topology.adjacency;
  if (adj.rows() != n || adj.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("adjacency is {}x{}, expected {}x{}", adj.rows(), adj.cols(), n, n));
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      if (adj(s, t) != adj(t, s)) {
        throw Error(ErrorCode::kAsymmetricAdjacency,
                    fmt::format("adjacency is not symmetric at ({}, {})", s, t));
      }
    }
  }
  if (inst.topology.self_link_policy != SelfLinkPolicy::kAsGiven) {
    const bool on = inst.topology.self_link_policy == SelfLinkPolicy::kAlwaysOn;
    for (std::size_t s = 0; s < n; ++s) adj.set(s, s, on);
  }

  if (inst.failures.p.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("failure_probs has {} entries, expected {}", inst.failures.p.size(), n));
  }
  for (std::size_t s = 0; s < n; ++s) {
    const double p = inst.failures.p[s];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kProbabilityOutOfRange,
                  fmt::format("failure_probs[{}] = {} is outside [0, 1]", s, p));
    }
  }

  const auto& logical = inst.logical;
  if (logical.capacities.size() != logical.n_cvnf) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("capacities has {} entries, expected n_cvnf = {}",
                            logical.capacities.size(), logical.n_cvnf));
  }
  if (logical.n_cvnf > logical.n_rvnf) {
    throw Error(ErrorCode::kInvalidLogicalLayer,
                fmt::format("n_cvnf = {} exceeds n_rvnf = {}", logical.n_cvnf, logical.n_rvnf));
  }
  for (std::size_t u = 0; u < logical.n_cvnf; ++u) {
    if (logical.capacities[u] <= 0) {
      throw Error(ErrorCode::kInvalidLogicalLayer,
                  fmt::format("capacities[{}] = {} must be positive", u, logical.capacities[u]));
    }
  }
  if (logical.total_capacity() < static_cast<long>(logical.n_rvnf)) {
    throw Error(ErrorCode::kCapacityDeficit,
                fmt::format("total CVNF capacity {} is below n_rvnf = {}",
                            logical.total_capacity(), logical.n_rvnf));
  }
  if (inst.load_budget < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("load_budget must be nonnegative, got {}", inst.load_budget));
  }
  return inst;
}

void check_dimensions(const Instance& inst, const ChainComposition& cc, const Embedding& emb) {
  const std::size_t n = inst.n_servers();
  const auto& logical = inst.logical;
  if (emb.x_c.rows() != logical.n_cvnf || emb.x_c.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("x_c is {}x{}, expected {}x{}", emb.x_c.rows(), emb.x_c.cols(),
                            logical.n_cvnf, n));
  }
  if (emb.x_r.rows() != logical.n_rvnf || emb.x_r.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("x_r is {}x{}, expected {}x{}", emb.x_r.rows(), emb.x_r.cols(),
                            logical.n_rvnf, n));
  }
  if (cc.assignment.size() != logical.n_rvnf) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("cc_assignment has {} entries, expected {}", cc.assignment.size(),
                            logical.n_rvnf));
  }
  for (std::size_t v = 0; v < cc.assignment.size(); ++v) {
    if (cc.assignment[v] >= logical.n_cvnf) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  fmt::format("cc_assignment[{}] = {} is not a CVNF index", v, cc.assignment[v]));
    }
  }
}

std::size_t server_load(const Embedding& emb, std::size_t s) {
  if (s >= emb.x_c.cols() || s >= emb.x_r.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, fmt::format("server {} out of range", s));
  }
  return emb.x_c.col_count(s) + emb.x_r.col_count(s);
}

FeasibilityReport check_feasibility(const Instance& inst, const ChainComposition& cc,
                                    const Embedding& emb) {
  check_dimensions(inst, cc, emb);
  FeasibilityReport report;
  const std::size_t n = inst.n_servers();

  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t load = server_load(emb, s);
    if (static_cast<long>(load) > inst.load_budget) {
      report.load.push_back({s, load, inst.load_budget});
    }
  }

  const auto counts = cc.monitored_counts(inst.logical.n_cvnf);
  for (std::size_t u = 0; u < inst.logical.n_cvnf; ++u) {
    if (static_cast<long>(counts[u]) > inst.logical.capacities[u]) {
      report.composition.push_back(fmt::format("CVNF {} monitors {} RVNFs, capacity {}", u,
                                               counts[u], inst.logical.capacities[u]));
    }
  }

  for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v) {
    const std::size_t u = cc.cvnf_of(v);
    for (std::size_t s = 0; s < n; ++s) {
      if (!emb.x_c(u, s)) continue;
      for (std::size_t t = 0; t < n; ++t) {
        if (emb.x_r(v, t) && !inst.topology.linked(s, t)) report.links.push_back({u, v, s, t});
      }
    }
  }
  return report;
}

}  // namespace nfvrel

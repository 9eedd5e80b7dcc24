#pragma once

// Instance, decision and feasibility types shared by every module.
//
// Indices are dense: CVNFs 0..n_cvnf-1, RVNFs 0..n_rvnf-1, servers
// 0..n_servers-1. Server sets are packed into 64-bit masks, which caps the
// number of servers at 64.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nfvrel/error.hpp"

namespace nfvrel {

using ServerMask = std::uint64_t;

inline constexpr std::size_t kMaxServers = 64;

// Dense row-major 0/1 matrix.
class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(std::size_t rows, std::size_t cols, bool value = false)
      : rows_(rows), cols_(cols), bits_(rows * cols, value ? 1 : 0) {}

  static BoolMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool operator()(std::size_t r, std::size_t c) const {
    return bits_[r * cols_ + c] != 0;
  }
  void set(std::size_t r, std::size_t c, bool value) {
    bits_[r * cols_ + c] = value ? 1 : 0;
  }

  // Bit c of the result is entry (r, c). Requires cols() <= 64.
  ServerMask row_mask(std::size_t r) const;
  void set_row_mask(std::size_t r, ServerMask mask);

  std::size_t row_count(std::size_t r) const;
  std::size_t col_count(std::size_t c) const;
  std::size_t count() const;

  std::vector<std::vector<int>> to_rows() const;

  bool operator==(const BoolMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class SelfLinkPolicy { kAlwaysOn, kAlwaysOff, kAsGiven };

std::string_view self_link_policy_name(SelfLinkPolicy policy);
SelfLinkPolicy parse_self_link_policy(std::string_view name);

// Undirected physical connectivity between servers.
struct PhysicalTopology {
  std::size_t n_servers = 0;
  BoolMatrix adjacency;
  SelfLinkPolicy self_link_policy = SelfLinkPolicy::kAlwaysOn;

  bool linked(std::size_t s, std::size_t t) const { return adjacency(s, t); }
  // Servers linked to s, including s itself when the diagonal is set.
  ServerMask neighbors(std::size_t s) const { return adjacency.row_mask(s); }
  // Number of links to other servers.
  std::size_t degree(std::size_t s) const;

  static PhysicalTopology complete(std::size_t n_servers,
                                   SelfLinkPolicy policy = SelfLinkPolicy::kAlwaysOn);
};

// Independent per-server failure probabilities.
struct FailureModel {
  std::vector<double> p;

  static FailureModel uniform(std::size_t n_servers, double p) {
    return FailureModel{std::vector<double>(n_servers, p)};
  }
};

struct LogicalLayer {
  std::size_t n_cvnf = 0;
  std::size_t n_rvnf = 0;
  std::vector<int> capacities;  // C_u, one per CVNF

  std::size_t n_vnf() const { return n_cvnf + n_rvnf; }
  long total_capacity() const;
};

// Assignment of every RVNF to exactly one managing CVNF.
struct ChainComposition {
  std::vector<std::size_t> assignment;  // assignment[v] = CVNF managing RVNF v

  // Validates the assignment against the logical layer's capacities.
  static ChainComposition from_assignment(std::vector<std::size_t> assignment,
                                          const LogicalLayer& logical);

  std::size_t cvnf_of(std::size_t v) const { return assignment[v]; }
  bool connected(std::size_t u, std::size_t v) const { return assignment[v] == u; }
  std::vector<std::size_t> monitored_counts(std::size_t n_cvnf) const;

  bool operator==(const ChainComposition&) const = default;
};

// Placement of CVNFs (x_c) and RVNFs (x_r) onto servers. Replication across
// servers is allowed; an all-zero row means the VNF is not instantiated.
struct Embedding {
  BoolMatrix x_c;  // n_cvnf x n_servers
  BoolMatrix x_r;  // n_rvnf x n_servers

  static Embedding zeros(const LogicalLayer& logical, std::size_t n_servers) {
    return Embedding{BoolMatrix(logical.n_cvnf, n_servers),
                     BoolMatrix(logical.n_rvnf, n_servers)};
  }

  bool operator==(const Embedding&) const = default;
};

struct Instance {
  PhysicalTopology topology;
  FailureModel failures;
  LogicalLayer logical;
  int load_budget = 0;  // L

  std::size_t n_servers() const { return topology.n_servers; }
  // r = N_S / N_V
  double overprovisioning_rate() const {
    return static_cast<double>(topology.n_servers) /
           static_cast<double>(logical.n_vnf());
  }
};

// One realization of server states; true means the server is on.
struct FailureVector {
  std::vector<bool> bits;

  ServerMask mask() const;
  static FailureVector from_mask(ServerMask mask, std::size_t n_servers);
};

// Returns a normalized copy of `inst` (diagonal set per self-link policy) or
// throws an Error whose is_validation_error() is true.
Instance validate_instance(Instance inst);

// Checks that an embedding/composition pair has the instance's dimensions.
void check_dimensions(const Instance& inst, const ChainComposition& cc,
                      const Embedding& emb);

std::size_t server_load(const Embedding& emb, std::size_t s);

struct LoadViolation {
  std::size_t server;
  std::size_t load;
  int budget;
  bool operator==(const LoadViolation&) const = default;
};

// CVNF u on server s and its RVNF v on server t without a physical link s-t.
struct LinkViolation {
  std::size_t cvnf;
  std::size_t rvnf;
  std::size_t s;
  std::size_t t;
  bool operator==(const LinkViolation&) const = default;
};

struct FeasibilityReport {
  std::vector<LoadViolation> load;
  std::vector<std::string> composition;
  std::vector<LinkViolation> links;

  bool feasible() const { return load.empty() && composition.empty() && links.empty(); }
  std::size_t violation_count() const {
    return load.size() + composition.size() + links.size();
  }
};

FeasibilityReport check_feasibility(const Instance& inst, const ChainComposition& cc,
                                    const Embedding& emb);

}  // namespace nfvrel

#pragma once

// Disconnected forwarding graph: every VNF is self-sufficient, all servers
// share one failure probability, and the only constraint is the per-server
// load budget. A VNF survives iff at least one of its replicas is on.

#include <optional>
#include <tuple>

#include "nfvrel/model.hpp"

namespace nfvrel {

struct DfgInstance {
  std::size_t n_vnfs = 0;
  std::size_t n_servers = 0;
  double p = 0.0;
  int load_budget = 0;

  double rate() const {
    return static_cast<double>(n_servers) / static_cast<double>(n_vnfs);
  }
};

// x(v, s) = VNF v replicated on server s.
struct DfgEmbedding {
  BoolMatrix x;

  std::size_t replicas(std::size_t v) const { return x.row_count(v); }
};

// Probability that every VNF has at least one host on. This is
// prod_v (1 - p^{k_v}) when no two VNFs share a server; shared servers make
// the VNFs positively correlated and the exact value is computed instead.
// Throws kEnumerationLimitExceeded when both N_S and N_V exceed 24 and
// replicas overlap.
double dfg_reliability(const DfgInstance& inst, const DfgEmbedding& emb);

// 1 - n_v * p^{r * min(L, n_v)}. Not clamped, so it can be negative.
// Throws kNonIntegerReplication unless r * L is an integer.
double union_bound_value(std::size_t n_v, double p, double r, int load);

// Same bound with r = n_s / n_v; nullopt when n_s * L is not a multiple of n_v.
std::optional<double> union_bound_for(std::size_t n_v, std::size_t n_s, double p, int load);

// Every server hosts min(L, n_v) distinct VNFs, dealt round-robin, so replica
// counts differ by at most one.
DfgEmbedding balanced_embedding(std::size_t n_v, std::size_t n_s, int load);

// sum_v p^{k_v}
double union_bound_objective(const DfgEmbedding& emb, double p);

struct DfgOptimum {
  double value;
  DfgEmbedding embedding;
};

// Exhaustive minimum of union_bound_objective over all embeddings meeting the
// load budget. Requires n_v * n_s <= 20.
DfgOptimum brute_force_min_union_bound(std::size_t n_v, std::size_t n_s, int load, double p);

inline constexpr std::size_t kDfgBruteForceBits = 20;

// Equivalent bipartite encoding: CVNF v co-located with RVNF v on the same
// servers, one CVNF per RVNF, complete topology with self-links, load budget
// doubled. exact_reliability on it equals dfg_reliability.
std::tuple<Instance, ChainComposition, Embedding> to_bipartite(const DfgInstance& inst,
                                                               const DfgEmbedding& emb);

}  // namespace nfvrel

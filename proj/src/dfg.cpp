#include "nfvrel/dfg.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <fmt/format.h>

#include "nfvrel/reliability.hpp"

namespace nfvrel {
namespace {

void check_dfg_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kProbabilityOutOfRange, fmt::format("p = {} is outside [0, 1]", p));
  }
}

}  // namespace

double dfg_reliability(const DfgInstance& inst, const DfgEmbedding& emb) {
  check_dfg_probability(inst.p);
  if (emb.x.rows() != inst.n_vnfs || emb.x.cols() != inst.n_servers) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("embedding is {}x{}, expected {}x{}", emb.x.rows(), emb.x.cols(),
                            inst.n_vnfs, inst.n_servers));
  }
  if (inst.n_servers > kMaxServers) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("at most {} servers are supported", kMaxServers));
  }
  const double p = inst.p;
  std::vector<ServerMask> hosts(inst.n_vnfs);
  ServerMask seen = 0;
  bool disjoint = true;
  for (std::size_t v = 0; v < inst.n_vnfs; ++v) {
    hosts[v] = emb.x.row_mask(v);
    if (hosts[v] == 0) return 0.0;
    disjoint = disjoint && (seen & hosts[v]) == 0;
    seen |= hosts[v];
  }

  // Disjoint replica sets fail independently.
  if (disjoint) {
    double prob = 1.0;
    for (ServerMask h : hosts) prob *= 1.0 - std::pow(p, std::popcount(h));
    return prob;
  }

  // Shared servers correlate the VNFs, so sum over server states or, when
  // there are fewer VNFs than servers, apply inclusion-exclusion over VNFs.
  const std::size_t n_s = inst.n_servers;
  const std::size_t n_v = inst.n_vnfs;
  if (n_s <= kEnumerationLimit && (n_s <= n_v || n_v > kEnumerationLimit)) {
    std::vector<double> on_pow(n_s + 1);
    std::vector<double> off_pow(n_s + 1);
    for (std::size_t k = 0; k <= n_s; ++k) {
      on_pow[k] = std::pow(1.0 - p, static_cast<double>(k));
      off_pow[k] = std::pow(p, static_cast<double>(k));
    }
    double prob = 0.0;
    for (ServerMask f = 0; f < (ServerMask{1} << n_s); ++f) {
      const bool all = std::all_of(hosts.begin(), hosts.end(), [f](ServerMask h) { return (h & f) != 0; });
      if (!all) continue;
      const auto on = static_cast<std::size_t>(std::popcount(f));
      prob += on_pow[on] * off_pow[n_s - on];
    }
    return prob;
  }
  if (n_v <= kEnumerationLimit) {
    double prob = 0.0;
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << n_v); ++subset) {
      ServerMask dead = 0;
      for (std::size_t v = 0; v < n_v; ++v)
        if ((subset >> v) & 1U) dead |= hosts[v];
      const double term = std::pow(p, std::popcount(dead));
      prob += std::popcount(subset) % 2 == 0 ? term : -term;
    }
    return std::clamp(prob, 0.0, 1.0);
  }
  throw Error(ErrorCode::kEnumerationLimitExceeded,
              fmt::format("{} VNFs sharing {} servers is too large to evaluate exactly", n_v, n_s));
}

double union_bound_value(std::size_t n_v, double p, double r, int load) {
  check_dfg_probability(p);
  if (n_v == 0 || !(r > 0.0) || load < 0) {
    throw Error(ErrorCode::kInvalidArgument, "union bound needs n_v >= 1, r > 0 and L >= 0");
  }
  const double replication = r * load;
  if (std::abs(replication - std::round(replication)) > 1e-9) {
    throw Error(ErrorCode::kNonIntegerReplication,
                fmt::format("r * L = {} is not an integer", replication));
  }
  const double exponent = r * static_cast<double>(std::min<std::size_t>(load, n_v));
  return 1.0 - static_cast<double>(n_v) * std::pow(p, exponent);
}

std::optional<double> union_bound_for(std::size_t n_v, std::size_t n_s, double p, int load) {
  if (n_v == 0 || n_s == 0 || load < 0) {
    throw Error(ErrorCode::kInvalidArgument, "union bound needs positive counts and L >= 0");
  }
  if ((n_s * static_cast<std::size_t>(load)) % n_v != 0) return std::nullopt;
  return union_bound_value(n_v, p, static_cast<double>(n_s) / static_cast<double>(n_v), load);
}

DfgEmbedding balanced_embedding(std::size_t n_v, std::size_t n_s, int load) {
  DfgEmbedding emb{BoolMatrix(n_v, n_s)};
  if (n_v == 0 || load <= 0) return emb;
  const std::size_t per_server = std::min<std::size_t>(load, n_v);
  // Slot j goes to VNF j mod n_v on server j / per_server; a server's slots are
  // consecutive, so its per_server <= n_v VNFs are distinct.
  for (std::size_t j = 0; j < n_s * per_server; ++j) emb.x.set(j % n_v, j / per_server, true);
  return emb;
}

double union_bound_objective(const DfgEmbedding& emb, double p) {
  double total = 0.0;
  for (std::size_t v = 0; v < emb.x.rows(); ++v) {
    total += std::pow(p, static_cast<double>(emb.replicas(v)));
  }
  return total;
}

DfgOptimum brute_force_min_union_bound(std::size_t n_v, std::size_t n_s, int load, double p) {
  const std::size_t bits = n_v * n_s;
  if (bits > kDfgBruteForceBits) {
    throw Error(ErrorCode::kEnumerationLimitExceeded,
                fmt::format("{} placement bits exceed the brute-force limit of {}", bits,
                            kDfgBruteForceBits));
  }
  check_dfg_probability(p);
  // Bit (v * n_s + s) of the code is x(v, s).
  std::vector<double> powers(n_s + 1);
  for (std::size_t k = 0; k <= n_s; ++k) powers[k] = std::pow(p, static_cast<double>(k));

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_code = 0;
  const std::uint32_t n_codes = std::uint32_t{1} << bits;
  const std::uint32_t row_mask = (std::uint32_t{1} << n_s) - 1;
  for (std::uint32_t code = 0; code < n_codes; ++code) {
    bool feasible = true;
    for (std::size_t s = 0; s < n_s && feasible; ++s) {
      int load_s = 0;
      for (std::size_t v = 0; v < n_v; ++v) load_s += (code >> (v * n_s + s)) & 1U;
      feasible = load_s <= load;
    }
    if (!feasible) continue;
    double value = 0.0;
    for (std::size_t v = 0; v < n_v; ++v) {
      value += powers[std::popcount((code >> (v * n_s)) & row_mask)];
    }
    if (value < best) {
      best = value;
      best_code = code;
    }
  }
  DfgEmbedding emb{BoolMatrix(n_v, n_s)};
  for (std::size_t v = 0; v < n_v; ++v)
    for (std::size_t s = 0; s < n_s; ++s) emb.x.set(v, s, (best_code >> (v * n_s + s)) & 1U);
  return DfgOptimum{best, std::move(emb)};
}

std::tuple<Instance, ChainComposition, Embedding> to_bipartite(const DfgInstance& inst,
                                                               const DfgEmbedding& emb) {
  const std::size_t n = inst.n_vnfs;
  Instance bfg;
  bfg.topology = PhysicalTopology::complete(inst.n_servers, SelfLinkPolicy::kAlwaysOn);
  bfg.failures = FailureModel::uniform(inst.n_servers, inst.p);
  bfg.logical = LogicalLayer{n, n, std::vector<int>(n, 1)};
  bfg.load_budget = 2 * inst.load_budget;

  std::vector<std::size_t> identity(n);
  for (std::size_t v = 0; v < n; ++v) identity[v] = v;
  ChainComposition cc{std::move(identity)};
  Embedding placement{emb.x, emb.x};
  return {validate_instance(std::move(bfg)), std::move(cc), std::move(placement)};
}

}  // namespace nfvrel

#include "nfvrel/reliability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fmt/format.h>
#include <random>

#include "nfvrel/random.hpp"

namespace nfvrel {
namespace {

// Per-RVNF host masks in a form cheap to test against many states.
struct SupportMasks {
  std::vector<ServerMask> cvnf_hosts;  // hosts of cc(v), indexed by v
  std::vector<ServerMask> rvnf_hosts;  // hosts of v
  std::vector<ServerMask> neighbors;   // per server

  SupportMasks(const Instance& inst, const ChainComposition& cc, const Embedding& emb) {
    const std::size_t n_rvnf = inst.logical.n_rvnf;
    cvnf_hosts.resize(n_rvnf);
    rvnf_hosts.resize(n_rvnf);
    for (std::size_t v = 0; v < n_rvnf; ++v) {
      cvnf_hosts[v] = emb.x_c.row_mask(cc.cvnf_of(v));
      rvnf_hosts[v] = emb.x_r.row_mask(v);
    }
    neighbors.resize(inst.n_servers());
    for (std::size_t s = 0; s < inst.n_servers(); ++s) neighbors[s] = inst.topology.neighbors(s);
  }

  bool executed(std::size_t v, ServerMask f) const {
    ServerMask c = cvnf_hosts[v] & f;
    const ServerMask r = rvnf_hosts[v] & f;
    if (r == 0) return false;
    while (c != 0) {
      const int s = std::countr_zero(c);
      if (neighbors[s] & r) return true;
      c &= c - 1;
    }
    return false;
  }

  bool all_executed(ServerMask f) const {
    for (std::size_t v = 0; v < rvnf_hosts.size(); ++v)
      if (!executed(v, f)) return false;
    return true;
  }

  int pairs(std::size_t v, ServerMask f) const {
    ServerMask c = cvnf_hosts[v] & f;
    const ServerMask r = rvnf_hosts[v] & f;
    int n = 0;
    while (c != 0) {
      const int s = std::countr_zero(c);
      n += std::popcount(neighbors[s] & r);
      c &= c - 1;
    }
    return n;
  }
};

void check_enumerable(const Instance& inst, std::size_t limit) {
  if (inst.n_servers() > limit) {
    throw Error(ErrorCode::kEnumerationLimitExceeded,
                fmt::format("{} servers exceed the enumeration limit of {}; use Monte Carlo",
                            inst.n_servers(), limit));
  }
}

int hinge(int n_rvnf, int pair_sum) { return std::min(1, 1 - n_rvnf + pair_sum); }

}  // namespace

StateProbabilityTable::StateProbabilityTable(const FailureModel& fm)
    : n_servers_(fm.p.size()), low_bits_((fm.p.size() + 1) / 2) {
  low_mask_ = (ServerMask{1} << low_bits_) - 1;
  const std::size_t high_bits = n_servers_ - low_bits_;
  auto build = [&](std::size_t offset, std::size_t bits) {
    std::vector<double> table(std::size_t{1} << bits);
    for (std::size_t m = 0; m < table.size(); ++m) {
      double prob = 1.0;
      for (std::size_t i = 0; i < bits; ++i) {
        const double p = fm.p[offset + i];
        prob *= ((m >> i) & 1U) ? (1.0 - p) : p;
      }
      table[m] = prob;
    }
    return table;
  };
  low_ = build(0, low_bits_);
  high_ = build(low_bits_, high_bits);
}

double failure_mask_prob(ServerMask f, const FailureModel& fm) {
  double prob = 1.0;
  for (std::size_t s = 0; s < fm.p.size(); ++s) {
    prob *= ((f >> s) & 1U) ? (1.0 - fm.p[s]) : fm.p[s];
  }
  return prob;
}

double failure_vector_prob(const FailureVector& f, const FailureModel& fm) {
  if (f.bits.size() != fm.p.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("failure vector has {} entries, failure model {}", f.bits.size(),
                            fm.p.size()));
  }
  double prob = 1.0;
  for (std::size_t s = 0; s < f.bits.size(); ++s) prob *= f.bits[s] ? (1.0 - fm.p[s]) : fm.p[s];
  return prob;
}

bool rvnf_executed(std::size_t v, const FailureVector& f, const ChainComposition& cc,
                   const Embedding& emb, const PhysicalTopology& topo) {
  if (v >= emb.x_r.rows() || v >= cc.assignment.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, fmt::format("RVNF {} out of range", v));
  }
  const std::size_t u = cc.cvnf_of(v);
  if (u >= emb.x_c.rows()) {
    throw Error(ErrorCode::kIndexOutOfRange, fmt::format("CVNF {} out of range", u));
  }
  const std::size_t n = topo.n_servers;
  if (f.bits.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "failure vector length differs from topology");
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!f.bits[s] || !emb.x_c(u, s)) continue;
    for (std::size_t t = 0; t < n; ++t) {
      if (f.bits[t] && emb.x_r(v, t) && topo.linked(s, t)) return true;
    }
  }
  return false;
}

int support_pairs(std::size_t v, ServerMask f, const ChainComposition& cc, const Embedding& emb,
                  const PhysicalTopology& topo) {
  const std::size_t u = cc.cvnf_of(v);
  int n = 0;
  for (std::size_t s = 0; s < topo.n_servers; ++s) {
    if (!((f >> s) & 1U) || !emb.x_c(u, s)) continue;
    n += std::popcount(topo.neighbors(s) & emb.x_r.row_mask(v) & f);
  }
  return n;
}

int surrogate_term(ServerMask f, const Instance& inst, const ChainComposition& cc,
                   const Embedding& emb) {
  int sum = 0;
  for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v)
    sum += support_pairs(v, f, cc, emb, inst.topology);
  return hinge(static_cast<int>(inst.logical.n_rvnf), sum);
}

ReliabilityResult exact_reliability(const Instance& inst, const ChainComposition& cc,
                                    const Embedding& emb, std::size_t enumeration_limit) {
  check_dimensions(inst, cc, emb);
  check_enumerable(inst, enumeration_limit);
  const SupportMasks masks(inst, cc, emb);
  const StateProbabilityTable prob(inst.failures);
  const ServerMask n_states = ServerMask{1} << inst.n_servers();
  double total = 0.0;
  for (ServerMask f = 0; f < n_states; ++f) {
    if (masks.all_executed(f)) total += prob(f);
  }
  return ReliabilityResult{std::clamp(total, 0.0, 1.0), ReliabilityMethod::kExactEnumeration,
                           std::nullopt, std::nullopt};
}

ReliabilityResult monte_carlo_reliability(const Instance& inst, const ChainComposition& cc,
                                          const Embedding& emb, std::uint64_t n_samples,
                                          std::uint64_t seed) {
  if (n_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "Monte Carlo needs at least one sample");
  }
  check_dimensions(inst, cc, emb);
  const SupportMasks masks(inst, cc, emb);
  const std::size_t n = inst.n_servers();
  const auto& p = inst.failures.p;

  std::uint64_t successes = 0;
  const std::uint64_t n_chunks = (n_samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  for (std::uint64_t chunk = 0; chunk < n_chunks; ++chunk) {
    std::mt19937_64 rng(mix_seed(seed, chunk));
    const std::uint64_t begin = chunk * kMonteCarloChunk;
    const std::uint64_t count = std::min<std::uint64_t>(kMonteCarloChunk, n_samples - begin);
    for (std::uint64_t i = 0; i < count; ++i) {
      ServerMask f = 0;
      for (std::size_t s = 0; s < n; ++s) {
        if (uniform01(rng) >= p[s]) f |= ServerMask{1} << s;
      }
      if (masks.all_executed(f)) ++successes;
    }
  }
  const double value = static_cast<double>(successes) / static_cast<double>(n_samples);
  const double se = std::sqrt(value * (1.0 - value) / static_cast<double>(n_samples));
  return ReliabilityResult{value, ReliabilityMethod::kMonteCarlo, se, n_samples};
}

double surrogate_objective(const Instance& inst, const ChainComposition& cc, const Embedding& emb,
                           std::size_t enumeration_limit) {
  check_dimensions(inst, cc, emb);
  check_enumerable(inst, enumeration_limit);
  const SupportMasks masks(inst, cc, emb);
  const StateProbabilityTable prob(inst.failures);
  const int n_rvnf = static_cast<int>(inst.logical.n_rvnf);
  const ServerMask n_states = ServerMask{1} << inst.n_servers();
  double total = 0.0;
  for (ServerMask f = 0; f < n_states; ++f) {
    int sum = 0;
    for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v) sum += masks.pairs(v, f);
    total += prob(f) * hinge(n_rvnf, sum);
  }
  return total;
}

}  // namespace nfvrel

#pragma once

// End-to-end reliability of a composed and embedded service.
//
// Exact values enumerate all 2^N_S server states in the natural integer order
// (bit s of the state index is f_s). Monte Carlo estimates draw the states in
// fixed-size chunks, each with its own seed derived from (seed, chunk index),
// so the estimate does not depend on how chunks are scheduled.

#include <cstdint>
#include <optional>

#include "nfvrel/model.hpp"

namespace nfvrel {

inline constexpr std::size_t kEnumerationLimit = 24;
inline constexpr std::size_t kMonteCarloChunk = 4096;

enum class ReliabilityMethod { kExactEnumeration, kMonteCarlo };

struct ReliabilityResult {
  double value = 0.0;
  ReliabilityMethod method = ReliabilityMethod::kExactEnumeration;
  std::optional<double> std_error;  // present iff method == kMonteCarlo
  std::optional<std::uint64_t> n_samples;

  double outage() const { return 1.0 - value; }
};

// P(f) = prod_{s off} p_s * prod_{t on} (1 - p_t)
double failure_vector_prob(const FailureVector& f, const FailureModel& fm);
double failure_mask_prob(ServerMask f, const FailureModel& fm);

// Whether RVNF v is served under state f: some active server hosting its
// CVNF is linked to some active server hosting v.
bool rvnf_executed(std::size_t v, const FailureVector& f, const ChainComposition& cc,
                   const Embedding& emb, const PhysicalTopology& topo);

// Number of active linked (CVNF host, RVNF host) pairs supporting the logical
// edge cc(v) -> v under state f.
int support_pairs(std::size_t v, ServerMask f, const ChainComposition& cc, const Embedding& emb,
                  const PhysicalTopology& topo);

// Epigraph value of the hinge/l1 surrogate for one state:
// min(1, 1 - N_{V,R} + sum_v support_pairs(v, f)).
int surrogate_term(ServerMask f, const Instance& inst, const ChainComposition& cc,
                   const Embedding& emb);

ReliabilityResult exact_reliability(const Instance& inst, const ChainComposition& cc,
                                    const Embedding& emb,
                                    std::size_t enumeration_limit = kEnumerationLimit);

ReliabilityResult monte_carlo_reliability(const Instance& inst, const ChainComposition& cc,
                                          const Embedding& emb, std::uint64_t n_samples,
                                          std::uint64_t seed);

// sum_f P(f) * surrogate_term(f)
double surrogate_objective(const Instance& inst, const ChainComposition& cc,
                           const Embedding& emb,
                           std::size_t enumeration_limit = kEnumerationLimit);

// Splits the state product into two lookup tables so P(f) for every f of an
// enumeration costs one multiply.
class StateProbabilityTable {
 public:
  explicit StateProbabilityTable(const FailureModel& fm);

  double operator()(ServerMask f) const {
    return low_[f & low_mask_] * high_[f >> low_bits_];
  }
  std::size_t n_servers() const { return n_servers_; }

 private:
  std::size_t n_servers_;
  std::size_t low_bits_;
  ServerMask low_mask_;
  std::vector<double> low_;
  std::vector<double> high_;
};

}  // namespace nfvrel

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nfvrel/dfg.hpp"
#include "nfvrel/error.hpp"
#include "nfvrel/reliability.hpp"
#include "test_support.hpp"

namespace nfvrel {
namespace {

// Two servers with full connectivity, one CVNF and one RVNF.
Instance pair_instance(double p = 0.1) {
  Instance inst;
  inst.topology = PhysicalTopology::complete(2);
  inst.failures = FailureModel::uniform(2, p);
  inst.logical = LogicalLayer{1, 1, {1}};
  inst.load_budget = 2;
  return validate_instance(inst);
}

const ChainComposition kSingle{{0}};

Embedding split_embedding() {
  return Embedding{BoolMatrix::from_rows({{1, 0}}), BoolMatrix::from_rows({{0, 1}})};
}

TEST(FailureVectorProb, Examples) {
  EXPECT_NEAR(failure_vector_prob(FailureVector{{true, true}}, FailureModel{{0.1, 0.1}}), 0.81,
              1e-15);
  EXPECT_EQ(failure_vector_prob(FailureVector{{true, true, true}}, FailureModel{{0, 0, 0}}), 1.0);
  EXPECT_NEAR(failure_vector_prob(FailureVector{{false, true}}, FailureModel{{0.3, 0.2}}), 0.24,
              1e-15);
}

TEST(FailureVectorProb, LengthMismatchThrows) {
  EXPECT_THROW(failure_vector_prob(FailureVector{{true}}, FailureModel{{0.1, 0.1}}), Error);
}

TEST(FailureVectorProb, Normalization) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 1; n <= 12; ++n) {
    FailureModel fm;
    for (std::size_t s = 0; s < n; ++s) fm.p.push_back(unit(rng));
    double total = 0.0;
    for (ServerMask f = 0; f < (ServerMask{1} << n); ++f) {
      total += failure_vector_prob(FailureVector::from_mask(f, n), fm);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(StateProbabilityTableTest, MatchesDirectProduct) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FailureModel fm;
  for (int s = 0; s < 9; ++s) fm.p.push_back(unit(rng));
  const StateProbabilityTable table(fm);
  for (ServerMask f = 0; f < 512; ++f) {
    EXPECT_NEAR(table(f), testing::oracle_state_prob(testing::state_bits(f, 9), fm.p), 1e-15);
  }
}

TEST(RvnfExecuted, Examples) {
  const Instance inst = pair_instance();
  const Embedding emb = split_embedding();
  EXPECT_FALSE(rvnf_executed(0, FailureVector{{false, false}}, kSingle, emb, inst.topology));
  EXPECT_TRUE(rvnf_executed(0, FailureVector{{true, true}}, kSingle, emb, inst.topology));
  EXPECT_FALSE(rvnf_executed(0, FailureVector{{true, false}}, kSingle, emb, inst.topology));
}

TEST(RvnfExecuted, OutOfRange) {
  const Instance inst = pair_instance();
  EXPECT_THROW(
      rvnf_executed(1, FailureVector{{true, true}}, kSingle, split_embedding(), inst.topology),
      Error);
}

TEST(ExactReliability, SplitPlacement) {
  const Instance inst = pair_instance();
  const ReliabilityResult r = exact_reliability(inst, kSingle, split_embedding());
  EXPECT_NEAR(r.value, 0.81, 1e-12);
  EXPECT_EQ(r.method, ReliabilityMethod::kExactEnumeration);
  EXPECT_FALSE(r.std_error.has_value());
}

TEST(ExactReliability, FullReplication) {
  const Instance inst = pair_instance();
  const Embedding emb{BoolMatrix::from_rows({{1, 1}}), BoolMatrix::from_rows({{1, 1}})};
  EXPECT_NEAR(exact_reliability(inst, kSingle, emb).value, 0.99, 1e-12);
}

TEST(ExactReliability, PerfectServers) {
  const Instance inst = pair_instance(0.0);
  EXPECT_NEAR(exact_reliability(inst, kSingle, split_embedding()).value, 1.0, 1e-12);
}

TEST(ExactReliability, EnumerationLimit) {
  Instance inst;
  inst.topology = PhysicalTopology::complete(30);
  inst.failures = FailureModel::uniform(30, 0.1);
  inst.logical = LogicalLayer{1, 1, {1}};
  inst.load_budget = 1;
  inst = validate_instance(inst);
  const Embedding emb = Embedding::zeros(inst.logical, 30);
  try {
    exact_reliability(inst, kSingle, emb);
    FAIL() << "expected EnumerationLimitExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationLimitExceeded);
  }
  EXPECT_THROW(surrogate_objective(inst, kSingle, emb), Error);
}

TEST(ExactReliability, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    testing::InstanceShape shape{static_cast<std::size_t>(2 + trial % 5), 2, 3, 3, 0.6,
                                 trial % 2 ? SelfLinkPolicy::kAlwaysOn : SelfLinkPolicy::kAlwaysOff};
    const Instance inst = testing::random_instance(shape, rng);
    const auto cc = testing::random_composition(inst.logical, rng);
    const Embedding emb{testing::random_block(2, shape.n_servers, 2, rng),
                        testing::random_block(3, shape.n_servers, 3, rng)};
    EXPECT_NEAR(exact_reliability(inst, cc, emb).value, testing::oracle_exact(inst, cc, emb),
                1e-12);
    EXPECT_NEAR(surrogate_objective(inst, cc, emb), testing::oracle_surrogate(inst, cc, emb),
                1e-12);
  }
}

TEST(ExactReliability, MonotoneInPlacement) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = testing::random_instance({4, 2, 3, 4, 0.6}, rng);
    const auto cc = testing::random_composition(inst.logical, rng);
    Embedding emb{testing::random_block(2, 4, 4, rng), testing::random_block(3, 4, 4, rng)};
    const double before = exact_reliability(inst, cc, emb).value;
    BoolMatrix& block = rng() % 2 ? emb.x_c : emb.x_r;
    block.set(rng() % block.rows(), rng() % 4, true);
    EXPECT_GE(exact_reliability(inst, cc, emb).value, before - 1e-12);
  }
}

TEST(ExactReliability, MonotoneInFailureRate) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = testing::random_instance({4, 1, 3, 4, 0.6}, rng);
    const auto cc = testing::random_composition(inst.logical, rng);
    const Embedding emb{testing::random_block(1, 4, 4, rng), testing::random_block(3, 4, 4, rng)};
    const double before = exact_reliability(inst, cc, emb).value;
    inst.failures.p[rng() % 4] *= 0.5;
    EXPECT_GE(exact_reliability(inst, cc, emb).value, before - 1e-12);
  }
}

TEST(ExactReliability, MonotoneInTopology) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = testing::random_instance({4, 2, 3, 4, 0.4, SelfLinkPolicy::kAsGiven}, rng);
    const auto cc = testing::random_composition(inst.logical, rng);
    const Embedding emb{testing::random_block(2, 4, 4, rng), testing::random_block(3, 4, 4, rng)};
    const double before = exact_reliability(inst, cc, emb).value;
    const std::size_t s = rng() % 4;
    const std::size_t t = rng() % 4;
    inst.topology.adjacency.set(s, t, true);
    inst.topology.adjacency.set(t, s, true);
    EXPECT_GE(exact_reliability(inst, cc, emb).value, before - 1e-12);
  }
}

TEST(ExactReliability, UninstantiatedRvnfGivesZero) {
  const Instance inst = pair_instance();
  const Embedding emb{BoolMatrix::from_rows({{1, 1}}), BoolMatrix(1, 2)};
  EXPECT_EQ(exact_reliability(inst, kSingle, emb).value, 0.0);
}

TEST(ExactReliability, DisconnectedGraphMatchesDfg) {
  for (std::size_t n_v = 1; n_v <= 3; ++n_v) {
    for (std::size_t n_s : {2U, 3U, 4U}) {
      for (int load = 1; load <= 2; ++load) {
        const DfgInstance dfg{n_v, n_s, 0.2, load};
        const DfgEmbedding emb = balanced_embedding(n_v, n_s, load);
        const auto [inst, cc, bfg] = to_bipartite(dfg, emb);
        EXPECT_NEAR(exact_reliability(inst, cc, bfg).value, dfg_reliability(dfg, emb), 1e-12);
      }
    }
  }
}

TEST(MonteCarlo, AllServersFail) {
  const Instance inst = pair_instance(1.0);
  const ReliabilityResult r = monte_carlo_reliability(inst, kSingle, split_embedding(), 1000, 1);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(*r.std_error, 0.0);
  EXPECT_EQ(*r.n_samples, 1000U);
  EXPECT_EQ(r.method, ReliabilityMethod::kMonteCarlo);
}

TEST(MonteCarlo, BracketsExactValue) {
  const Instance inst = pair_instance();
  const ReliabilityResult r =
      monte_carlo_reliability(inst, kSingle, split_embedding(), 100000, 42);
  EXPECT_LE(std::abs(r.value - 0.81), 3.0 * *r.std_error);
}

TEST(MonteCarlo, ZeroSamplesRejected) {
  const Instance inst = pair_instance();
  EXPECT_THROW(monte_carlo_reliability(inst, kSingle, split_embedding(), 0, 1), Error);
}

TEST(MonteCarlo, DeterministicGivenSeed) {
  const Instance inst = pair_instance(0.3);
  const auto a = monte_carlo_reliability(inst, kSingle, split_embedding(), 10000, 9);
  const auto b = monte_carlo_reliability(inst, kSingle, split_embedding(), 10000, 9);
  const auto c = monte_carlo_reliability(inst, kSingle, split_embedding(), 10000, 10);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NE(a.value, c.value);
}

TEST(MonteCarlo, ConsistentOverSeeds) {
  std::mt19937_64 rng(31);
  const Instance inst = testing::random_instance({4, 2, 3, 3, 0.8}, rng);
  const auto cc = testing::random_composition(inst.logical, rng);
  const Embedding emb{testing::random_block(2, 4, 3, rng), testing::random_block(3, 4, 3, rng)};
  const double exact = exact_reliability(inst, cc, emb).value;
  int inside = 0;
  constexpr int kRuns = 200;
  for (int seed = 0; seed < kRuns; ++seed) {
    const auto mc = monte_carlo_reliability(inst, cc, emb, 5000, seed);
    if (std::abs(mc.value - exact) <= 3.0 * *mc.std_error) ++inside;
  }
  EXPECT_GE(inside, kRuns * 99 / 100 - 1);  // binomial slack around the 99.7% coverage
}

TEST(Surrogate, EqualsExactForSinglePair) {
  const Instance inst = pair_instance();
  EXPECT_NEAR(surrogate_objective(inst, kSingle, split_embedding()), 0.81, 1e-12);
}

TEST(Surrogate, OverestimatesWhenOneRvnfHasTwoPairs) {
  Instance raw;
  raw.topology = PhysicalTopology::complete(2);
  raw.failures = FailureModel::uniform(2, 0.1);
  raw.logical = LogicalLayer{1, 2, {2}};
  raw.load_budget = 3;
  const Instance inst = validate_instance(raw);
  const ChainComposition cc{{0, 0}};
  // RVNF 0 on server 0, CVNF on both servers: two supporting pairs when both are on.
  const Embedding emb{BoolMatrix::from_rows({{1, 1}}), BoolMatrix::from_rows({{1, 0}, {0, 0}})};
  EXPECT_EQ(surrogate_term(0b11, inst, cc, emb), 1);
  EXPECT_EQ(support_pairs(0, 0b11, cc, emb, inst.topology), 2);
  EXPECT_FALSE(rvnf_executed(1, FailureVector{{true, true}}, cc, emb, inst.topology));
  EXPECT_GT(surrogate_objective(inst, cc, emb), exact_reliability(inst, cc, emb).value);
}

TEST(Surrogate, ZeroEmbedding) {
  Instance raw;
  raw.topology = PhysicalTopology::complete(3);
  raw.failures = FailureModel::uniform(3, 0.2);
  raw.logical = LogicalLayer{2, 4, {2, 2}};
  raw.load_budget = 2;
  const Instance inst = validate_instance(raw);
  EXPECT_NEAR(surrogate_objective(inst, ChainComposition{{0, 0, 1, 1}},
                                  Embedding::zeros(inst.logical, 3)),
              -3.0, 1e-12);
}

TEST(Surrogate, HingeLowerBoundWhenPairsAreUnique) {
  std::mt19937_64 rng(37);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = testing::random_instance({4, 2, 3, 3, 0.5}, rng);
    const auto cc = testing::random_composition(inst.logical, rng);
    const Embedding emb{testing::random_block(2, 4, 3, rng), testing::random_block(3, 4, 3, rng)};
    for (ServerMask f = 0; f < 16; ++f) {
      bool unique = true;
      bool all = true;
      for (std::size_t v = 0; v < 3; ++v) {
        const int pairs = support_pairs(v, f, cc, emb, inst.topology);
        unique = unique && pairs <= 1;
        all = all && pairs > 0;
      }
      if (!unique) continue;
      ++checked;
      const int t = std::min(1, surrogate_term(f, inst, cc, emb));
      EXPECT_LE(t, all ? 1 : 0);
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace nfvrel

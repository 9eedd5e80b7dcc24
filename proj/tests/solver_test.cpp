#include <gtest/gtest.h>

#include <random>

#include "nfvrel/error.hpp"
#include "nfvrel/reliability.hpp"
#include "nfvrel/solver.hpp"
#include "test_support.hpp"

namespace nfvrel {
namespace {

Instance pair_instance(double p = 0.1, int load = 2) {
  Instance inst;
  inst.topology = PhysicalTopology::complete(2);
  inst.failures = FailureModel::uniform(2, p);
  inst.logical = LogicalLayer{1, 1, {1}};
  inst.load_budget = load;
  return validate_instance(inst);
}

Instance four_server_instance(int load, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance inst = testing::random_instance({4, 2, 4, load, 0.8}, rng);
  inst.failures = FailureModel::uniform(4, 0.15);
  inst.logical.capacities = {4, 4};
  return validate_instance(inst);
}

std::vector<std::size_t> counts(const ChainComposition& cc, std::size_t n_cvnf) {
  return cc.monitored_counts(n_cvnf);
}

TEST(CcMin, Examples) {
  EXPECT_EQ(counts(cc_min(LogicalLayer{2, 4, {4, 4}}), 2), (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(counts(cc_min(LogicalLayer{4, 4, {1, 1, 1, 1}}), 4),
            (std::vector<std::size_t>{1, 1, 1, 1}));
  EXPECT_EQ(counts(cc_min(LogicalLayer{2, 4, {1, 3}}), 2), (std::vector<std::size_t>{1, 3}));
}

TEST(CcMax, Examples) {
  EXPECT_EQ(cc_max(LogicalLayer{2, 4, {4, 4}}).assignment, (std::vector<std::size_t>{0, 0, 0, 0}));
  EXPECT_EQ(counts(cc_max(LogicalLayer{2, 4, {2, 4}}), 2), (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(counts(cc_max(LogicalLayer{1, 4, {4}}), 1), (std::vector<std::size_t>{4}));
}

TEST(CcBaselines, CapacityDeficit) {
  EXPECT_THROW(cc_min(LogicalLayer{2, 4, {1, 1}}), Error);
  EXPECT_THROW(cc_max(LogicalLayer{2, 4, {1, 1}}), Error);
}

TEST(CcBaselines, AlwaysValid) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    LogicalLayer logical;
    logical.n_cvnf = 1 + rng() % 4;
    logical.n_rvnf = logical.n_cvnf + rng() % 6;
    logical.capacities.assign(logical.n_cvnf, 1);
    for (std::size_t k = logical.n_cvnf; k < logical.n_rvnf + rng() % 3; ++k)
      ++logical.capacities[rng() % logical.n_cvnf];
    const auto lo = cc_min(logical);
    const auto hi = cc_max(logical);
    EXPECT_NO_THROW(ChainComposition::from_assignment(lo.assignment, logical));
    EXPECT_NO_THROW(ChainComposition::from_assignment(hi.assignment, logical));
    // Even spread: no CVNF below capacity has two fewer RVNFs than another.
    const auto c = lo.monitored_counts(logical.n_cvnf);
    for (std::size_t a = 0; a < logical.n_cvnf; ++a)
      for (std::size_t b = 0; b < logical.n_cvnf; ++b)
        if (static_cast<int>(c[a]) < logical.capacities[a]) EXPECT_LE(c[b], c[a] + 1);
  }
}

TEST(BruteForceJoint, Examples) {
  EXPECT_NEAR(brute_force_joint(pair_instance()).reliability, 0.99, 1e-12);

  const JointOptimum zero = brute_force_joint(pair_instance(0.1, 0));
  EXPECT_EQ(zero.reliability, 0.0);
  EXPECT_EQ(zero.embedding.x_c.count() + zero.embedding.x_r.count(), 0U);

  Instance raw;
  raw.topology = PhysicalTopology{2, BoolMatrix(2, 2), SelfLinkPolicy::kAlwaysOff};
  raw.failures = FailureModel::uniform(2, 0.1);
  raw.logical = LogicalLayer{1, 1, {1}};
  raw.load_budget = 1;
  EXPECT_EQ(brute_force_joint(validate_instance(raw)).reliability, 0.0);
}

TEST(BruteForceJoint, Guard) {
  Instance raw;
  raw.topology = PhysicalTopology::complete(4);
  raw.failures = FailureModel::uniform(4, 0.1);
  raw.logical = LogicalLayer{2, 4, {4, 4}};
  raw.load_budget = 3;
  try {
    brute_force_joint(validate_instance(raw));
    FAIL() << "expected EnumerationLimitExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationLimitExceeded);
  }
}

TEST(BcdSolve, PairReachesOptimum) {
  const SolveReport r = bcd_solve(pair_instance());
  EXPECT_NEAR(r.exact_reliability, 0.99, 1e-12);
  EXPECT_EQ(r.embedding.x_c, BoolMatrix::from_rows({{1, 1}}));
  EXPECT_EQ(r.embedding.x_r, BoolMatrix::from_rows({{1, 1}}));
}

TEST(BcdSolve, AllServersFail) {
  Instance raw = pair_instance();
  raw.failures = FailureModel::uniform(2, 1.0);
  const SolveReport r = bcd_solve(validate_instance(raw));
  EXPECT_EQ(r.exact_reliability, 0.0);
  EXPECT_TRUE(check_feasibility(raw, r.cc, r.embedding).feasible());
}

TEST(BcdSolve, LoadBudgetHelps) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double low = bcd_solve(four_server_instance(1, seed)).outage();
    const double high = bcd_solve(four_server_instance(6, seed)).outage();
    EXPECT_LT(high, low) << "seed " << seed;
  }
}

TEST(BcdSolve, AscentAndFeasibility) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = four_server_instance(1 + seed % 6, seed);
    for (InitStrategy init : {InitStrategy::kZero, InitStrategy::kRoundRobin, InitStrategy::kRandom}) {
      SolverConfig cfg;
      cfg.init_strategy = init;
      cfg.seed = seed;
      const SolveReport r = bcd_solve(inst, cfg);
      for (std::size_t i = 1; i < r.surrogate_trace.size(); ++i) {
        EXPECT_GE(r.surrogate_trace[i], r.surrogate_trace[i - 1] - cfg.epsilon);
      }
      EXPECT_TRUE(check_feasibility(inst, r.cc, r.embedding).feasible());
      EXPECT_NEAR(r.exact_reliability, exact_reliability(inst, r.cc, r.embedding).value, 1e-15);
      EXPECT_LE(r.iterations, cfg.max_iterations);
    }
  }
}

TEST(BcdSolve, Deterministic) {
  const Instance inst = four_server_instance(3, 9);
  SolverConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 77;
  const SolveReport a = bcd_solve(inst, cfg);
  const SolveReport b = bcd_solve(inst, cfg);
  EXPECT_EQ(a.embedding, b.embedding);
  EXPECT_EQ(a.cc, b.cc);
  EXPECT_EQ(a.surrogate_trace, b.surrogate_trace);
}

TEST(BcdSolve, RestartsNeverHurt) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = four_server_instance(3, seed);
    SolverConfig cfg;
    const double single = bcd_solve(inst, cfg).exact_reliability;
    cfg.restarts = 5;
    EXPECT_GE(bcd_solve(inst, cfg).exact_reliability, single - 1e-15);
  }
}

TEST(BcdSolve, RejectsBadConfig) {
  SolverConfig cfg;
  cfg.max_iterations = 0;
  EXPECT_THROW(bcd_solve(pair_instance(), cfg), Error);
  cfg = SolverConfig{};
  cfg.epsilon = 0.0;
  EXPECT_THROW(bcd_solve(pair_instance(), cfg), Error);
}

TEST(FgeOnly, SingletonCompositionMatchesJoint) {
  const Instance inst = pair_instance(0.2);
  const SolveReport joint = bcd_solve(inst);
  const SolveReport fixed = fge_only_solve(inst, ChainComposition{{0}});
  EXPECT_EQ(joint.exact_reliability, fixed.exact_reliability);
  EXPECT_EQ(joint.embedding, fixed.embedding);
}

TEST(FgeOnly, PerfectServers) {
  Instance raw;
  raw.topology = PhysicalTopology::complete(4);
  raw.failures = FailureModel::uniform(4, 0.0);
  raw.logical = LogicalLayer{2, 4, {4, 4}};
  raw.load_budget = 3;
  const Instance inst = validate_instance(raw);
  const SolveReport r = fge_only_solve(inst, cc_min(inst.logical));
  EXPECT_NEAR(r.exact_reliability, 1.0, 1e-12);
  EXPECT_EQ(r.cc, cc_min(inst.logical));
}

TEST(FgeOnly, KeepsComposition) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = four_server_instance(3, seed);
    EXPECT_EQ(fge_only_solve(inst, cc_max(inst.logical)).cc, cc_max(inst.logical));
  }
}

TEST(OracleDominance, BruteForceBeatsBcd) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = testing::random_instance(
        {2 + static_cast<std::size_t>(trial % 2), 1, 1 + static_cast<std::size_t>(trial % 2),
         1 + trial % 2, 0.6},
        rng);
    const JointOptimum best = brute_force_joint(inst);
    const SolveReport r = bcd_solve(inst);
    EXPECT_GE(best.reliability, r.exact_reliability - 1e-12);
    EXPECT_TRUE(check_feasibility(inst, best.cc, best.embedding).feasible());
    EXPECT_NEAR(best.reliability, testing::oracle_exact(inst, best.cc, best.embedding), 1e-12);
  }
}

}  // namespace
}  // namespace nfvrel

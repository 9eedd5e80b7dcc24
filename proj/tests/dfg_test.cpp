#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nfvrel/dfg.hpp"
#include "nfvrel/error.hpp"

namespace nfvrel {
namespace {

std::vector<std::size_t> replica_counts(const DfgEmbedding& emb) {
  std::vector<std::size_t> counts;
  for (std::size_t v = 0; v < emb.x.rows(); ++v) counts.push_back(emb.replicas(v));
  return counts;
}

TEST(DfgReliability, Examples) {
  const DfgInstance inst{2, 4, 0.1, 1};
  const DfgEmbedding two_each{BoolMatrix::from_rows({{1, 1, 0, 0}, {0, 0, 1, 1}})};
  EXPECT_NEAR(dfg_reliability(inst, two_each), 0.9801, 1e-12);

  const DfgEmbedding missing{BoolMatrix::from_rows({{1, 1, 1, 0}, {0, 0, 0, 0}})};
  EXPECT_EQ(dfg_reliability(inst, missing), 0.0);

  const DfgInstance perfect{2, 4, 0.0, 1};
  EXPECT_EQ(dfg_reliability(perfect, two_each), 1.0);
}

// Plain enumeration over server states.
double oracle_dfg(const DfgInstance& inst, const BoolMatrix& x) {
  double total = 0.0;
  for (std::uint64_t f = 0; f < (std::uint64_t{1} << inst.n_servers); ++f) {
    bool all = true;
    for (std::size_t v = 0; v < inst.n_vnfs && all; ++v) {
      bool covered = false;
      for (std::size_t s = 0; s < inst.n_servers; ++s) covered = covered || (x(v, s) && ((f >> s) & 1U));
      all = covered;
    }
    if (!all) continue;
    double prob = 1.0;
    for (std::size_t s = 0; s < inst.n_servers; ++s) prob *= ((f >> s) & 1U) ? 1.0 - inst.p : inst.p;
    total += prob;
  }
  return total;
}

TEST(DfgReliability, SharedServersMatchEnumeration) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n_v = 1 + rng() % 6;
    const std::size_t n_s = 1 + rng() % 8;
    const DfgInstance inst{n_v, n_s, 0.05 + 0.01 * static_cast<double>(rng() % 80), 0};
    BoolMatrix x(n_v, n_s);
    for (std::size_t v = 0; v < n_v; ++v)
      for (std::size_t s = 0; s < n_s; ++s) x.set(v, s, rng() % 3 != 0);
    const double exact = dfg_reliability(inst, DfgEmbedding{x});
    EXPECT_NEAR(exact, oracle_dfg(inst, x), 1e-12);
    // Positive correlation: the independent product never exceeds the truth.
    double product = 1.0;
    for (std::size_t v = 0; v < n_v; ++v) product *= 1.0 - std::pow(inst.p, x.row_count(v));
    EXPECT_LE(product, exact + 1e-12);
  }
}

TEST(UnionBoundValue, Examples) {
  EXPECT_NEAR(union_bound_value(4, 0.15, 1.0, 2), 0.91, 1e-12);
  EXPECT_NEAR(union_bound_value(2, 0.1, 2.0, 1), 0.98, 1e-12);
  EXPECT_NEAR(union_bound_value(3, 0.4, 1.0, 0), -2.0, 1e-12);
}

TEST(UnionBoundValue, NonIntegralReplicationRejected) {
  try {
    union_bound_value(3, 0.1, 4.0 / 3.0, 1);
    FAIL() << "expected NonIntegerReplication";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonIntegerReplication);
  }
  EXPECT_FALSE(union_bound_for(3, 4, 0.1, 1).has_value());
  EXPECT_TRUE(union_bound_for(3, 6, 0.1, 1).has_value());
}

TEST(BalancedEmbedding, Examples) {
  const DfgEmbedding a = balanced_embedding(2, 4, 1);
  for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(a.x.col_count(s), 1U);
  EXPECT_EQ(replica_counts(a), (std::vector<std::size_t>{2, 2}));

  const DfgEmbedding b = balanced_embedding(4, 4, 4);
  EXPECT_EQ(b.x.count(), 16U);

  const DfgEmbedding c = balanced_embedding(3, 2, 2);
  for (std::size_t s = 0; s < 2; ++s) EXPECT_EQ(c.x.col_count(s), 2U);
  auto counts = replica_counts(c);
  std::sort(counts.begin(), counts.end());
  EXPECT_EQ(counts, (std::vector<std::size_t>{1, 1, 2}));
}

TEST(BalancedEmbedding, StructuralContract) {
  for (std::size_t n_v = 1; n_v <= 6; ++n_v) {
    for (std::size_t n_s = 1; n_s <= 7; ++n_s) {
      for (int load = 0; load <= 7; ++load) {
        const DfgEmbedding emb = balanced_embedding(n_v, n_s, load);
        const std::size_t per_server = std::min<std::size_t>(load, n_v);
        for (std::size_t s = 0; s < n_s; ++s) EXPECT_EQ(emb.x.col_count(s), per_server);
        const auto counts = replica_counts(emb);
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        EXPECT_LE(*hi - *lo, 1U);
        if ((n_s * load) % n_v == 0 && static_cast<std::size_t>(load) <= n_v) {
          EXPECT_EQ(*lo, n_s * load / n_v);
        }
      }
    }
  }
}

TEST(UnionBoundObjective, Examples) {
  EXPECT_NEAR(union_bound_objective(balanced_embedding(2, 4, 1), 0.1), 0.02, 1e-15);
  EXPECT_EQ(union_bound_objective(DfgEmbedding{BoolMatrix(3, 4)}, 0.2), 3.0);
  EXPECT_EQ(union_bound_objective(balanced_embedding(2, 4, 1), 0.0), 0.0);
}

TEST(BruteForceMinUnionBound, Examples) {
  const DfgOptimum a = brute_force_min_union_bound(2, 2, 1, 0.3);
  EXPECT_NEAR(a.value, 0.6, 1e-12);
  EXPECT_EQ(replica_counts(a.embedding), (std::vector<std::size_t>{1, 1}));

  EXPECT_NEAR(brute_force_min_union_bound(1, 2, 1, 0.3).value, 0.09, 1e-12);

  const DfgOptimum zero = brute_force_min_union_bound(3, 2, 0, 0.3);
  EXPECT_EQ(zero.value, 3.0);
  EXPECT_EQ(zero.embedding.x.count(), 0U);
}

TEST(BruteForceMinUnionBound, GuardedByEnumerationLimit) {
  try {
    brute_force_min_union_bound(3, 7, 2, 0.1);
    FAIL() << "expected EnumerationLimitExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationLimitExceeded);
  }
}

TEST(BalancedReplication, BalancedIsOptimalAndMatchesClosedForm) {
  for (std::size_t n_v = 1; n_v <= 4; ++n_v) {
    for (std::size_t n_s = 1; n_s * n_v <= 16; ++n_s) {
      for (int load = 0; load <= 3; ++load) {
        if ((n_s * load) % n_v != 0) continue;
        for (double p : {0.05, 0.2, 0.5}) {
          const double closed =
              n_v * std::pow(p, static_cast<double>(n_s) / n_v * std::min<double>(load, n_v));
          const double balanced = union_bound_objective(balanced_embedding(n_v, n_s, load), p);
          const double brute = brute_force_min_union_bound(n_v, n_s, load, p).value;
          EXPECT_NEAR(balanced, brute, 1e-12) << n_v << ' ' << n_s << ' ' << load << ' ' << p;
          EXPECT_NEAR(balanced, closed, 1e-12) << n_v << ' ' << n_s << ' ' << load << ' ' << p;
        }
      }
    }
  }
}

TEST(BalancedReplication, BoundIsValid) {
  for (std::size_t n_v = 1; n_v <= 5; ++n_v) {
    for (std::size_t n_s = 1; n_s <= 10; ++n_s) {
      for (int load = 0; load <= 6; ++load) {
        for (double p : {0.01, 0.15, 0.6, 1.0}) {
          const auto bound = union_bound_for(n_v, n_s, p, load);
          if (!bound) continue;
          const DfgInstance inst{n_v, n_s, p, load};
          EXPECT_GE(dfg_reliability(inst, balanced_embedding(n_v, n_s, load)), *bound - 1e-12);
        }
      }
    }
  }
}

TEST(UnionBoundObjective, SchurConvexUnderRebalancing) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n_v = 2 + rng() % 4;
    const std::size_t n_s = 2 + rng() % 6;
    BoolMatrix x(n_v, n_s);
    for (std::size_t v = 0; v < n_v; ++v)
      for (std::size_t s = 0; s < n_s; ++s) x.set(v, s, rng() % 2 == 0);
    const double p = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    DfgEmbedding emb{x};
    const std::size_t hi = rng() % n_v;
    const std::size_t lo = rng() % n_v;
    if (emb.replicas(hi) <= emb.replicas(lo) + 1) continue;
    const double before = union_bound_objective(emb, p);
    // Move one replica from `hi` to a server where `lo` is absent.
    for (std::size_t s = 0; s < n_s; ++s) {
      if (emb.x(hi, s) && !emb.x(lo, s)) {
        emb.x.set(hi, s, false);
        emb.x.set(lo, s, true);
        break;
      }
    }
    EXPECT_LE(union_bound_objective(emb, p), before + 1e-12);
  }
}

}  // namespace
}  // namespace nfvrel

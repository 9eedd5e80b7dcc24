#include "nfvrel/solver.hpp"

#include <algorithm>
#include <chrono>
#include <fmt/format.h>
#include <numeric>
#include <random>

#include "nfvrel/random.hpp"
#include "nfvrel/reliability.hpp"

namespace nfvrel {
namespace {

void require_capacity(const LogicalLayer& logical) {
  if (logical.capacities.size() != logical.n_cvnf) {
    throw Error(ErrorCode::kDimensionMismatch, "capacities size differs from n_cvnf");
  }
  if (logical.total_capacity() < static_cast<long>(logical.n_rvnf)) {
    throw Error(ErrorCode::kCapacityDeficit,
                fmt::format("total CVNF capacity {} is below n_rvnf = {}",
                            logical.total_capacity(), logical.n_rvnf));
  }
}

ChainComposition contiguous(const std::vector<long>& counts) {
  ChainComposition cc;
  for (std::size_t u = 0; u < counts.size(); ++u)
    for (long i = 0; i < counts[u]; ++i) cc.assignment.push_back(u);
  return cc;
}

struct DescentState {
  Embedding embedding;
  ChainComposition cc;
};

bool link_ok_for_cvnf(const Instance& inst, const DescentState& st, std::size_t u,
                      std::size_t s) {
  for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v) {
    if (st.cc.cvnf_of(v) != u) continue;
    if (st.embedding.x_r.row_mask(v) & ~inst.topology.neighbors(s)) return false;
  }
  return true;
}

bool link_ok_for_rvnf(const Instance& inst, const DescentState& st, std::size_t v,
                      std::size_t t) {
  return (st.embedding.x_c.row_mask(st.cc.cvnf_of(v)) & ~inst.topology.neighbors(t)) == 0;
}

DescentState initial_state(const Instance& inst, const std::optional<ChainComposition>& cc_fixed,
                           InitStrategy strategy, std::uint64_t seed) {
  const std::size_t n = inst.n_servers();
  DescentState st{Embedding::zeros(inst.logical, n),
                  cc_fixed ? *cc_fixed : cc_min(inst.logical)};
  std::vector<long> load(n, 0);

  switch (strategy) {
    case InitStrategy::kZero:
      break;

    case InitStrategy::kRoundRobin: {
      const std::size_t n_cvnf = inst.logical.n_cvnf;
      for (std::size_t u = 0; u < n_cvnf; ++u) {
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t s = (u + k) % n;
          if (load[s] < inst.load_budget) {
            st.embedding.x_c.set(u, s, true);
            ++load[s];
            break;
          }
        }
      }
      for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v) {
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t t = (n_cvnf + v + k) % n;
          if (load[t] < inst.load_budget && link_ok_for_rvnf(inst, st, v, t)) {
            st.embedding.x_r.set(v, t, true);
            ++load[t];
            break;
          }
        }
      }
      break;
    }

    case InitStrategy::kRandom: {
      std::mt19937_64 rng(seed);
      if (!cc_fixed) {
        std::vector<long> counts(inst.logical.n_cvnf, 0);
        for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v) {
          std::vector<std::size_t> open;
          for (std::size_t u = 0; u < inst.logical.n_cvnf; ++u)
            if (counts[u] < inst.logical.capacities[u]) open.push_back(u);
          const std::size_t u = open[rng() % open.size()];
          ++counts[u];
          st.cc.assignment[v] = u;
        }
      }
      // (is_cvnf, row, server) triples visited in shuffled order.
      struct Slot {
        bool cvnf;
        std::size_t row;
        std::size_t server;
      };
      std::vector<Slot> slots;
      for (std::size_t u = 0; u < inst.logical.n_cvnf; ++u)
        for (std::size_t s = 0; s < n; ++s) slots.push_back({true, u, s});
      for (std::size_t v = 0; v < inst.logical.n_rvnf; ++v)
        for (std::size_t s = 0; s < n; ++s) slots.push_back({false, v, s});
      for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng() % i]);
      for (const Slot& slot : slots) {
        if ((rng() & 1U) == 0 || load[slot.server] >= inst.load_budget) continue;
        if (slot.cvnf) {
          if (!link_ok_for_cvnf(inst, st, slot.row, slot.server)) continue;
          st.embedding.x_c.set(slot.row, slot.server, true);
        } else {
          if (!link_ok_for_rvnf(inst, st, slot.row, slot.server)) continue;
          st.embedding.x_r.set(slot.row, slot.server, true);
        }
        ++load[slot.server];
      }
      break;
    }
  }
  return st;
}

struct DescentRun {
  DescentState state;
  std::vector<double> trace;
  double surrogate = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t nodes = 0;
  bool node_limit_hit = false;
};

DescentRun descend(const Instance& inst, const std::optional<ChainComposition>& cc_fixed,
                   const SolverConfig& cfg, DescentState st) {
  DescentRun run;
  double previous = surrogate_objective(inst, st.cc, st.embedding);
  run.surrogate = previous;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    SubproblemOptions options;
    options.node_limit = cfg.node_limit;

    Subproblem regular{Block::kRegular, st.embedding.x_c, &inst, cc_fixed};
    options.warm_placement = st.embedding.x_r;
    options.warm_cc = st.cc;
    SubproblemResult r = solve_subproblem_exact(regular, options);
    st.embedding.x_r = std::move(r.placement);
    st.cc = std::move(r.cc);

    Subproblem controller{Block::kController, st.embedding.x_r, &inst, cc_fixed};
    options.warm_placement = st.embedding.x_c;
    options.warm_cc = st.cc;
    SubproblemResult c = solve_subproblem_exact(controller, options);
    st.embedding.x_c = std::move(c.placement);
    st.cc = std::move(c.cc);

    run.nodes += r.nodes + c.nodes;
    run.node_limit_hit = run.node_limit_hit || r.node_limit_hit || c.node_limit_hit;
    run.trace.push_back(c.surrogate);
    run.surrogate = c.surrogate;
    run.iterations = it;
    if (c.surrogate - previous < cfg.epsilon) {
      run.converged = true;
      break;
    }
    previous = c.surrogate;
  }
  run.state = std::move(st);
  return run;
}

SolveReport solve_with(const Instance& inst, const std::optional<ChainComposition>& cc_fixed,
                       const SolverConfig& cfg) {
  if (cfg.max_iterations < 1 || !(cfg.epsilon > 0.0) || cfg.restarts < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "solver needs max_iterations >= 1, epsilon > 0 and restarts >= 1");
  }
  const auto start = std::chrono::steady_clock::now();
  SolveReport best;
  bool have_best = false;
  std::uint64_t nodes = 0;
  bool node_limit_hit = false;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    const InitStrategy strategy = restart == 0 ? cfg.init_strategy : InitStrategy::kRandom;
    const std::uint64_t seed =
        restart == 0 ? cfg.seed : mix_seed(cfg.seed, static_cast<std::uint64_t>(restart));
    DescentRun run = descend(inst, cc_fixed, cfg, initial_state(inst, cc_fixed, strategy, seed));
    nodes += run.nodes;
    node_limit_hit = node_limit_hit || run.node_limit_hit;
    const double reliability =
        exact_reliability(inst, run.state.cc, run.state.embedding).value;
    const bool better = !have_best || reliability > best.exact_reliability + 1e-12 ||
                        (reliability >= best.exact_reliability - 1e-12 &&
                         run.surrogate > best.surrogate + 1e-12);
    if (better) {
      best.embedding = std::move(run.state.embedding);
      best.cc = std::move(run.state.cc);
      best.surrogate_trace = std::move(run.trace);
      best.surrogate = run.surrogate;
      best.exact_reliability = reliability;
      best.iterations = run.iterations;
      best.converged = run.converged;
      have_best = true;
    }
  }
  best.nodes_explored = nodes;
  best.node_limit_hit = node_limit_hit;
  best.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace

ChainComposition cc_min(const LogicalLayer& logical) {
  require_capacity(logical);
  std::vector<long> counts(logical.n_cvnf, 0);
  std::size_t placed = 0;
  while (placed < logical.n_rvnf) {
    for (std::size_t u = 0; u < logical.n_cvnf && placed < logical.n_rvnf; ++u) {
      if (counts[u] < logical.capacities[u]) {
        ++counts[u];
        ++placed;
      }
    }
  }
  return contiguous(counts);
}

ChainComposition cc_max(const LogicalLayer& logical) {
  require_capacity(logical);
  std::vector<long> counts(logical.n_cvnf, 0);
  long left = static_cast<long>(logical.n_rvnf);
  for (std::size_t u = 0; u < logical.n_cvnf && left > 0; ++u) {
    counts[u] = std::min<long>(logical.capacities[u], left);
    left -= counts[u];
  }
  return contiguous(counts);
}

SolveReport bcd_solve(const Instance& inst, const SolverConfig& cfg) {
  return solve_with(inst, std::nullopt, cfg);
}

SolveReport fge_only_solve(const Instance& inst, const ChainComposition& cc,
                           const SolverConfig& cfg) {
  return solve_with(inst, ChainComposition::from_assignment(cc.assignment, inst.logical), cfg);
}

JointOptimum brute_force_joint(const Instance& inst,
                               const std::optional<ChainComposition>& cc_fixed) {
  const std::size_t n = inst.n_servers();
  const auto& logical = inst.logical;

  std::vector<ChainComposition> compositions;
  if (cc_fixed) {
    compositions.push_back(ChainComposition::from_assignment(cc_fixed->assignment, logical));
  } else {
    std::vector<std::size_t> assignment(logical.n_rvnf, 0);
    std::vector<long> counts(logical.n_cvnf, 0);
    auto rec = [&](auto&& self, std::size_t v) -> void {
      if (v == logical.n_rvnf) {
        compositions.push_back(ChainComposition{assignment});
        return;
      }
      for (std::size_t u = 0; u < logical.n_cvnf; ++u) {
        if (counts[u] >= logical.capacities[u]) continue;
        assignment[v] = u;
        ++counts[u];
        self(self, v + 1);
        --counts[u];
      }
    };
    rec(rec, 0);
  }

  const std::size_t bits_c = logical.n_cvnf * n;
  const std::size_t bits_r = logical.n_rvnf * n;
  if (bits_c + bits_r > 40 ||
      compositions.size() * (std::uint64_t{1} << (bits_c + bits_r)) > kBruteForceJointLimit) {
    throw Error(ErrorCode::kEnumerationLimitExceeded,
                fmt::format("{} compositions x 2^{} placements exceed the brute-force limit",
                            compositions.size(), bits_c + bits_r));
  }

  auto decode = [n](std::uint64_t code, std::size_t rows) {
    BoolMatrix m(rows, n);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, (code >> (i * n + j)) & 1U);
    return m;
  };
  auto loads = [n](const BoolMatrix& m) {
    std::vector<long> out(n, 0);
    for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<long>(m.col_count(j));
    return out;
  };

  JointOptimum best{-1.0, Embedding::zeros(logical, n), compositions.front()};
  for (const ChainComposition& cc : compositions) {
    for (std::uint64_t code_c = 0; code_c < (std::uint64_t{1} << bits_c); ++code_c) {
      BoolMatrix x_c = decode(code_c, logical.n_cvnf);
      const auto load_c = loads(x_c);
      if (std::any_of(load_c.begin(), load_c.end(),
                      [&](long l) { return l > inst.load_budget; })) {
        continue;
      }
      for (std::uint64_t code_r = 0; code_r < (std::uint64_t{1} << bits_r); ++code_r) {
        Embedding emb{x_c, decode(code_r, logical.n_rvnf)};
        if (!check_feasibility(inst, cc, emb).feasible()) continue;
        const double value = exact_reliability(inst, cc, emb).value;
        if (value > best.reliability + 1e-12) best = JointOptimum{value, std::move(emb), cc};
      }
    }
  }
  return best;
}

}  // namespace nfvrel

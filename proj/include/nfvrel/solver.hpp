#pragma once

// Joint chain composition and embedding by block coordinate descent.
//
// Each iteration solves two binary subproblems exactly: the regular block
// (RVNF placement and composition, CVNF placement frozen) and the controller
// block (CVNF placement and composition, RVNF placement frozen). Both maximize
// the hinge/l1 surrogate
//
//   sum_f P(f) * min(1, 1 - N_{V,R} + sum_{u,v} psi_uv(f))
//
// where psi_uv(f) counts active linked server pairs hosting CVNF u and its
// RVNF v. For fixed binaries the best epigraph variable of state f is exactly
// that min(...), so the subproblems are searched over binaries only.

#include <cstdint>
#include <optional>
#include <vector>

#include "nfvrel/model.hpp"

namespace nfvrel {

enum class Block { kRegular, kController };

struct Subproblem {
  Block block = Block::kRegular;
  // Frozen placement: x_c for the regular block, x_r for the controller block.
  BoolMatrix fixed_block;
  const Instance* instance = nullptr;
  // Set in FGE-only mode; the composition is then not a decision variable.
  std::optional<ChainComposition> cc_fixed;
};

struct SubproblemOptions {
  std::uint64_t node_limit = 50'000'000;
  // Feasible starting point (placement of the free block and composition);
  // the returned value is never below it.
  std::optional<BoolMatrix> warm_placement;
  std::optional<ChainComposition> warm_cc;
};

struct SubproblemResult {
  BoolMatrix placement;  // the free block
  ChainComposition cc;
  double surrogate = 0.0;
  std::uint64_t nodes = 0;
  bool node_limit_hit = false;
};

// Global optimum of the block subproblem by depth-first branch-and-bound:
// composition first (when free), then placement bits in round-robin order
// over servers sorted by descending degree, one-branch first. The bound fills
// every undecided bit with its best coefficient per state, capped by each
// server's remaining load. When no placement can raise the objective, returns
// one replica per VNF of the block dealt round-robin.
SubproblemResult solve_subproblem_exact(const Subproblem& sub,
                                        const SubproblemOptions& options = {});

enum class InitStrategy { kZero, kRoundRobin, kRandom };

struct SolverConfig {
  int max_iterations = 20;
  double epsilon = 1e-9;
  InitStrategy init_strategy = InitStrategy::kZero;
  std::uint64_t seed = 0;  // used by kRandom and by restarts after the first
  int restarts = 1;
  std::uint64_t node_limit = 50'000'000;
};

struct SolveReport {
  Embedding embedding;
  ChainComposition cc;
  std::vector<double> surrogate_trace;  // surrogate after each iteration
  double surrogate = 0.0;
  double exact_reliability = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  std::uint64_t nodes_explored = 0;
  bool node_limit_hit = false;

  double outage() const { return 1.0 - exact_reliability; }
};

SolveReport bcd_solve(const Instance& inst, const SolverConfig& cfg = {});

// Same descent with the composition frozen to `cc` in both blocks.
SolveReport fge_only_solve(const Instance& inst, const ChainComposition& cc,
                           const SolverConfig& cfg = {});

// RVNFs spread over CVNFs as evenly as the capacities allow, contiguous in
// index order.
ChainComposition cc_min(const LogicalLayer& logical);

// CVNFs filled to capacity in index order.
ChainComposition cc_max(const LogicalLayer& logical);

struct JointOptimum {
  double reliability = 0.0;
  Embedding embedding;
  ChainComposition cc;
};

inline constexpr std::uint64_t kBruteForceJointLimit = std::uint64_t{1} << 22;

// Exhaustive maximum of the exact reliability over all feasible compositions
// and placements; ties go to the first encoding in enumeration order
// (composition, then x_c row-major, then x_r row-major, counting upward).
// With `cc_fixed` only placements are enumerated.
JointOptimum brute_force_joint(const Instance& inst,
                               const std::optional<ChainComposition>& cc_fixed = std::nullopt);

}  // namespace nfvrel

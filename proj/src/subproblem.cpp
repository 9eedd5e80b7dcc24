#include <algorithm>
#include <bit>
#include <fmt/format.h>
#include <numeric>

#include "nfvrel/reliability.hpp"
#include "nfvrel/solver.hpp"

namespace nfvrel {
namespace {

constexpr double kImprovementTol = 1e-12;
constexpr int kUnassigned = -1;

// Objective of one block for a fixed composition: linear in the free bits,
// sum_f w_f * min(1, base + sum_{i,j} x_ij * coef_f(i, j)).
struct LinearBlock {
  std::vector<int> coef;            // [(state * rows + row) * servers + server]
  std::vector<ServerMask> allowed;  // per row: servers the link constraint permits
};

class BlockSearch {
 public:
  BlockSearch(const Subproblem& sub, const SubproblemOptions& options)
      : sub_(sub),
        inst_(*sub.instance),
        options_(options),
        n_servers_(inst_.n_servers()),
        n_cvnf_(inst_.logical.n_cvnf),
        n_rvnf_(inst_.logical.n_rvnf),
        n_rows_(sub.block == Block::kRegular ? n_rvnf_ : n_cvnf_),
        base_(1 - static_cast<int>(n_rvnf_)) {
    validate_inputs();
    const StateProbabilityTable prob(inst_.failures);
    for (ServerMask f = 0; f < (ServerMask{1} << n_servers_); ++f) {
      const double w = prob(f);
      if (w > 0.0) {
        states_.push_back(f);
        weights_.push_back(w);
      }
    }
    base_value_ = 0.0;
    for (double w : weights_) base_value_ += w * std::min(1, base_);

    for (std::size_t s = 0; s < n_servers_; ++s) neighbors_.push_back(inst_.topology.neighbors(s));
    for (std::size_t r = 0; r < sub.fixed_block.rows(); ++r)
      fixed_hosts_.push_back(sub.fixed_block.row_mask(r));
    for (std::size_t s = 0; s < n_servers_; ++s) {
      const long left = inst_.load_budget - static_cast<long>(sub.fixed_block.col_count(s));
      capacity_.push_back(static_cast<int>(std::max(0L, left)));
    }

    std::vector<std::size_t> servers(n_servers_);
    std::iota(servers.begin(), servers.end(), 0);
    std::stable_sort(servers.begin(), servers.end(), [&](std::size_t a, std::size_t b) {
      return inst_.topology.degree(a) > inst_.topology.degree(b);
    });
    for (std::size_t round = 0; round < n_servers_; ++round)
      for (std::size_t i = 0; i < n_rows_; ++i)
        order_.push_back({i, servers[(i + round) % n_servers_]});

    precompute_partner_tables();
  }

  SubproblemResult run() {
    used_.assign(n_servers_, 0);
    sums_.assign(states_.size(), 0);
    bits_ = BoolMatrix(n_rows_, n_servers_);
    assignment_.assign(n_rvnf_, kUnassigned);
    cc_counts_.assign(n_cvnf_, 0);

    const ChainComposition first_cc = first_composition();
    best_value_ = -std::numeric_limits<double>::infinity();
    if (!install_warm_start()) {
      best_cc_ = first_cc;
      best_placement_ = BoolMatrix(n_rows_, n_servers_);
      best_value_ = base_value_;
    }

    std::fill(assignment_.begin(), assignment_.end(), kUnassigned);
    std::fill(cc_counts_.begin(), cc_counts_.end(), 0);
    if (sub_.cc_fixed) load_composition(*sub_.cc_fixed);
    const LinearBlock root = build_block();
    if (bound(root, 0) <= base_value_ + kImprovementTol) {
      return canonical(options_.warm_cc && !sub_.cc_fixed ? *options_.warm_cc : first_cc);
    }

    if (sub_.cc_fixed) {
      search_placements(root, 0);
    } else {
      search_compositions(0);
    }
    return SubproblemResult{best_placement_, best_cc_, best_value_, nodes_, aborted_};
  }

 private:
  struct Bit {
    std::size_t row;
    std::size_t server;
  };

  void validate_inputs() const {
    const std::size_t fixed_rows = sub_.block == Block::kRegular ? n_cvnf_ : n_rvnf_;
    if (sub_.fixed_block.rows() != fixed_rows || sub_.fixed_block.cols() != n_servers_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("frozen block is {}x{}, expected {}x{}", sub_.fixed_block.rows(),
                              sub_.fixed_block.cols(), fixed_rows, n_servers_));
    }
    if (n_servers_ > kEnumerationLimit) {
      throw Error(ErrorCode::kEnumerationLimitExceeded,
                  fmt::format("{} servers exceed the enumeration limit of {}", n_servers_,
                              kEnumerationLimit));
    }
    for (std::size_t s = 0; s < n_servers_; ++s) {
      if (static_cast<long>(sub_.fixed_block.col_count(s)) > inst_.load_budget) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("frozen block alone exceeds the load budget on server {}", s));
      }
    }
    if (sub_.cc_fixed) ChainComposition::from_assignment(sub_.cc_fixed->assignment, inst_.logical);
  }

  // Per-state support counts of the frozen block, independent of composition.
  // Regular block: partner_[(k * n_cvnf + u) * n + t] = pairs CVNF u offers
  // an RVNF replica on t. Controller block: partner_[(k * n_rvnf + v) * n + s]
  // = pairs RVNF v offers a CVNF replica on s.
  void precompute_partner_tables() {
    const std::size_t partners = sub_.fixed_block.rows();
    partner_.assign(states_.size() * partners * n_servers_, 0);
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const ServerMask f = states_[k];
      for (std::size_t p = 0; p < partners; ++p) {
        const ServerMask active = fixed_hosts_[p] & f;
        for (std::size_t j = 0; j < n_servers_; ++j) {
          if (!((f >> j) & 1U)) continue;
          partner_[(k * partners + p) * n_servers_ + j] = std::popcount(active & neighbors_[j]);
        }
      }
    }
    partner_allowed_.resize(partners);
    for (std::size_t p = 0; p < partners; ++p) {
      ServerMask ok = 0;
      for (std::size_t j = 0; j < n_servers_; ++j)
        if ((fixed_hosts_[p] & ~neighbors_[j]) == 0) ok |= ServerMask{1} << j;
      partner_allowed_[p] = ok;
    }
  }

  bool cvnf_has_room(std::size_t u) const {
    return static_cast<long>(cc_counts_[u]) < inst_.logical.capacities[u];
  }

  // Coefficients for the current (possibly partial) composition. Undecided
  // RVNFs are counted optimistically, so the block's bound stays admissible.
  LinearBlock build_block() const {
    LinearBlock block;
    block.coef.assign(states_.size() * n_rows_ * n_servers_, 0);
    block.allowed.assign(n_rows_, 0);
    const std::size_t n = n_servers_;

    if (sub_.block == Block::kRegular) {
      for (std::size_t v = 0; v < n_rvnf_; ++v) {
        ServerMask allowed = 0;
        for (std::size_t u = 0; u < n_cvnf_; ++u) {
          const bool candidate = assignment_[v] == kUnassigned
                                     ? cvnf_has_room(u)
                                     : assignment_[v] == static_cast<int>(u);
          if (!candidate) continue;
          allowed |= partner_allowed_[u];
          for (std::size_t k = 0; k < states_.size(); ++k) {
            const int* src = &partner_[(k * n_cvnf_ + u) * n];
            int* dst = &block.coef[(k * n_rows_ + v) * n];
            for (std::size_t t = 0; t < n; ++t)
              if ((partner_allowed_[u] >> t) & 1U) dst[t] = std::max(dst[t], src[t]);
          }
        }
        block.allowed[v] = allowed;
      }
    } else {
      std::vector<ServerMask> monitored_hosts(n_cvnf_, 0);
      for (std::size_t v = 0; v < n_rvnf_; ++v)
        if (assignment_[v] != kUnassigned) monitored_hosts[assignment_[v]] |= fixed_hosts_[v];
      for (std::size_t u = 0; u < n_cvnf_; ++u) {
        ServerMask allowed = 0;
        for (std::size_t s = 0; s < n; ++s)
          if ((monitored_hosts[u] & ~neighbors_[s]) == 0) allowed |= ServerMask{1} << s;
        block.allowed[u] = allowed;
        for (std::size_t v = 0; v < n_rvnf_; ++v) {
          const bool contributes = assignment_[v] == kUnassigned
                                       ? cvnf_has_room(u)
                                       : assignment_[v] == static_cast<int>(u);
          if (!contributes) continue;
          for (std::size_t k = 0; k < states_.size(); ++k) {
            const int* src = &partner_[(k * n_rvnf_ + v) * n];
            int* dst = &block.coef[(k * n_rows_ + u) * n];
            for (std::size_t s = 0; s < n; ++s)
              if ((allowed >> s) & 1U) dst[s] += src[s];
          }
        }
      }
    }
    return block;
  }

  double value_of_sums() const {
    double value = 0.0;
    for (std::size_t k = 0; k < states_.size(); ++k)
      value += weights_[k] * std::min(1, base_ + sums_[k]);
    return value;
  }

  // Optimistic objective with bits order_[depth..] undecided: each server's
  // remaining load goes to its largest undecided coefficients, per state.
  double bound(const LinearBlock& block, std::size_t depth) {
    const std::size_t n = n_servers_;
    column_rows_.resize(n);
    for (auto& rows : column_rows_) rows.clear();
    for (std::size_t d = depth; d < order_.size(); ++d) {
      const Bit& b = order_[d];
      if ((block.allowed[b.row] >> b.server) & 1U) column_rows_[b.server].push_back(b.row);
    }
    const int cap_needed = 1 - base_;
    double total = 0.0;
    for (std::size_t k = 0; k < states_.size(); ++k) {
      int sum = sums_[k];
      for (std::size_t j = 0; j < n && sum < cap_needed; ++j) {
        const int room = capacity_[j] - used_[j];
        const auto& rows = column_rows_[j];
        if (room <= 0 || rows.empty()) continue;
        if (static_cast<std::size_t>(room) >= rows.size()) {
          for (std::size_t i : rows) sum += block.coef[(k * n_rows_ + i) * n + j];
        } else {
          scratch_.clear();
          for (std::size_t i : rows) scratch_.push_back(block.coef[(k * n_rows_ + i) * n + j]);
          std::partial_sort(scratch_.begin(), scratch_.begin() + room, scratch_.end(),
                            std::greater<>());
          for (int c = 0; c < room; ++c) sum += scratch_[c];
        }
      }
      total += weights_[k] * std::min(1, base_ + sum);
    }
    return total;
  }

  bool tick() {
    if (aborted_) return false;
    if (++nodes_ > options_.node_limit) {
      aborted_ = true;
      return false;
    }
    return true;
  }

  void search_compositions(std::size_t v) {
    if (!tick()) return;
    const LinearBlock block = build_block();
    if (v == n_rvnf_) {
      search_placements(block, 0);
      return;
    }
    if (bound(block, 0) <= best_value_ + kImprovementTol) return;
    for (std::size_t u = 0; u < n_cvnf_; ++u) {
      if (!cvnf_has_room(u)) continue;
      assignment_[v] = static_cast<int>(u);
      ++cc_counts_[u];
      search_compositions(v + 1);
      --cc_counts_[u];
      assignment_[v] = kUnassigned;
      if (aborted_) return;
    }
  }

  void apply(const LinearBlock& block, const Bit& b, int sign) {
    const std::size_t n = n_servers_;
    for (std::size_t k = 0; k < states_.size(); ++k)
      sums_[k] += sign * block.coef[(k * n_rows_ + b.row) * n + b.server];
    used_[b.server] += sign;
    bits_.set(b.row, b.server, sign > 0);
  }

  void search_placements(const LinearBlock& block, std::size_t depth) {
    if (!tick()) return;
    if (depth == order_.size()) {
      const double value = value_of_sums();
      if (value > best_value_ + kImprovementTol) {
        best_value_ = value;
        best_placement_ = bits_;
        best_cc_ = current_composition();
      }
      return;
    }
    if (bound(block, depth) <= best_value_ + kImprovementTol) return;
    const Bit b = order_[depth];
    if (((block.allowed[b.row] >> b.server) & 1U) && used_[b.server] < capacity_[b.server]) {
      apply(block, b, +1);
      search_placements(block, depth + 1);
      apply(block, b, -1);
      if (aborted_) return;
    }
    search_placements(block, depth + 1);
  }

  ChainComposition current_composition() const {
    ChainComposition cc;
    cc.assignment.reserve(n_rvnf_);
    for (int u : assignment_) cc.assignment.push_back(static_cast<std::size_t>(u));
    return cc;
  }

  // First composition in search order: each RVNF to the lowest-index CVNF
  // with room left.
  ChainComposition first_composition() const {
    if (sub_.cc_fixed) return *sub_.cc_fixed;
    ChainComposition cc;
    std::vector<long> counts(n_cvnf_, 0);
    for (std::size_t v = 0; v < n_rvnf_; ++v) {
      std::size_t u = 0;
      while (u < n_cvnf_ && counts[u] >= inst_.logical.capacities[u]) ++u;
      ++counts[u];
      cc.assignment.push_back(u);
    }
    return cc;
  }

  void load_composition(const ChainComposition& cc) {
    std::fill(cc_counts_.begin(), cc_counts_.end(), 0);
    for (std::size_t v = 0; v < n_rvnf_; ++v) {
      assignment_[v] = static_cast<int>(cc.assignment[v]);
      ++cc_counts_[cc.assignment[v]];
    }
  }

  bool install_warm_start() {
    if (!options_.warm_placement) return false;
    const BoolMatrix& x = *options_.warm_placement;
    if (x.rows() != n_rows_ || x.cols() != n_servers_) return false;
    ChainComposition cc;
    if (sub_.cc_fixed) {
      cc = *sub_.cc_fixed;
    } else if (options_.warm_cc) {
      try {
        cc = ChainComposition::from_assignment(options_.warm_cc->assignment, inst_.logical);
      } catch (const Error&) {
        return false;
      }
    } else {
      return false;
    }
    load_composition(cc);
    const LinearBlock block = build_block();
    for (std::size_t j = 0; j < n_servers_; ++j)
      if (static_cast<int>(x.col_count(j)) > capacity_[j]) return false;
    for (std::size_t i = 0; i < n_rows_; ++i)
      if ((x.row_mask(i) & ~block.allowed[i]) != 0) return false;

    std::fill(sums_.begin(), sums_.end(), 0);
    for (std::size_t i = 0; i < n_rows_; ++i)
      for (std::size_t j = 0; j < n_servers_; ++j)
        if (x(i, j))
          for (std::size_t k = 0; k < states_.size(); ++k)
            sums_[k] += block.coef[(k * n_rows_ + i) * n_servers_ + j];
    best_value_ = value_of_sums();
    best_placement_ = x;
    best_cc_ = cc;
    std::fill(sums_.begin(), sums_.end(), 0);
    std::fill(cc_counts_.begin(), cc_counts_.end(), 0);
    return true;
  }

  // One replica per row, dealt in search order; used when the objective is
  // flat so the next block has placements to pair with.
  SubproblemResult canonical(const ChainComposition& cc) {
    load_composition(cc);
    const LinearBlock block = build_block();
    BoolMatrix x(n_rows_, n_servers_);
    std::vector<int> used(n_servers_, 0);
    std::vector<bool> placed(n_rows_, false);
    for (const Bit& b : order_) {
      if (placed[b.row] || !((block.allowed[b.row] >> b.server) & 1U)) continue;
      if (used[b.server] >= capacity_[b.server]) continue;
      x.set(b.row, b.server, true);
      ++used[b.server];
      placed[b.row] = true;
    }
    std::fill(sums_.begin(), sums_.end(), 0);
    for (std::size_t i = 0; i < n_rows_; ++i)
      for (std::size_t j = 0; j < n_servers_; ++j)
        if (x(i, j))
          for (std::size_t k = 0; k < states_.size(); ++k)
            sums_[k] += block.coef[(k * n_rows_ + i) * n_servers_ + j];
    return SubproblemResult{std::move(x), cc, value_of_sums(), nodes_, false};
  }

  const Subproblem& sub_;
  const Instance& inst_;
  const SubproblemOptions& options_;
  std::size_t n_servers_;
  std::size_t n_cvnf_;
  std::size_t n_rvnf_;
  std::size_t n_rows_;
  int base_;
  double base_value_ = 0.0;

  std::vector<ServerMask> states_;
  std::vector<double> weights_;
  std::vector<ServerMask> neighbors_;
  std::vector<ServerMask> fixed_hosts_;
  std::vector<int> capacity_;
  std::vector<Bit> order_;
  std::vector<int> partner_;
  std::vector<ServerMask> partner_allowed_;

  // Search state.
  std::vector<int> assignment_;
  std::vector<std::size_t> cc_counts_;
  std::vector<int> used_;
  std::vector<int> sums_;
  BoolMatrix bits_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;

  double best_value_ = 0.0;
  BoolMatrix best_placement_;
  ChainComposition best_cc_;

  std::vector<std::vector<std::size_t>> column_rows_;
  std::vector<int> scratch_;
};

}  // namespace

SubproblemResult solve_subproblem_exact(const Subproblem& sub, const SubproblemOptions& options) {
  if (sub.instance == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "subproblem has no instance");
  }
  BlockSearch search(sub, options);
  return search.run();
}

}  // namespace nfvrel

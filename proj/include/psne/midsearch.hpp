#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "psne/equilibrium.hpp"
#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/midval.hpp"
#include "psne/oracle.hpp"
#include "psne/run.hpp"

namespace psne {

enum class StageKind { kRows, kCols, kTerminal };

inline const char* to_string(StageKind k) {
  switch (k) {
    case StageKind::kRows: return "rows";
    case StageKind::kCols: return "cols";
    case StageKind::kTerminal: return "terminal";
  }
  return "?";
}

struct StageRecord {
  StageKind kind = StageKind::kTerminal;
  std::size_t rows = 0;  // |X_t| on entry
  std::size_t cols = 0;  // |Y_t| on entry
  double epsilon = 0.0;  // midval accuracy (0 for the terminal stage)
  std::optional<std::size_t> pivot;  // chosen column (row stage) or row (column stage)
  std::vector<std::size_t> eliminated;
  std::uint64_t samples = 0;
};

struct GapSearchResult {
  Cell cell;
  bool degraded = false;  // the terminal empirical submatrix had no saddle point
  std::vector<StageRecord> stages;
  std::uint64_t samples = 0;
};

namespace detail {

inline std::uint64_t checked_pulls(double x, std::size_t copies) {
  const double c = std::ceil(x);
  if (!(c * static_cast<double>(copies) <= 0x1.0p62)) {
    throw Error(ErrorCode::kInvalidParams, "pull count exceeds 2^62; the gap guess is too small");
  }
  return static_cast<std::uint64_t>(c);
}

// Keeps the better half (rounded up) of `idx` by `mean`, lowest index first on
// ties. Returns the removed indices; `idx` stays sorted ascending.
template <class MeanFn>
std::vector<std::size_t> keep_half(std::vector<std::size_t>& idx, bool keep_high, MeanFn&& mean) {
  std::vector<std::size_t> order = idx;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keep_high ? mean(a) > mean(b) : mean(a) < mean(b);
  });
  const std::size_t keep = (idx.size() + 1) / 2;
  std::vector<std::size_t> removed(order.begin() + keep, order.end());
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::sort(removed.begin(), removed.end());
  idx = std::move(order);
  return removed;
}

}  // namespace detail

// Staged halving with a known gap guess. Rows are halved against a pivot
// column picked by cmidval, columns against a pivot row picked by rmidval,
// until at most 2 x 2 entries remain; those are sampled and the empirical
// saddle point is returned.
inline GapSearchResult find_psne_with_gap(SamplingOracle& oracle, double delta_guess, double delta) {
  if (!(delta_guess > 0.0 && delta_guess <= 2.0)) {
    throw Error(ErrorCode::kInvalidParams, "gap guess must lie in (0,2]");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidParams, "delta must lie in (0,1)");
  const std::size_t n = oracle.rows();
  const std::size_t m = oracle.cols();
  GapSearchResult out;
  if (n == 1 && m == 1) return out;

  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double nm2 = nd + md - 2.0;
  const double d2 = delta_guess * delta_guess;
  const double elim_log = std::log(4.0 * nd * nd * md * md / delta);
  const double midval_delta = delta / (2.0 * md * md * nd * nd);
  const std::uint64_t start = oracle.total_count();

  std::vector<std::size_t> xs = iota_indices(n);
  std::vector<std::size_t> ys = iota_indices(m);
  std::vector<Cell> cells;
  std::vector<double> pivot_means(std::max(n, m));

  while (std::max(xs.size(), ys.size()) > 2) {
    StageRecord st;
    st.rows = xs.size();
    st.cols = ys.size();
    const std::uint64_t before = oracle.total_count();
    const bool row_stage = xs.size() >= ys.size();
    const std::vector<std::size_t>& halved = row_stage ? xs : ys;
    const std::vector<std::size_t>& other = row_stage ? ys : xs;
    st.kind = row_stage ? StageKind::kRows : StageKind::kCols;
    st.epsilon = std::sqrt(static_cast<double>(halved.size()) / nm2) * delta_guess / 9.0;
    const auto cfg = MidValConfig::make(st.epsilon, midval_delta);

    // Pivot: the column with the lowest upper-quantile value, or the row with
    // the highest lower-quantile value.
    std::size_t pivot = other.front();
    double best = 0.0;
    for (std::size_t k = 0; k < other.size(); ++k) {
      cells.clear();
      for (std::size_t h : halved) cells.push_back(row_stage ? Cell{h, other[k]} : Cell{other[k], h});
      const double v = midval(oracle, cells, cfg, row_stage ? MidValSide::kHigh : MidValSide::kLow);
      if (k == 0 || (row_stage ? v < best : v > best)) {
        best = v;
        pivot = other[k];
      }
    }
    st.pivot = pivot;

    const std::uint64_t pulls = detail::checked_pulls(
        nm2 / static_cast<double>(halved.size()) * 162.0 * elim_log / d2, halved.size());
    for (std::size_t h : halved) {
      const Cell c = row_stage ? Cell{h, pivot} : Cell{pivot, h};
      pivot_means[h] = oracle.sample_mean(c, pulls);
    }
    auto mean = [&](std::size_t h) { return pivot_means[h]; };
    st.eliminated = detail::keep_half(row_stage ? xs : ys, row_stage, mean);
    st.samples = oracle.total_count() - before;
    out.stages.push_back(std::move(st));
  }

  StageRecord term;
  term.kind = StageKind::kTerminal;
  term.rows = xs.size();
  term.cols = ys.size();
  const std::uint64_t before = oracle.total_count();
  const std::uint64_t pulls =
      detail::checked_pulls(nm2 / 2.0 * 50.0 * std::log(16.0 / delta) / d2, xs.size() * ys.size());
  std::vector<double> means(n * m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i : xs) {
    for (std::size_t j : ys) means[i * m + j] = oracle.sample_mean(Cell{i, j}, pulls);
  }
  const auto found = find_saddle(xs, ys, [&](std::size_t i, std::size_t j) { return means[i * m + j]; });
  term.samples = oracle.total_count() - before;
  out.stages.push_back(std::move(term));
  out.cell = found.cell;
  out.degraded = found.degraded();
  out.samples = oracle.total_count() - start;
  return out;
}

struct HeuristicOptions {
  double terminal_share = 0.25;  // fraction of T reserved for the final <= 2 x 2 block
  double midval_share = 0.5;     // fraction of each stage spent locating the pivot
  double quantile = 0.375;       // target rank (fraction from the top/bottom) for pivots
  std::size_t terminal_rounds = 16;
};

namespace detail {

// Running per-entry sums shared by all stages of the heuristic.
class EmpiricalMatrix {
 public:
  EmpiricalMatrix(SamplingOracle& oracle, CheckpointRecorder& rec)
      : oracle_(oracle), rec_(rec), m_(oracle.cols()), sums_(oracle.rows() * m_, 0.0),
        counts_(oracle.rows() * m_, 0) {}

  template <class GuessFn>
  void pull(Cell c, std::uint64_t count, GuessFn&& guess) {
    if (count == 0) return;
    rec_.before_spend(used_, count, guess);
    const std::size_t k = c.row * m_ + c.col;
    sums_[k] += oracle_.sample_sum(c, count);
    counts_[k] += count;
    used_ += count;
  }

  double mean(Cell c) const {
    const std::size_t k = c.row * m_ + c.col;
    return counts_[k] == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : sums_[k] / static_cast<double>(counts_[k]);
  }
  std::uint64_t used() const { return used_; }

 private:
  SamplingOracle& oracle_;
  CheckpointRecorder& rec_;
  std::size_t m_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t used_ = 0;
};

// Successive-halving quantile search: pulls every arm of a shrinking pool with
// doubling per-arm counts, each round keeping the half of the pool centred on
// the target rank. Returns the empirical mean at the target rank.
template <class GuessFn>
double sh_quantile(EmpiricalMatrix& emp, std::vector<Cell> pool, std::uint64_t budget, bool from_top,
                   double q, GuessFn&& guess) {
  auto better = [&](const Cell& a, const Cell& b) {
    const double ma = emp.mean(a);
    const double mb = emp.mean(b);
    return from_top ? ma > mb : ma < mb;
  };
  std::size_t rounds = 1;
  while ((std::size_t{1} << rounds) < pool.size()) ++rounds;
  std::uint64_t left = budget;
  for (; rounds > 0; --rounds) {
    const std::uint64_t size = pool.size();
    std::uint64_t per = std::max<std::uint64_t>(1, left / rounds / size);
    if (per * size > left) per = left / size;
    if (per == 0) break;
    for (const Cell& c : pool) emp.pull(c, per, guess);
    left -= per * size;
    if (pool.size() <= 2 || rounds == 1) break;
    std::stable_sort(pool.begin(), pool.end(), better);
    const auto target = static_cast<std::size_t>(std::lround(q * static_cast<double>(size - 1)));
    const std::size_t keep = (size + 1) / 2;
    const std::size_t first = std::min(target > keep / 2 ? target - keep / 2 : 0, size - keep);
    q = keep > 1 ? static_cast<double>(target - first) / static_cast<double>(keep - 1) : 0.0;
    pool = std::vector<Cell>(pool.begin() + first, pool.begin() + first + keep);
  }
  std::stable_sort(pool.begin(), pool.end(), better);
  const auto target = static_cast<std::size_t>(std::lround(q * static_cast<double>(pool.size() - 1)));
  const double v = emp.mean(pool[target]);
  return std::isnan(v) ? 0.0 : v;
}

}  // namespace detail

// Fixed-budget variant tuned for empirical performance. The gap guess follows
// Delta = sqrt((n+m)/T), which makes every halving stage of the exact
// procedure cost the same; the budget is therefore split evenly over stages
// (unused samples roll over) with a fixed share kept for the final block.
// Pivots come from a successive-halving quantile search instead of
// median-of-order-statistics, and all samples of an entry are pooled.
// `delta` is accepted for interface parity; the run always spends T.
inline AlgorithmRun find_psne_heuristic(SamplingOracle& oracle, std::uint64_t budget, double delta,
                                        std::vector<std::uint64_t> checkpoints,
                                        const HeuristicOptions& opt = {},
                                        std::vector<StageRecord>* log = nullptr) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidParams, "delta must lie in (0,1)");
  const std::size_t n = oracle.rows();
  const std::size_t m = oracle.cols();

  struct Plan {
    std::size_t x, y;
  };
  std::vector<Plan> plan;
  std::size_t x = n, y = m;
  std::uint64_t need = 0;
  while (std::max(x, y) > 2) {
    plan.push_back({x, y});
    need += x * y;
    if (x >= y) x = (x + 1) / 2;
    else y = (y + 1) / 2;
  }
  const std::uint64_t terminal_need = x * y;
  need += terminal_need;
  if (budget < need) {
    throw Error(ErrorCode::kBudgetTooSmall, "budget " + std::to_string(budget) + " < " +
                                                std::to_string(need) +
                                                " (one pull per surviving entry per stage)");
  }

  CheckpointRecorder rec(std::move(checkpoints));
  detail::EmpiricalMatrix emp(oracle, rec);
  std::vector<std::size_t> xs = iota_indices(n);
  std::vector<std::size_t> ys = iota_indices(m);
  auto guess = [&]() -> std::optional<Cell> {
    return find_saddle(xs, ys, [&](std::size_t i, std::size_t j) { return emp.mean({i, j}); }).saddle();
  };

  const double stages = static_cast<double>(plan.size());
  const double terminal_weight =
      plan.empty() ? 1.0 : stages * opt.terminal_share / (1.0 - opt.terminal_share);
  std::uint64_t later_need = need - terminal_need;

  for (std::size_t s = 0; s < plan.size(); ++s) {
    const std::uint64_t stage_need = plan[s].x * plan[s].y;
    later_need -= stage_need;
    const std::uint64_t left = budget - emp.used();
    const auto share = static_cast<std::uint64_t>(static_cast<double>(left) /
                                                  (stages - static_cast<double>(s) + terminal_weight));
    const std::uint64_t cap = left - later_need - terminal_need;
    const std::uint64_t stage_budget = std::clamp(share, stage_need, cap);
    const std::uint64_t before = emp.used();

    StageRecord st;
    st.rows = xs.size();
    st.cols = ys.size();
    const bool row_stage = xs.size() >= ys.size();
    st.kind = row_stage ? StageKind::kRows : StageKind::kCols;
    std::vector<std::size_t>& halved = row_stage ? xs : ys;
    const std::vector<std::size_t>& other = row_stage ? ys : xs;

    const std::uint64_t mid_budget = std::clamp(
        static_cast<std::uint64_t>(opt.midval_share * static_cast<double>(stage_budget)), stage_need,
        stage_budget);
    std::size_t pivot = other.front();
    double best = 0.0;
    std::vector<Cell> pool;
    for (std::size_t k = 0; k < other.size(); ++k) {
      pool.clear();
      for (std::size_t h : halved) pool.push_back(row_stage ? Cell{h, other[k]} : Cell{other[k], h});
      const std::uint64_t b = mid_budget / other.size() + (k < mid_budget % other.size() ? 1 : 0);
      const double v = detail::sh_quantile(emp, pool, b, row_stage, opt.quantile, guess);
      if (k == 0 || (row_stage ? v < best : v > best)) {
        best = v;
        pivot = other[k];
      }
    }
    st.pivot = pivot;

    const std::uint64_t per = (stage_budget - (emp.used() - before)) / halved.size();
    for (std::size_t h : halved) emp.pull(row_stage ? Cell{h, pivot} : Cell{pivot, h}, per, guess);
    auto mean = [&](std::size_t h) {
      const double v = emp.mean(row_stage ? Cell{h, pivot} : Cell{pivot, h});
      return std::isnan(v) ? (row_stage ? -1e300 : 1e300) : v;
    };
    st.eliminated = detail::keep_half(halved, row_stage, mean);
    st.samples = emp.used() - before;
    if (log) log->push_back(std::move(st));
  }

  // Final block: spend everything left, in rounds so checkpoints see progress.
  StageRecord term;
  term.kind = StageKind::kTerminal;
  term.rows = xs.size();
  term.cols = ys.size();
  const std::uint64_t before = emp.used();
  const std::uint64_t left = budget - emp.used();
  const std::uint64_t cells = xs.size() * ys.size();
  const std::uint64_t per_cell = left / cells;
  const std::uint64_t rounds = std::max<std::uint64_t>(1, std::min<std::uint64_t>(opt.terminal_rounds, per_cell));
  for (std::uint64_t r = 0; r < rounds; ++r) {
    const std::uint64_t chunk = per_cell / rounds + (r < per_cell % rounds ? 1 : 0);
    for (std::size_t i : xs) {
      for (std::size_t j : ys) emp.pull({i, j}, chunk, guess);
    }
  }
  std::uint64_t extra = left - per_cell * cells;
  for (std::size_t i : xs) {
    for (std::size_t j : ys) {
      if (extra == 0) break;
      emp.pull({i, j}, 1, guess);
      --extra;
    }
  }
  term.samples = emp.used() - before;
  if (log) log->push_back(std::move(term));

  const auto found = find_saddle(xs, ys, [&](std::size_t i, std::size_t j) { return emp.mean({i, j}); });
  return rec.finish(emp.used(), found.cell, found.degraded());
}

}  // namespace psne

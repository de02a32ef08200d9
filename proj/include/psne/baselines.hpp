#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "psne/equilibrium.hpp"
#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/oracle.hpp"
#include "psne/rng.hpp"
#include "psne/run.hpp"

namespace psne {

// Observation -> reward in [0,1] for the adversarial learners. Bernoulli
// outcomes pass through; anything else is clipped to [-2,2] and mapped affinely.
inline double reward01(double obs, NoiseKind kind) {
  if (kind == NoiseKind::kBernoulli) return obs;
  return (std::clamp(obs, -2.0, 2.0) + 2.0) / 4.0;
}

namespace detail {

inline std::size_t draw_index(const std::vector<double>& weights, double total, Engine& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    acc += weights[a];
    if (u < acc) return a;
  }
  for (std::size_t a = weights.size(); a-- > 0;) {
    if (weights[a] > 0.0) return a;
  }
  return 0;
}

template <class V>
std::size_t argmax(const V& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

// How a self-play pair reports a PSNE: the mode of each learner's current
// sampling distribution (default), or the most-played row and column so far.
enum class SelfPlayGuess { kLeader, kMostPlayed };

inline const char* to_string(SelfPlayGuess g) {
  return g == SelfPlayGuess::kLeader ? "leader" : "most_played";
}

// EXP3 with implicit exploration over K actions, losses in [0,1].
class Exp3Ix {
 public:
  Exp3Ix(std::size_t k, std::uint64_t horizon)
      : eta_(std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::size_t>(k, 2))) /
                       (static_cast<double>(k) * static_cast<double>(horizon)))),
        gamma_(eta_ / 2.0),
        w_(k, 1.0),
        total_(static_cast<double>(k)) {}

  std::size_t draw(Engine& rng) const { return detail::draw_index(w_, total_, rng); }
  double prob(std::size_t a) const { return w_[a] / total_; }
  std::vector<double> probabilities() const {
    std::vector<double> p(w_.size());
    for (std::size_t a = 0; a < p.size(); ++a) p[a] = prob(a);
    return p;
  }

  void update(std::size_t a, double loss, double p_a) {
    const double old = w_[a];
    w_[a] *= std::exp(-eta_ * loss / (p_a + gamma_));
    total_ += w_[a] - old;
    if (++since_sync_ >= 4 * w_.size() || total_ < 1e-200) resync();
  }

  double eta() const { return eta_; }
  double gamma() const { return gamma_; }

 private:
  void resync() {
    since_sync_ = 0;
    const double top = *std::max_element(w_.begin(), w_.end());
    if (top < 1e-100) {
      for (double& v : w_) v /= top;
    }
    total_ = 0.0;
    for (double v : w_) total_ += v;
  }

  double eta_;
  double gamma_;
  std::vector<double> w_;
  double total_;
  std::size_t since_sync_ = 0;
};

// Tsallis-INF with the 1/2-Tsallis regularizer, eta_t = 2/sqrt(t), and the
// reduced-variance loss estimator (baseline 1/2 on arms with p >= eta^2).
class TsallisInf {
 public:
  explicit TsallisInf(std::size_t k) : cum_(k, 0.0), p_(k, 1.0 / static_cast<double>(k)) {}

  // Distribution for the next round.
  const std::vector<double>& prepare() {
    ++t_;
    eta_ = 2.0 / std::sqrt(static_cast<double>(t_));
    solve();
    return p_;
  }

  std::size_t draw(Engine& rng) const { return detail::draw_index(p_, 1.0, rng); }
  double prob(std::size_t a) const { return p_[a]; }
  const std::vector<double>& probabilities() const { return p_; }

  void update(std::size_t a, double loss) {
    const double thr = eta_ * eta_;
    for (std::size_t i = 0; i < cum_.size(); ++i) {
      const double b = p_[i] >= thr ? 0.5 : 0.0;
      cum_[i] += (i == a ? (loss - b) / p_[i] : 0.0) + b;
    }
  }

  std::uint64_t newton_iterations() const { return newton_iters_; }

 private:
  // Finds x < min L with sum_i 4 / (eta (L_i - x))^2 = 1 by safeguarded Newton
  // iterations from the previous root, to 1e-10 on the sum.
  void solve() {
    const std::size_t k = cum_.size();
    const double lmin = *std::min_element(cum_.begin(), cum_.end());
    double lo = lmin - 2.0 * std::sqrt(static_cast<double>(k)) / eta_;
    double hi = lmin - 2.0 / eta_;
    double x = have_x_ ? std::clamp(x_, lo, hi) : lo;
    const double c = 4.0 / (eta_ * eta_);
    for (int it = 0; it < 200; ++it) {
      ++newton_iters_;
      double f = -1.0, df = 0.0;
      for (double l : cum_) {
        const double g = 1.0 / (l - x);
        f += c * g * g;
        df += 2.0 * c * g * g * g;
      }
      if (std::abs(f) <= 1e-10) break;
      if (f > 0.0) hi = x;
      else lo = x;
      double next = x - f / df;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == x) break;
      x = next;
    }
    x_ = x;
    have_x_ = true;
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double g = 1.0 / (cum_[i] - x);
      p_[i] = c * g * g;
      sum += p_[i];
    }
    for (double& v : p_) v /= sum;
  }

  std::vector<double> cum_;
  std::vector<double> p_;
  std::uint64_t t_ = 0;
  double eta_ = 2.0;
  double x_ = 0.0;
  bool have_x_ = false;
  std::uint64_t newton_iters_ = 0;
};

namespace detail {

// Two independent learners, one per player; `step` plays one round.
template <class RowLearner, class ColLearner, class Step>
AlgorithmRun self_play(SamplingOracle& oracle, std::uint64_t budget,
                       std::vector<std::uint64_t> checkpoints, const RowLearner& rows,
                       const ColLearner& cols, SelfPlayGuess rule, Step&& step) {
  CheckpointRecorder rec(std::move(checkpoints));
  std::vector<std::uint64_t> row_plays(oracle.rows(), 0), col_plays(oracle.cols(), 0);
  auto guess = [&]() -> std::optional<Cell> {
    if (rule == SelfPlayGuess::kMostPlayed) return Cell{argmax(row_plays), argmax(col_plays)};
    return Cell{argmax(rows.probabilities()), argmax(cols.probabilities())};
  };
  for (std::uint64_t t = 0; t < budget; ++t) {
    if (t > 0 && rec.due(t, 1)) rec.before_spend(t, 1, guess);
    const auto [i, j] = step();
    ++row_plays[i];
    ++col_plays[j];
  }
  return rec.finish(budget, guess());
}

}  // namespace detail

inline AlgorithmRun run_exp3ix_selfplay(SamplingOracle& oracle, std::uint64_t budget,
                                        std::vector<std::uint64_t> checkpoints,
                                        SelfPlayGuess rule = SelfPlayGuess::kLeader) {
  if (budget == 0) return {};
  Exp3Ix rows(oracle.rows(), budget), cols(oracle.cols(), budget);
  const NoiseKind kind = oracle.matrix().noise().kind;
  Engine& rng = oracle.decisions();
  return detail::self_play(oracle, budget, std::move(checkpoints), rows, cols, rule, [&] {
    const std::size_t i = rows.draw(rng);
    const std::size_t j = cols.draw(rng);
    const double pi = rows.prob(i);
    const double pj = cols.prob(j);
    const double r = reward01(oracle.sample(i, j), kind);
    rows.update(i, 1.0 - r, pi);
    cols.update(j, r, pj);
    return std::pair{i, j};
  });
}

// The leader at a checkpoint comes from the distribution of the last round
// played; the loss of that round is not folded in yet.
inline AlgorithmRun run_tsallis_inf_selfplay(SamplingOracle& oracle, std::uint64_t budget,
                                             std::vector<std::uint64_t> checkpoints,
                                             SelfPlayGuess rule = SelfPlayGuess::kLeader) {
  if (budget == 0) return {};
  TsallisInf rows(oracle.rows()), cols(oracle.cols());
  const NoiseKind kind = oracle.matrix().noise().kind;
  Engine& rng = oracle.decisions();
  return detail::self_play(oracle, budget, std::move(checkpoints), rows, cols, rule, [&] {
    rows.prepare();
    cols.prepare();
    const std::size_t i = rows.draw(rng);
    const std::size_t j = cols.draw(rng);
    const double r = reward01(oracle.sample(i, j), kind);
    rows.update(i, 1.0 - r);
    cols.update(j, r);
    return std::pair{i, j};
  });
}

// Anytime sub-Gaussian radius of an entry sampled s times, union over n*m entries.
inline double lucb_g_radius(std::size_t n, std::size_t m, std::uint64_t s, double delta) {
  const double sd = static_cast<double>(s);
  return std::sqrt(2.0 * std::log(4.0 * static_cast<double>(n * m) * sd * sd / delta) / sd);
}

// LUCB run on every line of the game at once: each column is a best-arm
// problem for the row player (largest entry), each row one for the column
// player (smallest entry). A round pulls, for every line not yet separated,
// its empirical best entry and the strongest challenger by confidence bound;
// an entry shared by several lines is pulled once. Stops when all lines are
// separated; otherwise answers with the empirical saddle when T runs out.
inline AlgorithmRun run_lucb_g(SamplingOracle& oracle, std::uint64_t budget, double delta,
                               std::vector<std::uint64_t> checkpoints) {
  const std::size_t n = oracle.rows();
  const std::size_t m = oracle.cols();
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidParams, "delta must lie in (0,1)");
  if (budget < n * m) {
    throw Error(ErrorCode::kBudgetTooSmall,
                "LUCB-G needs one sample per entry: " + std::to_string(n * m) + " > " +
                    std::to_string(budget));
  }
  CheckpointRecorder rec(std::move(checkpoints));
  std::vector<double> sum(n * m, 0.0);
  std::vector<std::uint64_t> cnt(n * m, 0);
  std::vector<double> mean(n * m, 0.0), rad(n * m, 0.0);
  auto at = [m](std::size_t i, std::size_t j) { return i * m + j; };

  std::uint64_t used = 0;
  bool initialized = false;
  auto guess = [&]() -> std::optional<Cell> {
    if (!initialized) return std::nullopt;
    return find_saddle(n, m, mean).saddle();
  };
  auto pull = [&](std::size_t k) {
    rec.before_spend(used, 1, guess);
    sum[k] += oracle.sample(k / m, k % m);
    ++cnt[k];
    ++used;
    mean[k] = sum[k] / static_cast<double>(cnt[k]);
    rad[k] = lucb_g_radius(n, m, cnt[k], delta);
  };
  for (std::size_t k = 0; k < n * m; ++k) pull(k);
  initialized = true;

  // Entries to pull this round; `mark` dedupes across lines.
  std::vector<std::size_t> picks;
  std::vector<std::uint64_t> mark(n * m, 0);
  std::uint64_t round = 0;
  auto pick = [&](std::size_t k) {
    if (mark[k] != round) {
      mark[k] = round;
      picks.push_back(k);
    }
  };

  bool certified = false;
  while (used < budget) {
    ++round;
    picks.clear();
    for (std::size_t j = 0; j < m && n > 1; ++j) {
      std::size_t h = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (mean[at(i, j)] > mean[at(h, j)]) h = i;
      }
      std::size_t l = h == 0 ? 1 : 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != h && mean[at(i, j)] + rad[at(i, j)] > mean[at(l, j)] + rad[at(l, j)]) l = i;
      }
      if (mean[at(h, j)] - rad[at(h, j)] > mean[at(l, j)] + rad[at(l, j)]) continue;
      pick(at(h, j));
      pick(at(l, j));
    }
    for (std::size_t i = 0; i < n && m > 1; ++i) {
      std::size_t h = 0;
      for (std::size_t j = 1; j < m; ++j) {
        if (mean[at(i, j)] < mean[at(i, h)]) h = j;
      }
      std::size_t l = h == 0 ? 1 : 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != h && mean[at(i, j)] - rad[at(i, j)] < mean[at(i, l)] - rad[at(i, l)]) l = j;
      }
      if (mean[at(i, h)] + rad[at(i, h)] < mean[at(i, l)] - rad[at(i, l)]) continue;
      pick(at(i, h));
      pick(at(i, l));
    }
    if (picks.empty()) {
      certified = true;
      break;
    }
    for (std::size_t k : picks) {
      if (used >= budget) break;
      pull(k);
    }
  }
  const auto found = find_saddle(n, m, mean);
  return rec.finish(used, found.cell, found.degraded(), certified);
}

// Round-robin over all entries in row-major order; guess = empirical saddle.
inline AlgorithmRun run_uniform(SamplingOracle& oracle, std::uint64_t budget,
                                std::vector<std::uint64_t> checkpoints) {
  const std::size_t n = oracle.rows();
  const std::size_t m = oracle.cols();
  const std::uint64_t cells = n * m;
  CheckpointRecorder rec(checkpoints);
  std::vector<double> sum(cells, 0.0);
  std::vector<std::uint64_t> cnt(cells, 0);
  auto means = [&] {
    std::vector<double> v(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      v[k] = cnt[k] ? sum[k] / static_cast<double>(cnt[k]) : std::numeric_limits<double>::quiet_NaN();
    }
    return v;
  };
  auto guess = [&]() -> std::optional<Cell> {
    if (cnt[0] == 0) return std::nullopt;
    return find_saddle(n, m, means()).saddle();
  };
  // Advance in segments ending at checkpoints; within a segment each entry's
  // extra pulls are drawn as one batch.
  auto advance_to = [&](std::uint64_t target) {
    for (std::uint64_t k = 0; k < cells; ++k) {
      const std::uint64_t want = target / cells + (k < target % cells ? 1 : 0);
      if (want > cnt[k]) {
        sum[k] += oracle.sample_sum(k / m, k % m, want - cnt[k]);
        cnt[k] = want;
      }
    }
  };
  std::uint64_t used = 0;
  for (std::uint64_t c : checkpoints) {
    if (c > budget) break;
    advance_to(c);
    used = c;
    rec.before_spend(used, 1, guess);
  }
  advance_to(budget);
  used = budget;
  if (budget == 0) return rec.finish(0, std::nullopt);
  const auto found = find_saddle(n, m, means());
  return rec.finish(used, found.cell, found.degraded());
}

}  // namespace psne

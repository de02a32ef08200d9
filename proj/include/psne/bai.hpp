#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/oracle.hpp"

namespace psne {

// A set of oracle entries viewed as bandit arms; sign = -1 turns a row of the
// game into arms whose best (largest) mean is the row minimum.
class EntryArms {
 public:
  EntryArms(SamplingOracle& oracle, std::vector<Cell> cells, double sign = 1.0)
      : oracle_(&oracle), cells_(std::move(cells)), sign_(sign) {}

  std::size_t size() const { return cells_.size(); }
  double pull_sum(std::size_t a, std::uint64_t count) {
    return sign_ * oracle_->sample_sum(cells_[a], count);
  }
  std::uint64_t total_count() const { return oracle_->total_count(); }
  // Sub-Gaussian scale of one observation: sigma, 1/2 for Bernoulli, 0 if noiseless.
  double noise_scale() const {
    const NoiseModel& nm = oracle_->matrix().noise();
    switch (nm.kind) {
      case NoiseKind::kGaussian: return nm.sigma;
      case NoiseKind::kBernoulli: return 0.5;
      case NoiseKind::kZero: return 0.0;
    }
    return 1.0;
  }

 private:
  SamplingOracle* oracle_;
  std::vector<Cell> cells_;
  double sign_;
};

enum class BaiMethod {
  kLucb,              // anytime confidence bounds, stops once separated (default)
  kExpGapElimination, // exponential-gap elimination with median elimination inside
  kDoublingHalving,   // sequential halving on doubling budgets; fixed-budget answer
};

inline const char* to_string(BaiMethod m) {
  switch (m) {
    case BaiMethod::kLucb: return "lucb";
    case BaiMethod::kExpGapElimination: return "egap";
    case BaiMethod::kDoublingHalving: return "halving";
  }
  return "?";
}

namespace detail {

struct ArmStats {
  std::vector<double> sum;
  std::vector<std::uint64_t> n;
  explicit ArmStats(std::size_t k) : sum(k, 0.0), n(k, 0) {}
  double mean(std::size_t a) const { return sum[a] / static_cast<double>(n[a]); }
};

// LUCB with radius sigma sqrt(2 ln(4 K s^2 / delta) / s) (anytime, union bound
// over arms and counts, sigma the sub-Gaussian scale of the arms). Pulls the
// two critical arms in equal batches of 1/8 of the smaller count; returns
// empty as soon as the next batch would break the cap.
template <class Arms>
std::optional<std::size_t> lucb(Arms& arms, std::uint64_t cap, double delta) {
  const std::size_t k = arms.size();
  const double kd = static_cast<double>(k);
  const double sigma = arms.noise_scale();
  auto radius = [&](std::uint64_t s) {
    const double sd = static_cast<double>(s);
    return sigma * std::sqrt(2.0 * std::log(4.0 * kd * sd * sd / delta) / sd);
  };
  ArmStats st(k);
  std::uint64_t used = 0;
  if (cap < k) return std::nullopt;
  for (std::size_t a = 0; a < k; ++a) {
    st.sum[a] = arms.pull_sum(a, 1);
    st.n[a] = 1;
  }
  used = k;
  for (;;) {
    std::size_t h = 0;
    for (std::size_t a = 1; a < k; ++a) {
      if (st.mean(a) > st.mean(h)) h = a;
    }
    std::size_t l = h == 0 ? 1 : 0;
    double best_ucb = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k; ++a) {
      if (a == h) continue;
      const double u = st.mean(a) + radius(st.n[a]);
      if (u > best_ucb) {
        best_ucb = u;
        l = a;
      }
    }
    if (st.mean(h) - radius(st.n[h]) > best_ucb) return h;
    // Batch by the less-sampled of the two so neither runs away.
    const std::uint64_t b = std::max<std::uint64_t>(1, std::min(st.n[h], st.n[l]) / 8);
    if (used + 2 * b > cap) return std::nullopt;
    st.sum[h] += arms.pull_sum(h, b);
    st.n[h] += b;
    st.sum[l] += arms.pull_sum(l, b);
    st.n[l] += b;
    used += 2 * b;
  }
}

// Median elimination on `active` to accuracy eps with confidence delta; the
// survivor is eps-optimal. Counts are 4x the [0,1]-reward ones so the
// guarantee holds for 1-sub-Gaussian rewards. Returns empty on cap overflow.
template <class Arms>
std::optional<std::size_t> median_elimination(Arms& arms, std::vector<std::size_t> active, double eps,
                                              double delta, std::uint64_t& used, std::uint64_t cap) {
  double e = eps / 4.0;
  double d = delta / 2.0;
  while (active.size() > 1) {
    const auto per = static_cast<std::uint64_t>(std::ceil(4.0 * std::log(3.0 / d) / (e * e / 4.0)));
    if (used + per * active.size() > cap) return std::nullopt;
    std::vector<std::pair<double, std::size_t>> means;
    for (std::size_t a : active) means.push_back({arms.pull_sum(a, per) / static_cast<double>(per), a});
    used += per * active.size();
    std::stable_sort(means.begin(), means.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    active.clear();
    for (std::size_t r = 0; r < (means.size() + 1) / 2; ++r) active.push_back(means[r].second);
    e *= 0.75;
    d /= 2.0;
  }
  return active.front();
}

template <class Arms>
std::optional<std::size_t> exp_gap_elimination(Arms& arms, std::uint64_t cap, double delta) {
  std::vector<std::size_t> active(arms.size());
  for (std::size_t a = 0; a < active.size(); ++a) active[a] = a;
  std::uint64_t used = 0;
  for (int r = 1; active.size() > 1; ++r) {
    const double eps = std::ldexp(1.0, -r) / 4.0;
    const double dr = delta / (50.0 * r * r * r);
    const auto per = static_cast<std::uint64_t>(std::ceil(4.0 * 2.0 / (eps * eps) * std::log(3.0 / dr)));
    if (used + per * active.size() > cap) return std::nullopt;
    std::vector<double> mean(arms.size(), 0.0);
    for (std::size_t a : active) mean[a] = arms.pull_sum(a, per) / static_cast<double>(per);
    used += per * active.size();
    const auto ref = median_elimination(arms, active, eps / 2.0, dr, used, cap);
    if (!ref) return std::nullopt;
    const double threshold = mean[*ref] - eps;
    std::vector<std::size_t> keep;
    for (std::size_t a : active) {
      if (mean[a] >= threshold) keep.push_back(a);
    }
    active = std::move(keep);
  }
  return active.front();
}

// Sequential halving with budget B, 2B, 4B, ... while the running total fits
// the cap; answers with the largest completed run. Not delta-correct; kept as
// the fast practical choice.
template <class Arms>
std::optional<std::size_t> doubling_halving(Arms& arms, std::uint64_t cap) {
  const std::size_t k = arms.size();
  std::size_t rounds = 0;
  while ((std::size_t{1} << rounds) < k) ++rounds;
  std::uint64_t budget = k * rounds;
  std::uint64_t used = 0;
  std::optional<std::size_t> answer;
  while (used + budget <= cap) {
    std::vector<std::size_t> active(k);
    for (std::size_t a = 0; a < k; ++a) active[a] = a;
    std::vector<double> sum(k, 0.0);
    std::vector<std::uint64_t> cnt(k, 0);
    std::uint64_t spent = 0;
    for (std::size_t r = 0; r < rounds && active.size() > 1; ++r) {
      const std::uint64_t per = std::max<std::uint64_t>(1, budget / (active.size() * rounds));
      for (std::size_t a : active) {
        sum[a] += arms.pull_sum(a, per);
        cnt[a] += per;
      }
      spent += per * active.size();
      std::stable_sort(active.begin(), active.end(), [&](std::size_t x, std::size_t y) {
        return sum[x] / static_cast<double>(cnt[x]) > sum[y] / static_cast<double>(cnt[y]);
      });
      active.resize((active.size() + 1) / 2);
    }
    used += spent;
    answer = active.front();
    budget *= 2;
  }
  return answer;
}

}  // namespace detail

// Best arm (largest mean) of `arms`, or empty when the method cannot finish
// within `cap` samples. Never spends more than `cap`.
template <class Arms>
std::optional<std::size_t> best_arm_identify(Arms& arms, std::uint64_t cap, double delta,
                                             BaiMethod method = BaiMethod::kLucb) {
  if (arms.size() == 0) throw Error(ErrorCode::kEmptyArmSet, "no arms");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidParams, "delta must lie in (0,1)");
  if (arms.size() == 1) return 0;
  switch (method) {
    case BaiMethod::kLucb: return detail::lucb(arms, cap, delta);
    case BaiMethod::kExpGapElimination: return detail::exp_gap_elimination(arms, cap, delta);
    case BaiMethod::kDoublingHalving: return detail::doubling_halving(arms, cap);
  }
  return std::nullopt;
}

}  // namespace psne

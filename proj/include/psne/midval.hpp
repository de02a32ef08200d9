#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/oracle.hpp"

namespace psne {

// Constants of the median-of-order-statistics estimator. All logs natural.
struct MidValConfig {
  std::uint64_t ell = 0;            // outer repetitions
  double delta1 = 0.05;
  double delta2 = 0.05;
  std::uint64_t k = 0;              // arms per repetition (multiple of 3)
  std::uint64_t z = 0;              // order statistic, k/3 + 1
  std::uint64_t per_arm_pulls = 0;

  static MidValConfig make(double epsilon, double delta, double delta1 = 0.05,
                           double delta2 = 0.05) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::kInvalidParams, "epsilon must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0) || !(delta1 > 0.0 && delta1 < 1.0) ||
        !(delta2 > 0.0 && delta2 < 1.0)) {
      throw Error(ErrorCode::kInvalidParams, "failure probabilities must lie in (0,1)");
    }
    MidValConfig c;
    c.delta1 = delta1;
    c.delta2 = delta2;
    c.ell = static_cast<std::uint64_t>(std::ceil(14.0 * std::log(1.0 / delta)));
    c.k = static_cast<std::uint64_t>(std::ceil(108.0 * std::log(4.0 / delta2)));
    c.k += (3 - c.k % 3) % 3;
    c.z = c.k / 3 + 1;
    const double pulls = std::ceil(2.0 * std::log(2.0 * static_cast<double>(c.k) / delta1) /
                                   (epsilon * epsilon));
    if (pulls * static_cast<double>(c.k * c.ell) > 0x1.0p62) {
      throw Error(ErrorCode::kInvalidParams, "midval sample count exceeds 2^62");
    }
    c.per_arm_pulls = static_cast<std::uint64_t>(pulls);
    return c;
  }

  std::uint64_t total_samples() const { return ell * k * per_arm_pulls; }
};

enum class MidValSide {
  kHigh,  // z-th highest empirical mean (column player's pivot search)
  kLow,   // z-th lowest empirical mean (row player's pivot search)
};

namespace detail {

inline double median(std::vector<double> v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  if (v.size() % 2 == 1) return v[h];
  const double upper = v[h];
  const double lower = *std::max_element(v.begin(), v.begin() + h);
  return 0.5 * (lower + upper);
}

}  // namespace detail

// Median over `ell` repetitions of the z-th highest (or lowest) empirical mean
// among k arms drawn uniformly with replacement. Each drawn copy gets its own
// fresh pulls. Consumes exactly cfg.total_samples() oracle samples.
inline double midval(SamplingOracle& oracle, std::span<const Cell> arms, const MidValConfig& cfg,
                     MidValSide side) {
  if (arms.empty()) throw Error(ErrorCode::kEmptyArmSet, "midval needs at least one arm");
  std::vector<SamplingOracle::EntrySampler> samplers;
  samplers.reserve(arms.size());
  for (const Cell& c : arms) samplers.push_back(oracle.sampler(c, cfg.per_arm_pulls));

  std::uniform_int_distribution<std::size_t> pick(0, arms.size() - 1);
  std::vector<double> means(cfg.k);
  std::vector<double> values(cfg.ell);
  for (std::uint64_t rep = 0; rep < cfg.ell; ++rep) {
    for (auto& mu : means) mu = samplers[pick(oracle.decisions())].mean();
    const std::size_t z = cfg.z - 1;
    if (side == MidValSide::kHigh) {
      std::nth_element(means.begin(), means.begin() + z, means.end(), std::greater<>());
    } else {
      std::nth_element(means.begin(), means.begin() + z, means.end());
    }
    values[rep] = means[z];
  }
  return detail::median(std::move(values));
}

inline double cmidval(SamplingOracle& oracle, std::span<const Cell> arms, double epsilon,
                      double delta) {
  return midval(oracle, arms, MidValConfig::make(epsilon, delta), MidValSide::kHigh);
}

inline double rmidval(SamplingOracle& oracle, std::span<const Cell> arms, double epsilon,
                      double delta) {
  return midval(oracle, arms, MidValConfig::make(epsilon, delta), MidValSide::kLow);
}

}  // namespace psne

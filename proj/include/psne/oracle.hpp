#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/rng.hpp"

namespace psne {

// Counting access to a hidden GameMatrix. Observations come from a
// deterministic noise stream, so equal seeds plus equal query sequences give
// bitwise-equal observations. A second stream is handed to algorithms for
// their own randomization so that it never perturbs the noise.
//
// Not thread-safe; an oracle may be moved between threads but never shared.
// The matrix must outlive the oracle.
class SamplingOracle {
 public:
  SamplingOracle(const GameMatrix& matrix, std::uint64_t base_seed, std::uint64_t trial = 0)
      : matrix_(&matrix),
        counts_(matrix.rows() * matrix.cols(), 0),
        noise_(make_engine(base_seed, trial, Stream::kNoise)),
        decisions_(make_engine(base_seed, trial, Stream::kDecisions)) {}

  std::size_t rows() const { return matrix_->rows(); }
  std::size_t cols() const { return matrix_->cols(); }
  const GameMatrix& matrix() const { return *matrix_; }

  // One observation A_ij + eta.
  double sample(std::size_t i, std::size_t j) {
    const std::size_t k = index(i, j);
    ++counts_[k];
    ++total_;
    const double a = matrix_->entries()[k];
    switch (matrix_->noise().kind) {
      case NoiseKind::kZero:
        return a;
      case NoiseKind::kBernoulli:
        return uniform01() < a ? 1.0 : 0.0;
      case NoiseKind::kGaussian:
        return a + matrix_->noise().sigma * boost::random::normal_distribution<double>()(noise_);
    }
    return a;
  }

  double sample(Cell c) { return sample(c.row, c.col); }

  // Sum of `count` independent observations of one entry, drawn in O(1) from
  // the exact law of the sum. Counters advance by `count`.
  double sample_sum(std::size_t i, std::size_t j, std::uint64_t count) {
    if (count == 1) return sample(i, j);
    const std::size_t k = index(i, j);
    counts_[k] += count;
    total_ += count;
    if (count == 0) return 0.0;
    return draw_sum(matrix_->entries()[k], count);
  }

  double sample_sum(Cell c, std::uint64_t count) { return sample_sum(c.row, c.col, count); }
  double sample_mean(Cell c, std::uint64_t count) {
    return sample_sum(c, count) / static_cast<double>(count);
  }

  // Repeated batch draws for one (entry, count) pair with the distribution
  // set-up hoisted out of the loop.
  class EntrySampler {
   public:
    double operator()() {
      oracle_->counts_[index_] += count_;
      oracle_->total_ += count_;
      switch (kind_) {
        case Kind::kConstant:
          return constant_;
        case Kind::kBinomial:
          return static_cast<double>(binomial_(oracle_->noise_));
        case Kind::kNormal:
          return constant_ + scale_ * boost::random::normal_distribution<double>()(oracle_->noise_);
      }
      return constant_;
    }
    double mean() { return (*this)() / static_cast<double>(count_); }

   private:
    friend class SamplingOracle;
    enum class Kind { kConstant, kBinomial, kNormal };

    SamplingOracle* oracle_ = nullptr;
    std::size_t index_ = 0;
    std::uint64_t count_ = 0;
    Kind kind_ = Kind::kConstant;
    double constant_ = 0.0;
    double scale_ = 0.0;
    boost::random::binomial_distribution<std::int64_t, double> binomial_;
  };

  EntrySampler sampler(Cell c, std::uint64_t count) {
    if (count == 0) throw Error(ErrorCode::kInvalidParams, "sampler needs a positive count");
    EntrySampler s;
    s.oracle_ = this;
    s.index_ = index(c.row, c.col);
    s.count_ = count;
    const double a = matrix_->entries()[s.index_];
    const double n = static_cast<double>(count);
    switch (matrix_->noise().kind) {
      case NoiseKind::kZero:
        s.constant_ = n * a;
        break;
      case NoiseKind::kBernoulli:
        if (a <= 0.0 || a >= 1.0) {
          s.constant_ = a >= 1.0 ? n : 0.0;
        } else {
          s.kind_ = EntrySampler::Kind::kBinomial;
          s.binomial_ = boost::random::binomial_distribution<std::int64_t, double>(
              static_cast<std::int64_t>(count), a);
        }
        break;
      case NoiseKind::kGaussian:
        s.constant_ = n * a;
        if (matrix_->noise().sigma > 0.0) {
          s.kind_ = EntrySampler::Kind::kNormal;
          s.scale_ = matrix_->noise().sigma * std::sqrt(n);
        }
        break;
    }
    return s;
  }

  std::uint64_t count(std::size_t i, std::size_t j) const { return counts_[index(i, j)]; }
  std::uint64_t total_count() const { return total_; }
  std::span<const std::uint64_t> per_entry_counts() const { return counts_; }

  // Stream for algorithm-side randomness (arm subsampling, self-play draws).
  Engine& decisions() { return decisions_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i >= rows() || j >= cols()) {
      throw Error(ErrorCode::kIndexOutOfRange, "entry (" + std::to_string(i + 1) + "," +
                                                   std::to_string(j + 1) + ") outside " +
                                                   std::to_string(rows()) + "x" +
                                                   std::to_string(cols()));
    }
    return i * cols() + j;
  }

  double uniform01() { return static_cast<double>(noise_() >> 11) * 0x1.0p-53; }

  double draw_sum(double a, std::uint64_t count) {
    const double n = static_cast<double>(count);
    switch (matrix_->noise().kind) {
      case NoiseKind::kZero:
        return n * a;
      case NoiseKind::kBernoulli:
        if (a <= 0.0) return 0.0;
        if (a >= 1.0) return n;
        return static_cast<double>(boost::random::binomial_distribution<std::int64_t, double>(
            static_cast<std::int64_t>(count), a)(noise_));
      case NoiseKind::kGaussian:
        return n * a + matrix_->noise().sigma * std::sqrt(n) *
                           boost::random::normal_distribution<double>()(noise_);
    }
    return n * a;
  }

  const GameMatrix* matrix_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  Engine noise_;
  Engine decisions_;
};

}  // namespace psne

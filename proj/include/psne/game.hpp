#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psne/error.hpp"

namespace psne {

// A matrix position. Zero-based in the C++ API; text outputs (CLI, CSV,
// reports) print rows and columns one-based.
struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c) {
  return "(" + std::to_string(c.row + 1) + "," + std::to_string(c.col + 1) + ")";
}

enum class NoiseKind { kGaussian, kBernoulli, kZero };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussian;
  double sigma = 1.0;  // only meaningful for kGaussian

  static NoiseModel gaussian(double sigma = 1.0) { return {NoiseKind::kGaussian, sigma}; }
  static NoiseModel bernoulli() { return {NoiseKind::kBernoulli, 0.0}; }
  static NoiseModel zero() { return {NoiseKind::kZero, 0.0}; }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

inline std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kBernoulli: return "bernoulli";
    case NoiseKind::kZero: return "zero";
  }
  return "unknown";
}

// Hidden payoff matrix A in [-1,1]^{n x m} together with its noise model.
// The row player maximizes, the column player minimizes.
class GameMatrix {
 public:
  GameMatrix(std::size_t n, std::size_t m, std::vector<double> entries, NoiseModel noise,
             std::vector<std::string> tags = {})
      : n_(n), m_(m), entries_(std::move(entries)), noise_(noise), tags_(std::move(tags)) {
    validate();
  }

  static GameMatrix from_rows(const std::vector<std::vector<double>>& rows, NoiseModel noise,
                              std::vector<std::string> tags = {}) {
    if (rows.empty() || rows.front().empty()) {
      throw Error(ErrorCode::kInvalidMatrix, "matrix needs at least one row and one column");
    }
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.front().size());
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) {
        throw Error(ErrorCode::kInvalidMatrix, "ragged rows");
      }
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return GameMatrix(rows.size(), rows.front().size(), std::move(flat), noise, std::move(tags));
  }

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * m_ + j]; }
  double at(Cell c) const { return (*this)(c.row, c.col); }
  std::span<const double> entries() const { return entries_; }
  const NoiseModel& noise() const { return noise_; }
  const std::vector<std::string>& tags() const { return tags_; }

  bool has_tag(std::string_view tag) const {
    return std::find(tags_.begin(), tags_.end(), tag) != tags_.end();
  }

  GameMatrix with_noise(NoiseModel noise) const {
    return GameMatrix(n_, m_, entries_, noise, tags_);
  }

 private:
  void validate() const {
    if (n_ == 0 || m_ == 0) {
      throw Error(ErrorCode::kInvalidMatrix, "n and m must be positive");
    }
    if (entries_.size() != n_ * m_) {
      throw Error(ErrorCode::kInvalidMatrix, "expected " + std::to_string(n_ * m_) +
                                                 " entries, got " + std::to_string(entries_.size()));
    }
    const bool bernoulli = noise_.kind == NoiseKind::kBernoulli;
    for (double v : entries_) {
      if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
        throw Error(ErrorCode::kInvalidMatrix, "entry outside [-1,1]: " + std::to_string(v));
      }
      if (bernoulli && v < 0.0) {
        throw Error(ErrorCode::kInvalidMatrix, "Bernoulli noise needs entries in [0,1]");
      }
    }
    if (noise_.kind == NoiseKind::kGaussian && !(noise_.sigma >= 0.0 && noise_.sigma <= 1.0)) {
      throw Error(ErrorCode::kInvalidMatrix, "Gaussian sigma must lie in [0,1]");
    }
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<double> entries_;
  NoiseModel noise_;
  std::vector<std::string> tags_;
};

}  // namespace psne

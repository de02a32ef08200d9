#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "psne/bai.hpp"
#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/midsearch.hpp"
#include "psne/oracle.hpp"

namespace psne {

struct VerifyOptions {
  double c1 = 8.0;
  BaiMethod method = BaiMethod::kLucb;
};

// Per-bandit sample cap ceil(c1 H ln(max(e, ln H) / delta)), H = (n+m-2)/gap^2.
inline std::uint64_t verify_cap(std::size_t n, std::size_t m, double delta, double delta_guess,
                                double c1 = 8.0) {
  const double h = static_cast<double>(n + m - 2) / (delta_guess * delta_guess);
  if (h <= 0.0) return 1;
  const double cap = std::ceil(c1 * h * std::log(std::max(std::numbers::e, std::log(h)) / delta));
  if (!(cap <= 0x1.0p61)) throw Error(ErrorCode::kInvalidParams, "verify cap exceeds 2^61");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(cap));
}

struct VerifyResult {
  bool accepted = false;
  std::uint64_t cap = 0;
  std::uint64_t samples = 0;
};

// Accepts (i_hat, j_hat) iff best-arm identification on column j_hat picks
// i_hat and, on the negated row i_hat, picks j_hat, each within the cap.
// Draws fresh samples; stops early once the column check fails.
inline VerifyResult verify(SamplingOracle& oracle, Cell guess, double delta, double delta_guess,
                           const VerifyOptions& opt = {}) {
  const std::size_t n = oracle.rows();
  const std::size_t m = oracle.cols();
  if (guess.row >= n || guess.col >= m) {
    throw Error(ErrorCode::kIndexOutOfRange, "candidate " + to_string(guess) + " outside matrix");
  }
  if (!(delta_guess > 0.0)) throw Error(ErrorCode::kInvalidParams, "gap guess must be positive");
  VerifyResult out;
  out.cap = verify_cap(n, m, delta, delta_guess, opt.c1);
  const std::uint64_t start = oracle.total_count();

  std::vector<Cell> column(n);
  for (std::size_t i = 0; i < n; ++i) column[i] = {i, guess.col};
  EntryArms nu1(oracle, std::move(column), 1.0);
  const auto row = best_arm_identify(nu1, out.cap, delta, opt.method);
  if (row && *row == guess.row) {
    std::vector<Cell> line(m);
    for (std::size_t j = 0; j < m; ++j) line[j] = {guess.row, j};
    EntryArms nu2(oracle, std::move(line), -1.0);
    const auto col = best_arm_identify(nu2, out.cap, delta, opt.method);
    out.accepted = col && *col == guess.col;
  }
  out.samples = oracle.total_count() - start;
  return out;
}

struct MetaOptions {
  std::size_t max_rounds = 40;
  VerifyOptions verify;
};

struct MetaRound {
  std::size_t t = 0;
  double gap = 0.0;    // 2^{1-t}
  double delta = 0.0;  // delta / (4 t^2)
  Cell proposal;
  bool degraded = false;
  bool accepted = false;
  std::uint64_t search_samples = 0;
  std::uint64_t verify_samples = 0;
};

struct MetaResult {
  Cell cell;
  std::vector<MetaRound> rounds;
  std::uint64_t samples = 0;
};

// Doubling over gap guesses 1, 1/2, 1/4, ...: propose with the gap-guess
// search, keep the first proposal that passes verification.
inline MetaResult meta_find_psne(SamplingOracle& oracle, double delta, const MetaOptions& opt = {}) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidParams, "delta must lie in (0,1)");
  MetaResult out;
  const std::uint64_t start = oracle.total_count();
  if (oracle.rows() == 1 && oracle.cols() == 1) return out;
  for (std::size_t t = 1; t <= opt.max_rounds; ++t) {
    MetaRound r;
    r.t = t;
    r.gap = std::ldexp(1.0, 1 - static_cast<int>(t));
    r.delta = delta / (4.0 * static_cast<double>(t * t));
    try {
      const std::uint64_t before = oracle.total_count();
      const auto found = find_psne_with_gap(oracle, r.gap, r.delta);
      r.proposal = found.cell;
      r.degraded = found.degraded;
      r.search_samples = oracle.total_count() - before;
      const auto v = verify(oracle, found.cell, r.delta, r.gap, opt.verify);
      r.accepted = v.accepted;
      r.verify_samples = v.samples;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidParams) throw;
      throw Error(ErrorCode::kMaxRoundsExceeded,
                  "sample counts overflow at round " + std::to_string(t) + " (" + e.what() + ")");
    }
    out.rounds.push_back(r);
    if (r.accepted) {
      out.cell = r.proposal;
      out.samples = oracle.total_count() - start;
      return out;
    }
  }
  throw Error(ErrorCode::kMaxRoundsExceeded,
              "no proposal accepted in " + std::to_string(opt.max_rounds) + " rounds");
}

}  // namespace psne

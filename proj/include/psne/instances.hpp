#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "psne/equilibrium.hpp"
#include "psne/error.hpp"
#include "psne/game.hpp"
#include "psne/rng.hpp"

namespace psne {

struct AHardParams {
  std::size_t d = 32;
  double delta_min = 0.05;
  double beta = 0.1;
};

inline void validate(const AHardParams& p) {
  if (p.d < 3) throw Error(ErrorCode::kInvalidParams, "A_hard needs d >= 3");
  if (!(p.delta_min > 0.0 && p.delta_min <= p.beta)) {
    throw Error(ErrorCode::kInvalidParams, "A_hard needs 0 < delta_min <= beta");
  }
  if (p.beta > 0.5) throw Error(ErrorCode::kInvalidParams, "A_hard needs beta <= 1/2");
}

// Hard benchmark family. With 0-based indices:
//   row 0:    0.5, 0.5 + delta_min, 0.5 + beta, ..., 0.5 + beta
//   column 0: 0.5, 0.5 - delta_min, 0.5 - beta, ..., 0.5 - beta
//   rows/cols 1..d-1: 0.5 on the diagonal, 1 above it, 0 below it.
// P + P^T = 1, so this doubles as a dueling instance with Condorcet winner 0.
inline GameMatrix make_a_hard(const AHardParams& p) {
  validate(p);
  const std::size_t d = p.d;
  std::vector<double> a(d * d, 0.0);
  for (std::size_t i = 1; i < d; ++i) {
    for (std::size_t j = 1; j < d; ++j) {
      a[i * d + j] = i == j ? 0.5 : (i < j ? 1.0 : 0.0);
    }
  }
  a[0] = 0.5;
  a[1] = 0.5 + p.delta_min;
  a[d] = 0.5 - p.delta_min;
  for (std::size_t k = 2; k < d; ++k) {
    a[k] = 0.5 + p.beta;
    a[k * d] = 0.5 - p.beta;
  }
  return GameMatrix(d, d, std::move(a), NoiseModel::bernoulli(), {"dueling", "a_hard"});
}

// Closed-form hardness of A_hard in the dueling sense.
inline double a_hard_h1(const AHardParams& p) {
  return static_cast<double>(p.d - 2) / (p.beta * p.beta) + 1.0 / (p.delta_min * p.delta_min);
}

// A = P with Bernoulli duels: a query (i,j) returns 1 iff i beats j.
inline GameMatrix dueling_to_game(const std::vector<std::vector<double>>& p, double tol = 1e-12) {
  const std::size_t k = p.size();
  if (k == 0) throw Error(ErrorCode::kInvalidMatrix, "empty preference matrix");
  for (std::size_t i = 0; i < k; ++i) {
    if (p[i].size() != k) throw Error(ErrorCode::kInvalidMatrix, "preference matrix must be square");
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (p[i][j] < 0.0 || p[i][j] > 1.0) {
        throw Error(ErrorCode::kInvalidMatrix, "preferences must lie in [0,1]");
      }
      if (std::abs(p[i][j] + p[j][i] - 1.0) > tol) {
        throw Error(ErrorCode::kSkewViolation,
                    "P" + to_string(Cell{i, j}) + " + P" + to_string(Cell{j, i}) + " != 1");
      }
    }
  }
  return GameMatrix::from_rows(p, NoiseModel::bernoulli(), {"dueling"});
}

// Best-arm identification as an n x 1 game; the PSNE is (best arm, 0).
inline GameMatrix mab_to_game(const std::vector<double>& means, NoiseModel noise = NoiseModel::gaussian()) {
  if (means.empty()) throw Error(ErrorCode::kInvalidParams, "need at least one arm");
  return GameMatrix(means.size(), 1, means, noise, {"mab"});
}

// Independent uniform[-1,1] entries, resampled until the matrix has a strict
// PSNE. The acceptance rate for n x m is n! m! / (n+m-1)!, about 1.2e-3 at
// 8 x 8, so this is practical only up to roughly that size.
inline GameMatrix make_random_strict(std::size_t n, std::size_t m, std::uint64_t seed,
                                     NoiseModel noise = NoiseModel::gaussian(),
                                     std::size_t max_attempts = 100000) {
  if (n == 0 || m == 0) throw Error(ErrorCode::kInvalidParams, "n and m must be positive");
  Engine gen = make_engine(seed, 0, Stream::kGenerator);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> a(n * m);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (double& v : a) v = unif(gen);
    GameMatrix g(n, m, a, noise, {"random_strict"});
    const auto eq = psne_exact(g);
    if (eq && eq->strict) return g;
  }
  throw Error(ErrorCode::kRejectionLimit, "no strict PSNE after " + std::to_string(max_attempts) +
                                              " draws of a " + std::to_string(n) + "x" +
                                              std::to_string(m) + " matrix");
}

// Random matrix with a strict PSNE planted at a random cell: the equilibrium
// value v is uniform in [-1/2, 1/2], its column below v, its row above v, and
// every other entry uniform in [-1,1]. Covers sizes where rejection sampling
// is hopeless (16 x 16).
inline GameMatrix make_planted_strict(std::size_t n, std::size_t m, std::uint64_t seed,
                                      NoiseModel noise = NoiseModel::gaussian()) {
  if (n == 0 || m == 0) throw Error(ErrorCode::kInvalidParams, "n and m must be positive");
  Engine gen = make_engine(seed, 1, Stream::kGenerator);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const std::size_t is = std::uniform_int_distribution<std::size_t>(0, n - 1)(gen);
  const std::size_t js = std::uniform_int_distribution<std::size_t>(0, m - 1)(gen);
  const double v = std::uniform_real_distribution<double>(-0.5, 0.5)(gen);
  std::vector<double> a(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i * m + j] = unif(gen);
  }
  a[is * m + js] = v;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == is) continue;
    double x;
    do x = std::uniform_real_distribution<double>(-1.0, v)(gen);
    while (!(x < v));
    a[i * m + js] = x;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (j == js) continue;
    double x;
    do x = std::uniform_real_distribution<double>(v, 1.0)(gen);
    while (!(x > v));
    a[is * m + j] = x;
  }
  return GameMatrix(n, m, std::move(a), noise, {"planted_strict"});
}

}  // namespace psne

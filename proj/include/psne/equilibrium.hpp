#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "psne/error.hpp"
#include "psne/game.hpp"

namespace psne {

// Result of a pure-saddle search over a (sub)matrix of values.
//
// The search returns the maximin row paired with the minimax column:
//   row = argmax_i min_j V(i,j),  col = argmin_j max_i V(i,j),
// lowest index on ties. For every cell, (colmax_j - V_ij) + (V_ij - rowmin_i)
// equals colmax_j - rowmin_i, so this pair is also the cell with the least
// total violation of "column max and row min". The violation is zero exactly
// when a (possibly non-strict) saddle point exists, and then the pair is the
// first saddle point in row-major order (saddle points form a rectangle).
struct SaddleSearch {
  Cell cell;
  double violation = 0.0;  // minimax - maximin, >= 0 on finite inputs
  bool degraded() const { return violation > 0.0; }
  // The cell when it is a genuine saddle of the searched values.
  std::optional<Cell> saddle() const {
    if (degraded()) return std::nullopt;
    return cell;
  }
};

// `value(i, j)` gives V over the listed rows/columns. NaN marks an unknown
// entry; unknown entries impose no constraint.
template <class ValueFn>
SaddleSearch find_saddle(std::span<const std::size_t> rows, std::span<const std::size_t> cols,
                         ValueFn&& value) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double best_row_min = -kInf;
  std::size_t best_row = rows.front();
  for (std::size_t i : rows) {
    double row_min = kInf;
    bool known = false;
    for (std::size_t j : cols) {
      const double v = value(i, j);
      if (std::isnan(v)) continue;
      known = true;
      if (v < row_min) row_min = v;
    }
    if (known && row_min > best_row_min) {
      best_row_min = row_min;
      best_row = i;
    }
  }
  double best_col_max = kInf;
  std::size_t best_col = cols.front();
  for (std::size_t j : cols) {
    double col_max = -kInf;
    bool known = false;
    for (std::size_t i : rows) {
      const double v = value(i, j);
      if (std::isnan(v)) continue;
      known = true;
      if (v > col_max) col_max = v;
    }
    if (known && col_max < best_col_max) {
      best_col_max = col_max;
      best_col = j;
    }
  }
  double violation = best_col_max - best_row_min;
  if (!std::isfinite(violation)) violation = kInf;
  return {{best_row, best_col}, violation < 0.0 ? 0.0 : violation};
}

inline std::vector<std::size_t> iota_indices(std::size_t count) {
  std::vector<std::size_t> idx(count);
  for (std::size_t k = 0; k < count; ++k) idx[k] = k;
  return idx;
}

// Saddle search over a full dense row-major grid.
inline SaddleSearch find_saddle(std::size_t n, std::size_t m, std::span<const double> values) {
  const auto rows = iota_indices(n);
  const auto cols = iota_indices(m);
  return find_saddle(rows, cols, [&](std::size_t i, std::size_t j) { return values[i * m + j]; });
}

struct Equilibrium {
  Cell cell;
  bool strict = false;
};

// Exact PSNE of the noise-free matrix: an entry that is the maximum of its
// column and the minimum of its row. `strict` means strictly greater than every
// other entry of its column and strictly smaller than every other entry of its
// row (such an equilibrium is unique).
inline std::optional<Equilibrium> psne_exact(const GameMatrix& a) {
  const auto found = find_saddle(a.rows(), a.cols(), a.entries());
  if (found.degraded()) return std::nullopt;
  const auto [r, c] = found.cell;
  const double v = a(r, c);
  bool strict = true;
  for (std::size_t i = 0; i < a.rows() && strict; ++i) {
    if (i != r && !(a(i, c) < v)) strict = false;
  }
  for (std::size_t j = 0; j < a.cols() && strict; ++j) {
    if (j != c && !(a(r, j) > v)) strict = false;
  }
  return Equilibrium{found.cell, strict};
}

struct HardnessStats {
  std::optional<Cell> psne;
  std::vector<double> row_gaps;  // Delta_{i,j*}; zero at i*
  std::vector<double> col_gaps;  // Delta_{i*,j}; zero at j*
  double h1 = 0.0;               // sum of inverse squared row and column gaps
  // For dueling matrices (P + P^T = 1, PSNE on the diagonal): the Condorcet
  // hardness sum_{i != i*} (P_{i*,i} - 1/2)^{-2}, which equals h1 / 2. This is
  // the hardness used for "multiple of H1" budgets on such instances.
  std::optional<double> h1_dueling;
  double delta_g = std::numeric_limits<double>::infinity();
  double delta_min = std::numeric_limits<double>::infinity();
  bool strict = false;

  double budget_h1() const { return h1_dueling.value_or(h1); }
};

inline bool is_dueling_matrix(const GameMatrix& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (std::abs(a(i, j) + a(j, i) - 1.0) > tol) return false;
    }
  }
  return true;
}

inline HardnessStats hardness_stats(const GameMatrix& a) {
  const auto eq = psne_exact(a);
  if (!eq) throw Error(ErrorCode::kNoStrictPsne, "matrix has no PSNE");
  if (!eq->strict) throw Error(ErrorCode::kNoStrictPsne, "PSNE at " + to_string(eq->cell) +
                                                             " is not strict; H1 is undefined");
  const auto [is, js] = eq->cell;
  const double v = a(is, js);
  HardnessStats s;
  s.psne = eq->cell;
  s.strict = true;
  s.row_gaps.assign(a.rows(), 0.0);
  s.col_gaps.assign(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (i == is) continue;
    s.row_gaps[i] = v - a(i, js);
    s.h1 += 1.0 / (s.row_gaps[i] * s.row_gaps[i]);
    s.delta_min = std::min(s.delta_min, s.row_gaps[i]);
  }
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (j == js) continue;
    s.col_gaps[j] = a(is, j) - v;
    s.h1 += 1.0 / (s.col_gaps[j] * s.col_gaps[j]);
    s.delta_min = std::min(s.delta_min, s.col_gaps[j]);
  }
  const double nm2 = static_cast<double>(a.rows() + a.cols() - 2);
  if (nm2 > 0.0) s.delta_g = std::sqrt(nm2 / s.h1);
  if (is == js && is_dueling_matrix(a)) {
    double hd = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == is) continue;
      const double gap = a(is, i) - 0.5;
      hd += 1.0 / (gap * gap);
    }
    s.h1_dueling = hd;
  }
  return s;
}

}  // namespace psne

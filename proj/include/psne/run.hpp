#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psne/error.hpp"
#include "psne/game.hpp"

namespace psne {

// Anytime trajectory of one fixed-budget run: the algorithm's current answer
// snapshotted at each checkpoint (sample count). An empty answer means the
// algorithm reports no equilibrium, e.g. its empirical matrix has no saddle.
struct AlgorithmRun {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::optional<Cell>> guesses;  // parallel to checkpoints
  std::optional<Cell> final_guess;           // set even when degraded, for display
  std::uint64_t samples_used = 0;
  bool degraded = false;   // final_guess is a fallback, not an empirical saddle point
  bool certified = false;  // stopped early on its own confidence rule
};

// `count` points spread linearly over (0, budget], strictly increasing, last
// equal to budget. Fewer points come back when budget < count.
inline std::vector<std::uint64_t> linear_checkpoints(std::uint64_t budget, std::size_t count = 20) {
  std::vector<std::uint64_t> grid;
  if (budget == 0 || count == 0) return grid;
  for (std::size_t k = 1; k <= count; ++k) {
    const auto c = static_cast<std::uint64_t>(
        (static_cast<long double>(budget) * k) / static_cast<long double>(count) + 0.5L);
    if (c > 0 && (grid.empty() || c > grid.back())) grid.push_back(c);
  }
  if (grid.empty() || grid.back() != budget) grid.push_back(budget);
  return grid;
}

// Fills AlgorithmRun::guesses as samples are spent. The guess at checkpoint c
// is what the algorithm would report after c samples. Samples drawn as one
// batch are indivisible, so a checkpoint falling strictly inside a batch sees
// the guess from before the batch.
class CheckpointRecorder {
 public:
  explicit CheckpointRecorder(std::vector<std::uint64_t> grid) {
    if (!std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
      throw Error(ErrorCode::kInvalidParams, "checkpoints must be strictly increasing");
    }
    run_.checkpoints = std::move(grid);
    run_.guesses.resize(run_.checkpoints.size());
  }

  // True when spending `count` more samples (from `used`) crosses a checkpoint.
  bool due(std::uint64_t used, std::uint64_t count) const {
    return next_ < run_.checkpoints.size() && run_.checkpoints[next_] < used + count;
  }

  // Call before drawing a batch; `guess` is evaluated only if needed.
  template <class GuessFn>
  void before_spend(std::uint64_t used, std::uint64_t count, GuessFn&& guess) {
    if (!due(used, count)) return;
    const std::optional<Cell> g = guess();
    while (next_ < run_.checkpoints.size() && run_.checkpoints[next_] < used + count) {
      run_.guesses[next_++] = g;
    }
  }

  AlgorithmRun finish(std::uint64_t used, std::optional<Cell> final_guess, bool degraded = false,
                      bool certified = false) {
    const std::optional<Cell> answer = degraded ? std::nullopt : final_guess;
    while (next_ < run_.checkpoints.size()) run_.guesses[next_++] = answer;
    run_.final_guess = final_guess;
    run_.samples_used = used;
    run_.degraded = degraded;
    run_.certified = certified;
    return std::move(run_);
  }

 private:
  AlgorithmRun run_;
  std::size_t next_ = 0;
};

}  // namespace psne

#pragma once

#include <cstdint>
#include <random>

namespace psne {

using Engine = std::mt19937_64;

// Independent streams inside one trial.
enum class Stream : std::uint32_t {
  kNoise = 0,      // observation noise served by an oracle
  kDecisions = 1,  // algorithm-side randomization (subsampling, arm draws)
  kGenerator = 2,  // instance generators
};

// Deterministic engine for (base_seed, trial, stream). std::seed_seq mixes all
// words, so neighbouring trial indices give unrelated streams.
inline Engine make_engine(std::uint64_t base_seed, std::uint64_t trial, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Engine(seq);
}

}  // namespace psne

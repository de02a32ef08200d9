#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "psne/psne.hpp"
#include "test_util.hpp"

using namespace psne;

TEST(PsneExact, TwoByTwoExample) {
  const auto g = GameMatrix::from_rows({{0.0, 0.25}, {-0.25, 0.0}}, NoiseModel::zero());
  const auto eq = psne_exact(g);
  ASSERT_TRUE(eq);
  EXPECT_EQ(eq->cell, (Cell{0, 0}));
  EXPECT_TRUE(eq->strict);
}

TEST(PsneExact, SingleEntry) {
  const auto g = GameMatrix::from_rows({{0.7}}, NoiseModel::zero());
  const auto eq = psne_exact(g);
  ASSERT_TRUE(eq);
  EXPECT_EQ(eq->cell, (Cell{0, 0}));
}

TEST(PsneExact, RockPaperScissorsHasNone) {
  const auto g = GameMatrix::from_rows({{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}}, NoiseModel::zero());
  EXPECT_FALSE(psne_exact(g));
}

TEST(PsneExact, NonStrictIsFlagged) {
  const auto g = GameMatrix::from_rows({{0.0, 0.0}, {-0.5, 0.2}}, NoiseModel::zero());
  const auto eq = psne_exact(g);
  ASSERT_TRUE(eq);
  EXPECT_FALSE(eq->strict);
  EXPECT_THROW(hardness_stats(g), Error);
}

// 1000 random matrices up to 8x8, some with forced ties, against a direct
// double loop over all entries.
TEST(PsneExact, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_int_distribution<int> level(-3, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int with_psne = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = size(rng), m = size(rng);
    std::vector<double> a(n * m);
    for (double& v : a) v = rep % 2 ? u(rng) : level(rng) / 3.0;
    const GameMatrix g(n, m, a, NoiseModel::zero());
    const auto want = testutil::brute_force_saddles(n, m, a);
    const auto got = psne_exact(g);
    if (want.empty()) {
      EXPECT_FALSE(got) << "rep " << rep;
      continue;
    }
    ++with_psne;
    ASSERT_TRUE(got) << "rep " << rep;
    EXPECT_NE(std::find(want.begin(), want.end(), got->cell), want.end()) << "rep " << rep;
    EXPECT_EQ(got->strict, testutil::brute_force_strict(n, m, a, got->cell)) << "rep " << rep;
  }
  EXPECT_GT(with_psne, 100);
}

TEST(HardnessStats, TwoByTwo) {
  const auto g = GameMatrix::from_rows({{0.0, 0.25}, {-0.25, 0.0}}, NoiseModel::zero());
  const auto h = hardness_stats(g);
  EXPECT_DOUBLE_EQ(h.h1, 32.0);
  EXPECT_DOUBLE_EQ(h.delta_g, 0.25);
  EXPECT_DOUBLE_EQ(h.delta_min, 0.25);
}

TEST(HardnessStats, AHardFormula) {
  const auto h = hardness_stats(make_a_hard({32, 0.05, 0.1}));
  EXPECT_NEAR(h.budget_h1(), 3400.0, 3400.0 * 1e-12);
  ASSERT_TRUE(h.h1_dueling);
  // Row and column gaps mirror each other on a dueling instance.
  EXPECT_NEAR(h.h1, 6800.0, 6800.0 * 1e-12);
  EXPECT_NEAR(h.delta_min, 0.05, 1e-15);
}

TEST(HardnessStats, IndependentSummation) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = make_random_strict(2 + seed % 6, 1 + seed % 7, seed, NoiseModel::zero());
    const auto h = hardness_stats(g);
    const Cell s = psne_exact(g)->cell;
    double h1 = 0.0, dmin = INFINITY;
    for (std::size_t i = 0; i < g.rows(); ++i) {
      if (i == s.row) continue;
      const double gap = g(s.row, s.col) - g(i, s.col);
      h1 += 1.0 / (gap * gap);
      dmin = std::min(dmin, gap);
    }
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (j == s.col) continue;
      const double gap = g(s.row, j) - g(s.row, s.col);
      h1 += 1.0 / (gap * gap);
      dmin = std::min(dmin, gap);
    }
    EXPECT_NEAR(h.h1, h1, h1 * 1e-12);
    EXPECT_DOUBLE_EQ(h.delta_min, dmin);
    const double nm2 = static_cast<double>(g.rows() + g.cols() - 2);
    EXPECT_NEAR(h.delta_g, std::sqrt(nm2 / h1), 1e-12);
  }
}

TEST(GameMatrix, RejectsOutOfRange) {
  EXPECT_THROW(GameMatrix(1, 2, {0.0, 1.5}, NoiseModel::zero()), Error);
  EXPECT_THROW(GameMatrix(0, 2, {}, NoiseModel::zero()), Error);
  EXPECT_THROW(GameMatrix(1, 2, {0.2, -0.1}, NoiseModel::bernoulli()), Error);
  EXPECT_THROW(GameMatrix(1, 1, {0.2}, NoiseModel::gaussian(1.5)), Error);
}

TEST(Oracle, ZeroNoiseIsExact) {
  const GameMatrix g(1, 2, {0.3, -0.2}, NoiseModel::zero());
  SamplingOracle o(g, 1);
  EXPECT_EQ(o.sample(0, 0), 0.3);
  EXPECT_EQ(o.count(0, 0), 1u);
  EXPECT_EQ(o.total_count(), 1u);
}

TEST(Oracle, DegenerateBernoulli) {
  const GameMatrix g(1, 2, {1.0, 0.0}, NoiseModel::bernoulli());
  SamplingOracle o(g, 3);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(o.sample(0, 0), 1.0);
    EXPECT_EQ(o.sample(0, 1), 0.0);
  }
  EXPECT_EQ(o.sample_sum(0, 0, 1000), 1000.0);
}

TEST(Oracle, IndexOutOfRange) {
  const GameMatrix g(2, 2, {0, 0, 0, 0}, NoiseModel::zero());
  SamplingOracle o(g, 0);
  try {
    o.sample(2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

// 0.005 is five standard errors at n = 1e6; two-sided failure below 1e-6.
TEST(Oracle, GaussianMean) {
  const GameMatrix g(1, 1, {0.0}, NoiseModel::gaussian(1.0));
  SamplingOracle o(g, 11);
  double sum = 0.0;
  for (int k = 0; k < 1000000; ++k) sum += o.sample(0, 0);
  EXPECT_LT(std::abs(sum / 1e6), 0.005);
}

// Batched sums follow the same law as single draws (mean and variance).
TEST(Oracle, BatchedSumMoments) {
  const GameMatrix g(1, 2, {0.3, 0.1}, NoiseModel::bernoulli());
  SamplingOracle o(g, 5);
  const int reps = 20000;
  const std::uint64_t c = 50;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double x = o.sample_sum(0, 0, c);
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / reps;
  const double var = s2 / reps - mean * mean;
  EXPECT_NEAR(mean, 15.0, 4.0 * std::sqrt(10.5 / reps));
  EXPECT_NEAR(var, 10.5, 0.5);
  EXPECT_EQ(o.count(0, 0), reps * c);
}

TEST(Oracle, CounterConservation) {
  const auto g = make_random_strict(4, 5, 2, NoiseModel::gaussian());
  SamplingOracle o(g, 9);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t i = rng() % 4, j = rng() % 5;
    if (k % 3 == 0) o.sample_sum(i, j, 1 + rng() % 40);
    else o.sample(i, j);
    auto ec = o.sampler({i, j}, 7);
    if (k % 5 == 0) ec();
  }
  std::uint64_t sum = 0;
  for (std::uint64_t v : o.per_entry_counts()) sum += v;
  EXPECT_EQ(sum, o.total_count());
}

TEST(Oracle, Determinism) {
  const auto g = make_random_strict(3, 3, 4, NoiseModel::gaussian());
  SamplingOracle a(g, 42, 3), b(g, 42, 3), c(g, 43, 3);
  bool differs = false;
  for (int k = 0; k < 500; ++k) {
    const std::size_t i = k % 3, j = (k / 3) % 3;
    const double x = a.sample(i, j);
    EXPECT_EQ(x, b.sample(i, j));
    differs |= x != c.sample(i, j);
    EXPECT_EQ(a.sample_sum(i, j, 17), b.sample_sum(i, j, 17));
    c.sample_sum(i, j, 17);
  }
  EXPECT_TRUE(differs);
}

TEST(Dueling, CondorcetWinnerIsDiagonalPsne) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + rep % 7;
    const std::size_t w = rng() % k;
    std::vector<std::vector<double>> p(k, std::vector<double>(k, 0.5));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double v = u(rng);
        if (i == w) v = 0.5 + 0.5 * u(rng) + 1e-3;
        if (j == w) v = 0.5 - 0.5 * u(rng) - 1e-3;
        v = std::clamp(v, 0.0, 1.0);
        p[i][j] = v;
        p[j][i] = 1.0 - v;
      }
    }
    const auto eq = psne_exact(dueling_to_game(p));
    ASSERT_TRUE(eq);
    EXPECT_EQ(eq->cell, (Cell{w, w}));
  }
}

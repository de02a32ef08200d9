#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "psne/psne.hpp"
#include "test_util.hpp"

using namespace psne;

TEST(AHard, ThreeByThreeEntries) {
  const auto g = make_a_hard({3, 0.05, 0.1});
  const double want[3][3] = {{0.5, 0.55, 0.6}, {0.45, 0.5, 1.0}, {0.4, 0.0, 0.5}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(g(i, j), want[i][j]) << i << "," << j;
  }
  EXPECT_EQ(g.noise().kind, NoiseKind::kBernoulli);
  EXPECT_TRUE(g.has_tag("dueling"));
}

// Block layout rebuilt from the definition: first row / column use delta_min
// then beta, the rest is 0.5 I plus ones above the diagonal.
TEST(AHard, BlockStructure) {
  for (std::size_t d : {3u, 4u, 9u, 32u, 64u}) {
    const AHardParams p{d, 0.03, 0.2};
    const auto g = make_a_hard(p);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double want;
        if (i == 0 && j == 0) want = 0.5;
        else if (i == 0) want = j == 1 ? 0.5 + p.delta_min : 0.5 + p.beta;
        else if (j == 0) want = i == 1 ? 0.5 - p.delta_min : 0.5 - p.beta;
        else want = i == j ? 0.5 : (j > i ? 1.0 : 0.0);
        ASSERT_DOUBLE_EQ(g(i, j), want) << d << ": " << i << "," << j;
        ASSERT_NEAR(g(i, j) + g(j, i), 1.0, 1e-15);
      }
    }
  }
}

TEST(AHard, PsneAndHardness) {
  for (std::size_t d = 3; d <= 64; d += 5) {
    for (double dm : {0.01, 0.05, 0.1}) {
      const AHardParams p{d, dm, 0.1};
      const auto g = make_a_hard(p);
      const auto a = testutil::entries(g);
      const auto saddles = testutil::brute_force_saddles(d, d, a);
      ASSERT_EQ(saddles.size(), 1u);
      EXPECT_EQ(saddles[0], (Cell{0, 0}));
      const auto eq = psne_exact(g);
      ASSERT_TRUE(eq);
      EXPECT_TRUE(eq->strict);
      const double h1 = (d - 2) / (0.1 * 0.1) + 1.0 / (dm * dm);
      const auto h = hardness_stats(g);
      EXPECT_NEAR(h.budget_h1(), h1, h1 * 1e-12);
      EXPECT_NEAR(a_hard_h1(p), h1, h1 * 1e-12);
      EXPECT_NEAR(h.delta_min, dm, 1e-12);
      for (double v : a) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(AHard, InvalidParams) {
  EXPECT_THROW(make_a_hard({2, 0.05, 0.1}), Error);
  EXPECT_THROW(make_a_hard({32, 0.2, 0.1}), Error);
  EXPECT_THROW(make_a_hard({32, 0.0, 0.1}), Error);
  EXPECT_THROW(make_a_hard({32, 0.05, 0.6}), Error);
  EXPECT_NO_THROW(make_a_hard({32, 0.1, 0.1}));
}

TEST(DuelingToGame, CondorcetWinner) {
  const std::vector<std::vector<double>> p{{0.5, 0.3, 0.6}, {0.7, 0.5, 0.7}, {0.4, 0.3, 0.5}};
  const auto g = dueling_to_game(p);
  EXPECT_EQ(g.noise().kind, NoiseKind::kBernoulli);
  EXPECT_EQ(psne_exact(g)->cell, (Cell{1, 1}));
}

TEST(DuelingToGame, SingleArm) {
  EXPECT_EQ(psne_exact(dueling_to_game({{0.5}}))->cell, (Cell{0, 0}));
}

TEST(DuelingToGame, CyclicHasNone) {
  const std::vector<std::vector<double>> p{{0.5, 0.6, 0.4}, {0.4, 0.5, 0.6}, {0.6, 0.4, 0.5}};
  EXPECT_FALSE(psne_exact(dueling_to_game(p)));
}

TEST(DuelingToGame, SkewViolation) {
  try {
    dueling_to_game({{0.5, 0.6}, {0.5, 0.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSkewViolation);
  }
}

TEST(DuelingToGame, WinFrequency) {
  const auto g = dueling_to_game({{0.5, 0.37}, {0.63, 0.5}});
  SamplingOracle o(g, 17);
  double wins = 0.0;
  for (int k = 0; k < 100000; ++k) wins += o.sample(0, 1);
  EXPECT_NEAR(wins / 1e5, 0.37, 0.01);
  EXPECT_EQ(o.count(1, 0), 0u);
}

TEST(MabToGame, BestArm) {
  EXPECT_EQ(psne_exact(mab_to_game({0.9, 0.1}))->cell, (Cell{0, 0}));
  EXPECT_EQ(psne_exact(mab_to_game({0.1, 0.9, 0.5}))->cell, (Cell{1, 0}));
  const auto dup = mab_to_game({0.9, 0.9, 0.1});
  EXPECT_FALSE(psne_exact(dup)->strict);
  EXPECT_THROW(hardness_stats(dup), Error);
}

TEST(RandomStrict, Reproducible) {
  EXPECT_EQ(make_random_strict(1, 1, 5).entries().size(), 1u);
  const auto a = make_random_strict(4, 4, 12);
  const auto b = make_random_strict(4, 4, 12);
  EXPECT_EQ(testutil::entries(a), testutil::entries(b));
  EXPECT_NE(testutil::entries(a), testutil::entries(make_random_strict(4, 4, 13)));
}

TEST(RandomStrict, UpToEight) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto g = make_random_strict(n, n, 100 + n);
    const auto eq = psne_exact(g);
    ASSERT_TRUE(eq && eq->strict);
    for (double v : testutil::entries(g)) EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(RandomStrict, RejectionLimit) {
  try {
    make_random_strict(8, 8, 1, NoiseModel::zero(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRejectionLimit);
  }
}

TEST(PlantedStrict, HasStrictPsne) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 1 + s % 16, m = 1 + (s * 7) % 16;
    const auto g = make_planted_strict(n, m, s);
    const auto a = testutil::entries(g);
    const auto saddles = testutil::brute_force_saddles(n, m, a);
    ASSERT_EQ(saddles.size(), 1u);
    EXPECT_TRUE(testutil::brute_force_strict(n, m, a, saddles[0]));
  }
}

TEST(InstanceIo, RoundTrip) {
  const auto g = make_a_hard({5, 0.05, 0.1});
  const auto back = instance_from_json(instance_to_json(g));
  EXPECT_EQ(testutil::entries(back), testutil::entries(g));
  EXPECT_EQ(back.noise().kind, NoiseKind::kBernoulli);
  EXPECT_TRUE(back.has_tag("dueling"));
}

TEST(InstanceIo, DecimalTextIsExact) {
  const auto j = nlohmann::json::parse(
      R"({"n": 1, "m": 3, "entries": [[0.1, -0.3, 0.7]], "noise": {"kind": "gaussian", "sigma": 0.5}})");
  const auto g = instance_from_json(j);
  EXPECT_EQ(g(0, 0), 0.1);
  EXPECT_EQ(g(0, 1), -0.3);
  EXPECT_EQ(g.noise().sigma, 0.5);
  EXPECT_EQ(instance_to_json(g)["entries"][0][2].dump(), "0.7");
}

TEST(InstanceIo, Defaults) {
  const auto plain = instance_from_json(nlohmann::json::parse(R"({"n":1,"m":1,"entries":[[0]]})"));
  EXPECT_EQ(plain.noise().kind, NoiseKind::kGaussian);
  const auto duel = instance_from_json(
      nlohmann::json::parse(R"({"n":1,"m":1,"entries":[[0.5]],"tags":["dueling"]})"));
  EXPECT_EQ(duel.noise().kind, NoiseKind::kBernoulli);
  EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"n":2,"m":1,"entries":[[0]]})")), Error);
}

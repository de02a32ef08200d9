// Acceptance suite: one pass/fail line per criterion. `--only <name>` runs a
// single criterion; the exit status is nonzero when any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psne/psne.hpp"
#include "../test_util.hpp"

using namespace psne;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

std::uint64_t final_successes(const ExperimentResult& r, const std::string& alg) {
  std::uint64_t s = 0;
  for (const auto& p : r.points) {
    if (p.algorithm == alg && p.checkpoint_samples == r.budget) s = p.successes;
  }
  return s;
}

double final_rate(const ExperimentResult& r, const std::string& alg) {
  for (const auto& p : r.points) {
    if (p.algorithm == alg && p.checkpoint_samples == r.budget) return p.rate;
  }
  return 0.0;
}

std::size_t errored(const ExperimentResult& r, const std::string& alg) {
  for (const auto& s : r.summaries) {
    if (s.algorithm == alg) return s.errored_trials;
  }
  return 0;
}

ExperimentConfig a_hard_config(std::size_t d, double delta_min, std::size_t trials,
                               const std::string& algorithms, std::uint64_t seed) {
  return config_from_json(nlohmann::json::parse(
      R"({"instance": {"a_hard": {"d": )" + std::to_string(d) + R"(, "delta_min": )" +
      std::to_string(delta_min) + R"(, "beta": 0.1}}, "algorithms": )" + algorithms +
      R"(, "budget": {"h1_multiple": 50}, "checkpoints": 1, "trials": )" + std::to_string(trials) +
      R"(, "base_seed": )" + std::to_string(seed) + "}"));
}

// A_hard(32, 0.05, 0.1), 300 trials, T = 50 H1 = 170000.
Outcome figure1() {
  const auto cfg = a_hard_config(
      32, 0.05, 300, R"([{"name": "midsearch", "delta": 0.1}, "exp3ix", {"name": "lucb-g", "delta": 0.1}, "uniform"])",
      2024);
  const auto r = run_experiment(cfg);
  struct Band {
    const char* alg;
    std::uint64_t lo, hi;
  };
  const Band bands[] = {{"midsearch", 285, 300}, {"exp3ix", 255, 300}, {"lucb-g", 85, 160}, {"uniform", 70, 135}};
  Outcome out{cfg.budget == 170000, ""};
  out.detail = "T=" + std::to_string(cfg.budget);
  for (const auto& b : bands) {
    const auto s = final_successes(r, b.alg);
    const bool ok = s >= b.lo && s <= b.hi && errored(r, b.alg) == 0;
    out.pass = out.pass && ok;
    out.detail += std::string(" ") + b.alg + "=" + std::to_string(s) + "/300" + (ok ? "" : "(!)") + " in [" +
                  std::to_string(b.lo) + "," + std::to_string(b.hi) + "]";
  }
  return out;
}

// d = 128, beta = 0.1, T = 50 H1, 100 trials at delta_min 0.1 and 0.0125.
Outcome dmin_degradation() {
  const std::string algs = R"([{"name": "midsearch", "delta": 0.1}, "tsallis"])";
  const auto easy = run_experiment(a_hard_config(128, 0.1, 100, algs, 2025));
  const auto hard = run_experiment(a_hard_config(128, 0.0125, 100, algs, 2025));
  const double ts_easy = final_rate(easy, "tsallis"), ts_hard = final_rate(hard, "tsallis");
  const double ms_easy = final_rate(easy, "midsearch"), ms_hard = final_rate(hard, "midsearch");
  const bool drop = ts_easy - ts_hard >= 0.10 - 1e-12;
  const bool ms = ms_easy >= 0.90 && ms_hard >= 0.90;
  return {drop && ms, "tsallis " + fmt(ts_easy) + " -> " + fmt(ts_hard) + " (drop >= 0.100 needed)" +
                          ", midsearch " + fmt(ms_easy) + " / " + fmt(ms_hard) + " (>= 0.900)"};
}

// meta with delta = 0.1, 100 trials on five random strict 8x8 games and A_hard(16).
Outcome delta_pac() {
  std::vector<std::pair<std::string, GameMatrix>> games;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    games.emplace_back("random8x8#" + std::to_string(s), make_random_strict(8, 8, s));
  }
  games.emplace_back("A_hard16", make_a_hard({16, 0.05, 0.1}));
  Outcome out{true, ""};
  for (const auto& [name, g] : games) {
    const Cell truth = psne_exact(g)->cell;
    std::vector<int> hit(100, 0);
    parallel_trials(100, [&](std::size_t t) {
      SamplingOracle o(g, 31, t);
      hit[t] = meta_find_psne(o, 0.1).cell == truth;
    });
    const int ok = std::accumulate(hit.begin(), hit.end(), 0);
    out.pass = out.pass && ok >= 85;
    out.detail += (out.detail.empty() ? "" : " ") + name + "=" + std::to_string(ok) + "/100";
  }
  out.detail += " (>= 85 each)";
  return out;
}

// Slope of ln(mean meta samples) against ln(H1) over A_hard(d) for d in {8,16,32,64}.
Outcome h1_scaling() {
  std::vector<double> x, y;
  int wrong = 0;
  std::string detail;
  for (std::size_t d : {8u, 16u, 32u, 64u}) {
    const auto g = make_a_hard({d, 0.05, 0.1});
    std::vector<double> samples(20);
    std::vector<int> bad(20, 0);
    parallel_trials(20, [&](std::size_t t) {
      SamplingOracle o(g, 77, t);
      const auto r = meta_find_psne(o, 0.1);
      samples[t] = static_cast<double>(r.samples);
      bad[t] = r.cell != Cell{0, 0};
    });
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / 20.0;
    wrong += std::accumulate(bad.begin(), bad.end(), 0);
    const double h1 = hardness_stats(g).budget_h1();
    x.push_back(std::log(h1));
    y.push_back(std::log(mean));
    std::ostringstream os;
    os.precision(3);
    os << " d=" << d << ":" << mean;
    detail += os.str();
  }
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - xm) * (y[k] - ym);
    sxx += (x[k] - xm) * (x[k] - xm);
  }
  const double slope = sxy / sxx;
  return {slope >= 0.7 && slope <= 1.3,
          "slope " + fmt(slope) + " in [0.7,1.3]," + detail + " wrong=" + std::to_string(wrong)};
}

// 16 arms with means 0.9 - 0.12 k (gaps 4 eps, eps = 0.03), noiseless and
// Gaussian, 200 runs of each estimator at delta = 0.1.
Outcome midval_interval() {
  constexpr double eps = 0.03;
  std::vector<double> mu;
  for (int k = 0; k < 16; ++k) mu.push_back(0.9 - 0.12 * k);
  std::vector<Cell> arms;
  for (std::size_t i = 0; i < mu.size(); ++i) arms.push_back({i, 0});
  std::vector<double> desc = mu, asc = mu;
  std::sort(desc.begin(), desc.end(), std::greater<>());
  std::sort(asc.begin(), asc.end());
  // High side: [mu_(n/2) - eps, mu_(n/4+1) + eps], means sorted descending.
  const double c_lo = desc[7] - eps, c_hi = desc[4] + eps;
  // Low side: [mu_(n/4+1) - eps, mu_(n/2) + eps], means sorted ascending.
  const double r_lo = asc[4] - eps, r_hi = asc[7] + eps;
  Outcome out{true, ""};
  for (const auto& [label, noise] : {std::pair{"noiseless", NoiseModel::zero()},
                                     std::pair{"gaussian", NoiseModel::gaussian()}}) {
    const GameMatrix g(16, 1, mu, noise);
    std::vector<int> cbad(200, 0), rbad(200, 0);
    parallel_trials(200, [&](std::size_t t) {
      SamplingOracle o(g, 404, t);
      const double c = cmidval(o, arms, eps, 0.1);
      const double r = rmidval(o, arms, eps, 0.1);
      cbad[t] = !(c >= c_lo && c <= c_hi);
      rbad[t] = !(r >= r_lo && r <= r_hi);
    });
    const int cv = std::accumulate(cbad.begin(), cbad.end(), 0);
    const int rv = std::accumulate(rbad.begin(), rbad.end(), 0);
    out.pass = out.pass && cv <= 32 && rv <= 32;
    out.detail += std::string(out.detail.empty() ? "" : " ") + label + ": high " + std::to_string(cv) +
                  "/200 low " + std::to_string(rv) + "/200";
  }
  out.detail += " violations (<= 32 each)";
  return out;
}

// Subset gap bounds on rows and columns of 500 strict-PSNE matrices up to 16x16.
Outcome subset_gaps() {
  int violations = 0, checked = 0;
  for (std::uint64_t rep = 0; checked < 500; ++rep) {
    const std::size_t n = 1 + rep % 16, m = 1 + (rep * 11 + rep / 16) % 16;
    if (n + m < 3) continue;
    const auto g = n <= 8 && m <= 8 && rep % 2 ? make_random_strict(n, m, rep) : make_planted_strict(n, m, rep);
    const auto h = hardness_stats(g);
    for (int side = 0; side < 2; ++side) {
      violations += testutil::subset_gap_violations(testutil::line_gaps(g, *h.psne, side), n + m - 2, h.delta_g);
    }
    ++checked;
  }
  return {violations == 0, std::to_string(checked) + " matrices, " + std::to_string(violations) + " violations"};
}

// Closed-form counts against oracle counters on 50 seeded configurations.
Outcome exact_accounting() {
  int mismatches = 0;
  std::mt19937_64 rng(5150);
  std::uniform_int_distribution<std::size_t> size(1, 20), arms_n(1, 16);
  const double gaps[] = {1.0, 0.5, 0.3};
  const double deltas[] = {0.1, 0.05, 0.2};
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = size(rng), m = size(rng);
    const double gap = gaps[c % 3], delta = deltas[(c / 3) % 3];
    const auto g = make_planted_strict(n, m, 1000 + c);

    SamplingOracle o1(g, c);
    const auto found = find_psne_with_gap(o1, gap, delta);
    mismatches += o1.total_count() != testutil::expected_gap_samples(n, m, gap, delta);
    mismatches += found.samples != o1.total_count();

    const std::size_t k_arms = std::min<std::size_t>(arms_n(rng), n);
    std::vector<Cell> arms;
    for (std::size_t i = 0; i < k_arms; ++i) arms.push_back({i, 0});
    const double eps = 0.05 + 0.01 * (c % 7);
    const auto ell = static_cast<std::uint64_t>(std::ceil(14.0 * std::log(1.0 / delta)));
    auto k = static_cast<std::uint64_t>(std::ceil(108.0 * std::log(4.0 / 0.05)));
    while (k % 3) ++k;
    const auto per = static_cast<std::uint64_t>(std::ceil(2.0 * std::log(2.0 * k / 0.05) / (eps * eps)));
    SamplingOracle o2(g, c);
    (c % 2 ? rmidval : cmidval)(o2, arms, eps, delta);
    mismatches += o2.total_count() != ell * k * per;

    const double h = static_cast<double>(n + m - 2) / (gap * gap);
    const auto cap = h <= 0.0 ? std::uint64_t{1}
                              : static_cast<std::uint64_t>(std::ceil(
                                    8.0 * h * std::log(std::max(std::exp(1.0), std::log(h)) / delta)));
    const Cell cand = c % 2 ? psne_exact(g)->cell : Cell{static_cast<std::size_t>(c) % n, 0};
    SamplingOracle o3(g, c);
    const auto v = verify(o3, cand, delta, gap);
    mismatches += v.cap != std::max<std::uint64_t>(cap, 1);
    mismatches += v.samples != o3.total_count();
    mismatches += v.samples > 2 * std::max<std::uint64_t>(cap, 1);

    if (n * m > 1) {
      const std::uint64_t budget = 20 * n * m * 16 + c;
      SamplingOracle o4(g, c);
      const auto run = find_psne_heuristic(o4, budget, 0.1, linear_checkpoints(budget, 5));
      mismatches += o4.total_count() != budget || run.samples_used != budget;
    }
  }
  return {mismatches == 0, "50 configurations, " + std::to_string(mismatches) + " mismatches"};
}

// psne_exact against a double-loop checker on 1000 random matrices up to 8x8,
// then zero-noise meta against psne_exact on 200 strict ones.
Outcome brute_force() {
  std::mt19937_64 rng(8128);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> coarse(-2, 2);
  int discrepancies = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = size(rng), m = size(rng);
    std::vector<double> a(n * m);
    // Every third matrix uses a coarse grid so ties and non-strict saddles occur.
    for (double& v : a) v = rep % 3 == 0 ? coarse(rng) / 2.0 : unif(rng);
    const GameMatrix g(n, m, a, NoiseModel::zero());
    const auto saddles = testutil::brute_force_saddles(n, m, a);
    const auto eq = psne_exact(g);
    if (saddles.empty()) {
      discrepancies += eq.has_value();
      continue;
    }
    if (!eq || std::find(saddles.begin(), saddles.end(), eq->cell) == saddles.end()) {
      ++discrepancies;
      continue;
    }
    discrepancies += eq->strict != testutil::brute_force_strict(n, m, a, eq->cell);
  }
  std::vector<int> wrong(200, 0);
  parallel_trials(200, [&](std::size_t t) {
    const auto g = make_random_strict(1 + t % 8, 1 + (t * 5 / 8) % 8, 9000 + t, NoiseModel::zero());
    SamplingOracle o(g, 1, t);
    wrong[t] = meta_find_psne(o, 0.1).cell != psne_exact(g)->cell;
  });
  const int meta_wrong = std::accumulate(wrong.begin(), wrong.end(), 0);
  return {discrepancies == 0 && meta_wrong <= 2, std::to_string(discrepancies) + "/1000 discrepancies, meta " +
                                                     std::to_string(meta_wrong) + "/200 failures (<= 2)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"figure1", figure1},
      {"dmin_degradation", dmin_degradation},
      {"delta_pac", delta_pac},
      {"h1_scaling", h1_scaling},
      {"midval_interval", midval_interval},
      {"subset_gaps", subset_gaps},
      {"exact_accounting", exact_accounting},
      {"brute_force", brute_force},
  };
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> only;
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << " (" << fmt(secs, 1) << "s)"
              << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

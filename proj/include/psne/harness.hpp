#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "psne/baselines.hpp"
#include "psne/equilibrium.hpp"
#include "psne/error.hpp"
#include "psne/instance_io.hpp"
#include "psne/instances.hpp"
#include "psne/midsearch.hpp"
#include "psne/oracle.hpp"
#include "psne/run.hpp"

namespace psne {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for a binomial proportion, clamped to [0,1].
inline Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95) {
  if (trials == 0 || successes > trials) {
    throw Error(ErrorCode::kInvalidCounts, std::to_string(successes) + "/" + std::to_string(trials));
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "confidence must lie in (0,1)");
  }
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  const double denom = 1.0 + z2 / nn;
  Interval ci{(centre - half) / denom, (centre + half) / denom};
  ci.lo = std::clamp(ci.lo, 0.0, 1.0);
  ci.hi = std::clamp(ci.hi, 0.0, 1.0);
  // Guard the containment property against rounding at p = 0 or 1.
  ci.lo = std::min(ci.lo, p);
  ci.hi = std::max(ci.hi, p);
  return ci;
}

// Worker count: MIDSEARCH_THREADS if set and positive, else the hardware count.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("MIDSEARCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(trial) for trial in [0, count) on a pool of workers. Each trial
// must write only its own output slot. The first exception is rethrown.
inline void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& body,
                            std::size_t workers = worker_count()) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= count || failed.load()) return;
        try {
          body(t);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- config

struct AlgorithmSpec {
  std::string name;  // midsearch | exp3ix | tsallis | lucb-g | uniform
  double delta = 0.1;
  SelfPlayGuess guess = SelfPlayGuess::kLeader;  // exp3ix / tsallis only
};

struct OutputPaths {
  std::string csv, json, svg;
};

struct ExperimentConfig {
  GameMatrix instance = GameMatrix(1, 1, {0.0}, NoiseModel::zero());
  std::string instance_label;
  std::vector<AlgorithmSpec> algorithms;
  std::uint64_t budget = 0;
  std::optional<double> h1_multiple;
  std::size_t trials = 1;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t base_seed = 0;
  OutputPaths output;
};

inline const std::vector<std::string>& fixed_budget_algorithms() {
  static const std::vector<std::string> names{"midsearch", "exp3ix", "tsallis", "lucb-g", "uniform"};
  return names;
}

inline AlgorithmRun run_algorithm(const AlgorithmSpec& alg, SamplingOracle& oracle,
                                  std::uint64_t budget, const std::vector<std::uint64_t>& grid) {
  if (alg.name == "midsearch") return find_psne_heuristic(oracle, budget, alg.delta, grid);
  if (alg.name == "exp3ix") return run_exp3ix_selfplay(oracle, budget, grid, alg.guess);
  if (alg.name == "tsallis") return run_tsallis_inf_selfplay(oracle, budget, grid, alg.guess);
  if (alg.name == "lucb-g") return run_lucb_g(oracle, budget, alg.delta, grid);
  if (alg.name == "uniform") return run_uniform(oracle, budget, grid);
  throw Error(ErrorCode::kConfig, "unknown algorithm '" + alg.name + "'");
}

// Instance object of a config: exactly one of
//   {"a_hard": {"d", "delta_min", "beta"}}, {"file": path},
//   {"random_strict": {"n", "m", "seed"}}, {"mab": {"means": [...]}},
//   {"dueling": {"p": [[...]]}}, {"matrix": <instance JSON>}
// plus an optional "noise" override.
inline GameMatrix instance_from_config(const nlohmann::json& j, std::string* label = nullptr) {
  std::optional<GameMatrix> g;
  std::string what;
  if (j.contains("a_hard")) {
    const auto& p = j.at("a_hard");
    AHardParams ap{p.at("d").get<std::size_t>(), p.at("delta_min").get<double>(),
                   p.at("beta").get<double>()};
    g = make_a_hard(ap);
    what = "a_hard(d=" + std::to_string(ap.d) + ")";
  } else if (j.contains("file")) {
    what = j.at("file").get<std::string>();
    g = load_instance(what);
  } else if (j.contains("random_strict")) {
    const auto& p = j.at("random_strict");
    g = make_random_strict(p.at("n").get<std::size_t>(), p.at("m").get<std::size_t>(),
                           p.value("seed", std::uint64_t{0}));
    what = "random_strict";
  } else if (j.contains("mab")) {
    g = mab_to_game(j.at("mab").at("means").get<std::vector<double>>());
    what = "mab";
  } else if (j.contains("dueling")) {
    g = dueling_to_game(j.at("dueling").at("p").get<std::vector<std::vector<double>>>());
    what = "dueling";
  } else if (j.contains("matrix")) {
    g = instance_from_json(j.at("matrix"));
    what = "matrix";
  } else {
    throw Error(ErrorCode::kConfig, "instance needs one of a_hard, file, random_strict, mab, dueling, matrix");
  }
  if (j.contains("noise")) g = g->with_noise(noise_from_json(j.at("noise")));
  if (label) *label = what;
  return *g;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.instance = instance_from_config(j.at("instance"), &c.instance_label);
    for (const auto& a : j.at("algorithms")) {
      AlgorithmSpec s;
      if (a.is_string()) {
        s.name = a.get<std::string>();
      } else {
        s.name = a.at("name").get<std::string>();
        s.delta = a.value("delta", 0.1);
        const std::string g = a.value("guess", std::string("leader"));
        if (g == "most_played") s.guess = SelfPlayGuess::kMostPlayed;
        else if (g != "leader") throw Error(ErrorCode::kConfig, "guess must be leader or most_played");
      }
      const auto& known = fixed_budget_algorithms();
      if (std::find(known.begin(), known.end(), s.name) == known.end()) {
        throw Error(ErrorCode::kConfig, "unknown or fixed-confidence algorithm '" + s.name +
                                            "' (bench runs fixed-budget algorithms only)");
      }
      c.algorithms.push_back(s);
    }
    if (c.algorithms.empty()) throw Error(ErrorCode::kConfig, "no algorithms listed");
    const auto& b = j.at("budget");
    if (b.contains("h1_multiple")) {
      c.h1_multiple = b.at("h1_multiple").get<double>();
      const double h1 = hardness_stats(c.instance).budget_h1();
      c.budget = static_cast<std::uint64_t>(std::llround(*c.h1_multiple * h1));
    } else {
      c.budget = b.at("samples").get<std::uint64_t>();
    }
    if (c.budget == 0) throw Error(ErrorCode::kConfig, "budget must be positive");
    c.trials = j.value("trials", std::size_t{1});
    if (c.trials == 0) throw Error(ErrorCode::kConfig, "trials must be >= 1");
    const auto& cp = j.contains("checkpoints") ? j.at("checkpoints") : nlohmann::json(20);
    if (cp.is_array()) {
      c.checkpoints = cp.get<std::vector<std::uint64_t>>();
      if (c.checkpoints.empty() || c.checkpoints.back() != c.budget) {
        throw Error(ErrorCode::kConfig, "explicit checkpoints must end at the budget");
      }
      for (std::size_t k = 1; k < c.checkpoints.size(); ++k) {
        if (c.checkpoints[k] <= c.checkpoints[k - 1]) {
          throw Error(ErrorCode::kConfig, "checkpoints must be strictly increasing");
        }
      }
    } else {
      c.checkpoints = linear_checkpoints(c.budget, cp.get<std::size_t>());
    }
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    if (j.contains("output")) {
      const auto& o = j.at("output");
      c.output.csv = o.value("csv", "");
      c.output.json = o.value("json", "");
      c.output.svg = o.value("svg", "");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------- results

struct CurvePoint {
  std::string algorithm;
  std::uint64_t checkpoint_samples = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double mean_samples_used = 0.0;
};

struct AlgorithmSummary {
  std::string algorithm;
  std::uint64_t errored_trials = 0;
  std::vector<std::string> errors;  // first few messages
  double wall_time = 0.0;           // seconds, summed over trials
};

struct ExperimentResult {
  std::vector<CurvePoint> points;  // one per (algorithm, checkpoint)
  std::vector<AlgorithmSummary> summaries;
  std::optional<Cell> truth;
  std::uint64_t budget = 0;
  std::size_t trials = 0;
};

struct TrialOutcome {
  std::vector<std::uint8_t> correct;  // per checkpoint
  std::uint64_t samples_used = 0;
  double wall_time = 0.0;
  std::optional<std::string> error;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       std::size_t workers = worker_count()) {
  if (cfg.trials == 0) throw Error(ErrorCode::kConfig, "trials must be >= 1");
  ExperimentResult res;
  res.budget = cfg.budget;
  res.trials = cfg.trials;
  const auto eq = psne_exact(cfg.instance);
  if (eq) res.truth = eq->cell;
  const std::size_t na = cfg.algorithms.size();
  const std::size_t nc = cfg.checkpoints.size();
  std::vector<TrialOutcome> outcomes(cfg.trials * na);

  parallel_trials(
      cfg.trials,
      [&](std::size_t trial) {
        for (std::size_t a = 0; a < na; ++a) {
          TrialOutcome& out = outcomes[trial * na + a];
          out.correct.assign(nc, 0);
          SamplingOracle oracle(cfg.instance, cfg.base_seed, trial);
          const auto t0 = std::chrono::steady_clock::now();
          try {
            const AlgorithmRun run = run_algorithm(cfg.algorithms[a], oracle, cfg.budget, cfg.checkpoints);
            for (std::size_t k = 0; k < nc && k < run.guesses.size(); ++k) {
              out.correct[k] = res.truth && run.guesses[k] && *run.guesses[k] == *res.truth;
            }
            out.samples_used = oracle.total_count();
          } catch (const Error& e) {
            out.error = e.what();
          }
          out.wall_time =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
      },
      workers);

  for (std::size_t a = 0; a < na; ++a) {
    AlgorithmSummary sum;
    sum.algorithm = cfg.algorithms[a].name;
    std::uint64_t ok_trials = 0;
    double samples = 0.0;
    std::vector<std::uint64_t> succ(nc, 0);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const TrialOutcome& o = outcomes[t * na + a];
      sum.wall_time += o.wall_time;
      if (o.error) {
        ++sum.errored_trials;
        if (sum.errors.size() < 5) sum.errors.push_back(*o.error);
        continue;
      }
      ++ok_trials;
      samples += static_cast<double>(o.samples_used);
      for (std::size_t k = 0; k < nc; ++k) succ[k] += o.correct[k];
    }
    if (ok_trials > 0) {
      for (std::size_t k = 0; k < nc; ++k) {
        CurvePoint p;
        p.algorithm = sum.algorithm;
        p.checkpoint_samples = cfg.checkpoints[k];
        p.successes = succ[k];
        p.trials = ok_trials;
        p.rate = static_cast<double>(succ[k]) / static_cast<double>(ok_trials);
        const Interval ci = wilson_ci(succ[k], ok_trials);
        p.wilson_lo = ci.lo;
        p.wilson_hi = ci.hi;
        p.mean_samples_used = samples / static_cast<double>(ok_trials);
        res.points.push_back(p);
      }
    }
    res.summaries.push_back(std::move(sum));
  }
  return res;
}

// ---------------------------------------------------------------- emitters

inline constexpr const char* kCsvHeader =
    "algorithm,checkpoint_samples,successes,trials,rate,wilson_lo,wilson_hi,mean_samples_used";

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline std::string results_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& p : r.points) {
    os << p.algorithm << ',' << p.checkpoint_samples << ',' << p.successes << ',' << p.trials << ','
       << detail::fmt_double(p.rate) << ',' << detail::fmt_double(p.wilson_lo) << ','
       << detail::fmt_double(p.wilson_hi) << ',' << detail::fmt_double(p.mean_samples_used) << '\n';
  }
  return os.str();
}

inline std::vector<CurvePoint> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kConfig, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(ErrorCode::kConfig, "unexpected CSV header: " + line);
  std::vector<CurvePoint> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(lineno) + ": expected 8 fields");
    }
    try {
      std::size_t pos = 0;
      auto u64 = [&](const std::string& s) {
        const auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(v);
      };
      auto dbl = [&](const std::string& s) {
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      };
      CurvePoint p;
      p.algorithm = f[0];
      p.checkpoint_samples = u64(f[1]);
      p.successes = u64(f[2]);
      p.trials = u64(f[3]);
      p.rate = dbl(f[4]);
      p.wilson_lo = dbl(f[5]);
      p.wilson_hi = dbl(f[6]);
      p.mean_samples_used = dbl(f[7]);
      pts.push_back(p);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return pts;
}

inline nlohmann::json results_json(const ExperimentResult& r) {
  nlohmann::json j;
  j["budget"] = r.budget;
  j["trials"] = r.trials;
  j["truth"] = r.truth ? nlohmann::json::array({r.truth->row + 1, r.truth->col + 1}) : nlohmann::json();
  j["points"] = nlohmann::json::array();
  for (const auto& p : r.points) {
    j["points"].push_back({{"algorithm", p.algorithm},
                           {"checkpoint_samples", p.checkpoint_samples},
                           {"successes", p.successes},
                           {"trials", p.trials},
                           {"rate", p.rate},
                           {"wilson_lo", p.wilson_lo},
                           {"wilson_hi", p.wilson_hi},
                           {"mean_samples_used", p.mean_samples_used}});
  }
  j["algorithms"] = nlohmann::json::array();
  for (const auto& s : r.summaries) {
    j["algorithms"].push_back({{"algorithm", s.algorithm},
                               {"errored_trials", s.errored_trials},
                               {"errors", s.errors},
                               {"wall_time", s.wall_time}});
  }
  return j;
}

// Success-rate curves with shaded Wilson bands, one series per algorithm.
inline std::string render_svg(const std::vector<CurvePoint>& pts, const std::string& title = "") {
  const double w = 720, h = 440, left = 64, right = 150, top = 36, bottom = 52;
  const double pw = w - left - right, ph = h - top - bottom;
  std::vector<std::string> algs;
  double xmax = 0.0;
  for (const auto& p : pts) {
    if (std::find(algs.begin(), algs.end(), p.algorithm) == algs.end()) algs.push_back(p.algorithm);
    xmax = std::max(xmax, static_cast<double>(p.checkpoint_samples));
  }
  if (xmax <= 0.0) xmax = 1.0;
  auto sx = [&](double x) { return left + pw * x / xmax; };
  auto sy = [&](double y) { return top + ph * (1.0 - y); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) os << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << title << "</text>\n";
  os << "<g stroke=\"#444\" fill=\"none\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(0) << "\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << left << "\" y2=\"" << sy(1) << "\"/>\n";
  os << "</g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = k / 4.0;
    os << "<line x1=\"" << left << "\" y1=\"" << sy(y) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(y)
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">" << y * 100
       << "%</text>\n";
    const double x = xmax * k / 4.0;
    os << "<text x=\"" << sx(x) << "\" y=\"" << sy(0) + 18 << "\" text-anchor=\"middle\">"
       << static_cast<std::uint64_t>(x) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">samples</text>\n";
  os << "<text transform=\"translate(16," << top + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">success rate</text>\n";
  for (std::size_t a = 0; a < algs.size(); ++a) {
    std::vector<CurvePoint> s;
    for (const auto& p : pts) {
      if (p.algorithm == algs[a]) s.push_back(p);
    }
    std::sort(s.begin(), s.end(), [](const CurvePoint& x, const CurvePoint& y) {
      return x.checkpoint_samples < y.checkpoint_samples;
    });
    const char* col = colors[a % 6];
    os << "<polygon fill=\"" << col << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (const auto& p : s) os << sx(static_cast<double>(p.checkpoint_samples)) << ',' << sy(p.wilson_hi) << ' ';
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      os << sx(static_cast<double>(it->checkpoint_samples)) << ',' << sy(it->wilson_lo) << ' ';
    }
    os << "\"/>\n<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : s) os << sx(static_cast<double>(p.checkpoint_samples)) << ',' << sy(p.rate) << ' ';
    os << "\"/>\n";
    const double ly = top + 16 + 20.0 * static_cast<double>(a);
    os << "<line x1=\"" << left + pw + 14 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 38 << "\" y2=\""
       << ly << "\" stroke=\"" << col << "\" stroke-width=\"3\"/>\n";
    os << "<text x=\"" << left + pw + 44 << "\" y=\"" << ly + 4 << "\">" << algs[a] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

inline void emit_results(const ExperimentResult& r, const OutputPaths& out) {
  if (!out.csv.empty()) write_text(out.csv, results_csv(r));
  if (!out.json.empty()) write_text(out.json, results_json(r).dump(2) + "\n");
  if (!out.svg.empty()) write_text(out.svg, render_svg(r.points));
}

}  // namespace psne

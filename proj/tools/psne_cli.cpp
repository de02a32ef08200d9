// psne: inspect instances, run one identifier, run seeded benchmarks, plot.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psne/psne.hpp"

namespace {

using namespace psne;

struct InstanceFlags {
  std::string a_hard;   // "d,delta_min,beta"
  std::string file;
  std::string random;   // "n,m,seed"
  std::string noise;    // gaussian|bernoulli|zero, optional override
  double sigma = 1.0;

  void add(CLI::App* app, bool file_as_instance) {
    app->add_option("--a-hard", a_hard, "A_hard generator parameters d,delta_min,beta");
    app->add_option(file_as_instance ? "--instance,--file" : "--file,--instance", file,
                    "instance JSON file");
    app->add_option("--random", random, "random strict-PSNE matrix n,m,seed");
    app->add_option("--noise", noise, "override noise: gaussian, bernoulli or zero");
    app->add_option("--sigma", sigma, "Gaussian noise scale for --noise gaussian");
  }
};

std::vector<double> split_numbers(const std::string& s, std::size_t expect, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != part.size()) {
      throw Error(ErrorCode::kInvalidParams, std::string(flag) + ": bad number '" + part + "'");
    }
    out.push_back(v);
  }
  if (out.size() != expect) {
    throw Error(ErrorCode::kInvalidParams,
                std::string(flag) + " expects " + std::to_string(expect) + " comma-separated values");
  }
  return out;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) {
    throw Error(ErrorCode::kInvalidParams, std::string(what) + " must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

GameMatrix build_instance(const InstanceFlags& f, std::string& label) {
  const int given = !f.a_hard.empty() + !f.file.empty() + !f.random.empty();
  if (given != 1) {
    throw Error(ErrorCode::kInvalidParams, "give exactly one of --a-hard, --file/--instance, --random");
  }
  std::optional<GameMatrix> g;
  if (!f.a_hard.empty()) {
    const auto v = split_numbers(f.a_hard, 3, "--a-hard");
    const AHardParams p{as_count(v[0], "d"), v[1], v[2]};
    g = make_a_hard(p);
    std::ostringstream os;
    os << "A_hard(d=" << p.d << ", delta_min=" << p.delta_min << ", beta=" << p.beta << ")";
    label = os.str();
  } else if (!f.file.empty()) {
    g = load_instance(f.file);
    label = f.file;
  } else {
    const auto v = split_numbers(f.random, 3, "--random");
    const auto n = as_count(v[0], "n");
    const auto m = as_count(v[1], "m");
    if (v[2] < 0.0 || v[2] != std::floor(v[2])) {
      throw Error(ErrorCode::kInvalidParams, "seed must be a non-negative integer");
    }
    g = make_random_strict(n, m, static_cast<std::uint64_t>(v[2]));
    label = "random strict " + std::to_string(n) + "x" + std::to_string(m) +
            " (seed " + std::to_string(static_cast<std::uint64_t>(v[2])) + ")";
  }
  if (!f.noise.empty()) {
    nlohmann::json j{{"kind", f.noise}, {"sigma", f.sigma}};
    g = g->with_noise(noise_from_json(j));
  }
  return *g;
}

std::string cell_or_none(const std::optional<Cell>& c) { return c ? to_string(*c) : "none"; }

// ---------------------------------------------------------------- instance

int cmd_instance(const InstanceFlags& f, const std::string& emit) {
  std::string label;
  const GameMatrix g = build_instance(f, label);
  std::cout << "instance: " << label << '\n';
  std::cout << "n = " << g.rows() << ", m = " << g.cols() << '\n';
  std::cout << "noise: " << to_string(g.noise().kind);
  if (g.noise().kind == NoiseKind::kGaussian) std::cout << " (sigma " << g.noise().sigma << ")";
  std::cout << '\n';
  if (!emit.empty()) {
    save_instance(g, emit);
    std::cout << "wrote " << emit << '\n';
  }
  const auto eq = psne_exact(g);
  if (!eq) {
    std::cout << "PSNE: none\n";
    return 0;
  }
  if (!eq->strict) {
    std::cout << "PSNE: " << to_string(eq->cell) << " (not strict)\n";
    std::cerr << "error: the PSNE is not strict, so H1 and the gaps are undefined\n";
    return 1;
  }
  const HardnessStats s = hardness_stats(g);
  std::cout << "PSNE: " << to_string(eq->cell) << '\n';
  std::cout << std::setprecision(10);
  std::cout << "H1 = " << s.budget_h1() << '\n';
  if (s.h1_dueling) std::cout << "H1 (row+col sum) = " << s.h1 << '\n';
  std::cout << "Delta_g = " << s.delta_g << '\n';
  std::cout << "Delta_min = " << s.delta_min << '\n';
  return 0;
}

// ---------------------------------------------------------------- run

struct RunFlags {
  std::string alg = "meta";
  std::uint64_t budget = 0;
  double h1_multiple = 0.0;
  double delta = 0.1;
  double gap = 0.0;
  std::uint64_t seed = 0;
  std::size_t checkpoints = 20;
  std::string guess = "leader";
  bool verbose = false;
};

void print_stages(const std::vector<StageRecord>& stages, const char* indent) {
  for (const auto& st : stages) {
    std::cout << indent << to_string(st.kind) << " stage  |X|=" << st.rows << " |Y|=" << st.cols;
    if (st.kind != StageKind::kTerminal) {
      if (st.epsilon > 0.0) std::cout << " eps=" << st.epsilon;
      std::cout << (st.kind == StageKind::kRows ? " pivot col " : " pivot row ") << *st.pivot + 1;
      std::cout << (st.kind == StageKind::kRows ? " drop rows" : " drop cols");
      for (std::size_t e : st.eliminated) std::cout << ' ' << e + 1;
    }
    std::cout << "  samples=" << st.samples << '\n';
  }
}

int cmd_run(const InstanceFlags& f, const RunFlags& r) {
  std::string label;
  const GameMatrix g = build_instance(f, label);
  const auto eq = psne_exact(g);
  const std::optional<Cell> truth = eq ? std::optional<Cell>(eq->cell) : std::nullopt;
  std::cout << "instance: " << label << '\n';
  std::cout << "algorithm: " << r.alg << '\n';
  std::cout << "seed: " << r.seed << '\n';
  SamplingOracle oracle(g, r.seed);
  std::optional<Cell> guess;
  bool degraded = false;

  if (r.alg == "meta") {
    const MetaResult res = meta_find_psne(oracle, r.delta);
    guess = res.cell;
    for (const auto& rd : res.rounds) {
      std::cout << "round " << rd.t << "  gap=" << rd.gap << " delta_t=" << rd.delta
                << "  proposal " << to_string(rd.proposal) << (rd.accepted ? " accepted" : " rejected")
                << "  search=" << rd.search_samples << " verify=" << rd.verify_samples << '\n';
    }
  } else if (r.alg == "gap") {
    double gap = r.gap;
    if (gap <= 0.0) {
      gap = hardness_stats(g).delta_g;
      std::cout << "gap guess: Delta_g = " << gap << '\n';
    }
    const GapSearchResult res = find_psne_with_gap(oracle, gap, r.delta);
    guess = res.cell;
    degraded = res.degraded;
    if (r.verbose) print_stages(res.stages, "  ");
  } else {
    std::uint64_t budget = r.budget;
    if (r.h1_multiple > 0.0) {
      budget = static_cast<std::uint64_t>(std::llround(r.h1_multiple * hardness_stats(g).budget_h1()));
    }
    if (budget == 0) throw Error(ErrorCode::kInvalidParams, "--budget or --h1-multiple is required");
    std::cout << "budget: " << budget << '\n';
    const auto grid = linear_checkpoints(budget, r.checkpoints);
    AlgorithmRun run;
    std::vector<StageRecord> stages;
    if (r.alg == "midsearch") {
      run = find_psne_heuristic(oracle, budget, r.delta, grid, {}, &stages);
    } else {
      const std::vector<std::string>& known = fixed_budget_algorithms();
      if (std::find(known.begin(), known.end(), r.alg) == known.end()) {
        throw Error(ErrorCode::kInvalidParams, "unknown algorithm '" + r.alg + "'");
      }
      AlgorithmSpec spec{r.alg, r.delta};
      if (r.guess == "most_played") spec.guess = SelfPlayGuess::kMostPlayed;
      run = run_algorithm(spec, oracle, budget, grid);
    }
    if (r.verbose) {
      print_stages(stages, "  ");
      for (std::size_t k = 0; k < run.checkpoints.size(); ++k) {
        std::cout << "  checkpoint " << run.checkpoints[k] << "  guess " << cell_or_none(run.guesses[k])
                  << '\n';
      }
    }
    guess = run.final_guess;
    degraded = run.degraded;
    if (run.certified) std::cout << "stopped early: certified\n";
  }
  std::cout << "guess: " << cell_or_none(guess) << (degraded ? " (degraded)" : "") << '\n';
  std::cout << "samples used: " << oracle.total_count() << '\n';
  std::cout << "truth: " << cell_or_none(truth) << '\n';
  const bool correct = truth && guess && !degraded && *truth == *guess;
  std::cout << "correct: " << (correct ? "true" : "false") << '\n';
  return 0;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const std::string& path, std::size_t trials, const OutputPaths& override_out) {
  ExperimentConfig cfg = load_config(path);
  if (trials > 0) cfg.trials = trials;
  if (!override_out.csv.empty()) cfg.output.csv = override_out.csv;
  if (!override_out.json.empty()) cfg.output.json = override_out.json;
  if (!override_out.svg.empty()) cfg.output.svg = override_out.svg;
  std::cout << "instance: " << cfg.instance_label << " (" << cfg.instance.rows() << "x"
            << cfg.instance.cols() << ")\n";
  std::cout << "budget: " << cfg.budget << "  trials: " << cfg.trials << "  base_seed: " << cfg.base_seed
            << "  workers: " << worker_count() << '\n';
  const ExperimentResult res = run_experiment(cfg);
  emit_results(res, cfg.output);

  std::cout << std::left << std::setw(12) << "algorithm" << std::right << std::setw(12) << "successes"
            << std::setw(10) << "rate" << std::setw(22) << "wilson 95%" << std::setw(14) << "mean samples"
            << std::setw(9) << "errors" << std::setw(10) << "time[s]" << '\n';
  for (const auto& s : res.summaries) {
    const CurvePoint* last = nullptr;
    for (const auto& p : res.points) {
      if (p.algorithm == s.algorithm) last = &p;
    }
    std::ostringstream ci, rate, succ, time;
    rate << std::fixed << std::setprecision(3) << (last ? last->rate : 0.0);
    ci << std::fixed << std::setprecision(3) << '[' << (last ? last->wilson_lo : 0.0) << ", "
       << (last ? last->wilson_hi : 0.0) << ']';
    succ << (last ? last->successes : 0) << '/' << (last ? last->trials : 0);
    time << std::fixed << std::setprecision(1) << s.wall_time;
    std::cout << std::left << std::setw(12) << s.algorithm << std::right << std::setw(12) << succ.str()
              << std::setw(10) << rate.str() << std::setw(22) << ci.str() << std::setw(14)
              << std::llround(last ? last->mean_samples_used : 0.0) << std::setw(9) << s.errored_trials
              << std::setw(10) << time.str() << '\n';
    for (const auto& e : s.errors) std::cout << "  error: " << e << '\n';
  }
  for (const std::string* p : {&cfg.output.csv, &cfg.output.json, &cfg.output.svg}) {
    if (!p->empty()) std::cout << "wrote " << *p << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- plot

int cmd_plot(const std::string& csv, const std::string& out, const std::string& title) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + csv);
  const auto pts = parse_results_csv(in);
  write_text(out, render_svg(pts, title));
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identify the pure strategy Nash equilibrium of noisy zero-sum matrix games"};
  app.require_subcommand(1);

  InstanceFlags inst_flags;
  std::string emit;
  auto* inst = app.add_subcommand("instance", "print size, PSNE, H1, Delta_g and Delta_min of an instance");
  inst_flags.add(inst, false);
  inst->add_option("--emit", emit, "write the instance as JSON to this path");

  InstanceFlags run_inst;
  RunFlags rf;
  auto* run = app.add_subcommand("run", "one seeded run of one algorithm");
  run_inst.add(run, true);
  run->add_option("--alg", rf.alg, "meta | gap | midsearch | exp3ix | tsallis | lucb-g | uniform")
      ->capture_default_str();
  run->add_option("--budget", rf.budget, "sample budget T for fixed-budget algorithms");
  run->add_option("--h1-multiple", rf.h1_multiple, "budget as a multiple of H1");
  run->add_option("--delta", rf.delta, "failure probability")->capture_default_str();
  run->add_option("--gap", rf.gap, "gap guess for --alg gap (default: Delta_g of the instance)");
  run->add_option("--seed", rf.seed, "base seed")->capture_default_str();
  run->add_option("--checkpoints", rf.checkpoints, "checkpoints printed with --verbose")
      ->capture_default_str();
  run->add_option("--guess", rf.guess, "self-play report rule: leader | most_played")
      ->check(CLI::IsMember({"leader", "most_played"}))
      ->capture_default_str();
  run->add_flag("--verbose,-v", rf.verbose, "print stages and checkpoint guesses");

  std::string config;
  std::size_t trials = 0;
  OutputPaths out;
  auto* bench = app.add_subcommand("bench", "multi-trial fixed-budget experiment from a JSON config");
  bench->add_option("config", config, "experiment config (JSON)")->required();
  bench->add_option("--trials", trials, "override the number of trials");
  bench->add_option("--csv", out.csv, "override the CSV output path");
  bench->add_option("--json", out.json, "override the JSON output path");
  bench->add_option("--svg", out.svg, "override the SVG output path");

  std::string csv, svg, title;
  auto* plot = app.add_subcommand("plot", "render success curves from a results CSV");
  plot->add_option("csv", csv, "results CSV")->required();
  plot->add_option("out", svg, "output SVG")->required();
  plot->add_option("--title", title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*inst) return cmd_instance(inst_flags, emit);
    if (*run) return cmd_run(run_inst, rf);
    if (*bench) return cmd_bench(config, trials, out);
    if (*plot) return cmd_plot(csv, svg, title);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

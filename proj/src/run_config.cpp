#include "stratlearn/run_config.hpp"

#include "stratlearn/external.hpp"
#include "stratlearn/manifest.hpp"
#include "stratlearn/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace stratlearn {

namespace {

void add_run_options(CLI::App &app, RunConfig &c) {
  app.add_option("--space", c.space_path, "strategy-space table (csv)")
      ->required();
  auto *manifest =
      app.add_option("--manifest", c.manifest_path, "problem manifest");
  auto *landscape = app.add_option("--landscape", c.landscape_path,
                                   "synthetic landscape description");
  manifest->excludes(landscape);
  landscape->excludes(manifest);
  app.add_option("--adapter", c.adapter_path, "solver adapter config")
      ->needs(manifest);
  app.add_option("--budget-frac", c.budget_fraction,
                 "learning budget as a fraction of the time limit")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--budget-seconds", c.budget_seconds,
                 "absolute learning budget (clock units)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--samples-per-epoch", c.samples_per_epoch,
                 "Collect samples per learning epoch")
      ->check(CLI::PositiveNumber);
  app.add_option("--strategize-samples", c.strategize_samples,
                 "chain length when choosing a strategy")
      ->check(CLI::PositiveNumber);
  app.add_option("--trees", c.trees, "trees in the random forest")
      ->check(CLI::PositiveNumber);
  app.add_option("--init-depth", c.init_depth, "initial tree depth")
      ->check(CLI::PositiveNumber);
  app.add_option("--fixed-depth", c.fixed_depth,
                 "train every forest at exactly this depth")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--score-threshold", c.score_threshold,
                 "training R^2 that stops depth growth");
  app.add_option("--beta", c.beta, "sampler inverse temperature (collect)")
      ->check(CLI::PositiveNumber);
  app.add_option("--strategize-beta", c.strategize_beta,
                 "sampler inverse temperature (strategize)")
      ->check(CLI::PositiveNumber);
  app.add_option("--abort-multiplier", c.abort_multiplier,
                 "collect runs stop at this multiple of the baseline")
      ->check(CLI::Range(1.0, std::numeric_limits<double>::max()));
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--time-limit", c.time_limit, "total time limit (clock units)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--step", c.step, "BMC step size (recorded only)");
  app.add_flag("--no-learn", c.no_learn, "disable learning epochs");
  app.add_flag("--virtual-clock", c.virtual_clock,
               "account time by solver effort instead of wall time");
  app.add_flag("--revisit-past", c.revisit_past,
               "collect on a random solved index instead of the current one");
  app.add_option("--out", c.out_path, "trajectory output file");
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

} // namespace

RunConfig parse_args(const std::vector<std::string> &args) {
  RunConfig c;
  CLI::App app{"stratlearn run"};
  add_run_options(app, c);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    throw UsageError(std::string(e.what()) + "\n" + app.help());
  }
  if (c.abort_multiplier <= 1.0)
    throw UsageError("--abort-multiplier must be > 1\n" + app.help());
  if (!c.manifest_path && !c.landscape_path)
    throw UsageError("one of --manifest or --landscape is required\n" +
                     app.help());
  if (c.manifest_path && !c.adapter_path)
    throw UsageError("--manifest needs --adapter\n" + app.help());
  if (c.no_learn) {
    c.budget_fraction = 0.0;
    c.budget_seconds.reset();
  }
  return c;
}

std::vector<std::string> render_args(const RunConfig &c) {
  const RunConfig d;
  std::vector<std::string> a{"--space", c.space_path};
  auto put = [&](const char *flag, const std::string &v) {
    a.emplace_back(flag);
    a.push_back(v);
  };
  if (c.manifest_path)
    put("--manifest", *c.manifest_path);
  if (c.adapter_path)
    put("--adapter", *c.adapter_path);
  if (c.landscape_path)
    put("--landscape", *c.landscape_path);
  if (c.no_learn)
    a.emplace_back("--no-learn");
  else if (c.budget_fraction != d.budget_fraction)
    put("--budget-frac", fmt(c.budget_fraction));
  if (c.budget_seconds)
    put("--budget-seconds", fmt(*c.budget_seconds));
  if (c.samples_per_epoch != d.samples_per_epoch)
    put("--samples-per-epoch", std::to_string(c.samples_per_epoch));
  if (c.strategize_samples != d.strategize_samples)
    put("--strategize-samples", std::to_string(c.strategize_samples));
  if (c.trees != d.trees)
    put("--trees", std::to_string(c.trees));
  if (c.init_depth)
    put("--init-depth", std::to_string(*c.init_depth));
  if (c.fixed_depth)
    put("--fixed-depth", std::to_string(*c.fixed_depth));
  if (c.score_threshold != d.score_threshold)
    put("--score-threshold", fmt(c.score_threshold));
  if (c.beta != d.beta)
    put("--beta", fmt(c.beta));
  if (c.strategize_beta != d.strategize_beta)
    put("--strategize-beta", fmt(c.strategize_beta));
  if (c.abort_multiplier != d.abort_multiplier)
    put("--abort-multiplier", fmt(c.abort_multiplier));
  if (c.seed != d.seed)
    put("--seed", std::to_string(c.seed));
  if (c.time_limit)
    put("--time-limit", fmt(*c.time_limit));
  if (c.step)
    put("--step", std::to_string(*c.step));
  if (c.virtual_clock)
    a.emplace_back("--virtual-clock");
  if (c.revisit_past)
    a.emplace_back("--revisit-past");
  if (c.out_path)
    put("--out", *c.out_path);
  return a;
}

std::size_t default_init_depth(const StrategySpace &space) {
  return (space.parameter_count() + 1 + 2) / 3;
}

EngineConfig make_engine_config(const RunConfig &c,
                                const StrategySpace &space) {
  EngineConfig e;
  e.policy.samples_per_epoch = c.samples_per_epoch;
  e.policy.strategize_samples = c.strategize_samples;
  if (c.no_learn) {
    e.policy.learning_budget = 0.0;
  } else if (c.budget_seconds) {
    e.policy.learning_budget = *c.budget_seconds;
  } else if (c.budget_fraction == 0.0) {
    e.policy.learning_budget = 0.0;
  } else if (c.time_limit) {
    e.policy.learning_budget = c.budget_fraction * *c.time_limit;
  } else {
    throw UsageError("--budget-frac needs --time-limit; pass --budget-seconds "
                     "or --no-learn to run without one");
  }
  e.collect_sampler.beta = c.beta;
  e.strategize_sampler.beta = c.strategize_beta;
  e.learner.trees = c.trees;
  e.learner.init_depth = c.init_depth.value_or(default_init_depth(space));
  e.learner.fixed_depth = c.fixed_depth;
  e.learner.score_threshold = c.score_threshold;
  e.cost.abort_multiplier = c.abort_multiplier;
  e.seed = c.seed;
  e.time_limit = c.time_limit;
  // A synthetic landscape has no wall time to report.
  e.clock = c.virtual_clock || c.landscape_path ? ClockMode::virtual_clock
                                                : ClockMode::wall_clock;
  e.cost.metric_kind = c.landscape_path ? MetricKind::virtual_time
                                        : MetricKind::conflicts;
  e.revisit_past_indices = c.revisit_past;
  return e;
}

std::unique_ptr<Backend> make_backend(const RunConfig &c,
                                      const StrategySpace &space) {
  if (c.landscape_path)
    return std::make_unique<SyntheticBackend>(
        load_landscape(*c.landscape_path, space));
  if (c.manifest_path && c.adapter_path)
    return std::make_unique<ExternalBackend>(
        load_adapter_config(*c.adapter_path), load_manifest(*c.manifest_path),
        space);
  throw UsageError("need --landscape, or --manifest with --adapter");
}

TrajectoryHeader make_header(const RunConfig &c, const Backend &backend) {
  TrajectoryHeader h;
  h.problems = backend.problem_count();
  h.metric = c.landscape_path ? "virtual_time" : "conflicts";
  h.metadata["seed"] = std::to_string(c.seed);
  h.metadata["clock"] =
      c.virtual_clock || c.landscape_path ? "virtual" : "wall";
  if (c.step)
    h.metadata["step"] = std::to_string(*c.step);
  return h;
}

RunReport run_once(const RunConfig &config) {
  const auto space = StrategySpace::load(config.space_path);
  auto backend = make_backend(config, space);
  Engine engine(space, *backend, make_engine_config(config, space));
  RunReport r{engine.run(), {}};
  const auto header = make_header(config, *backend);
  if (config.out_path)
    r.summary = emit_trajectory(r.result.trajectory.events(), header,
                                std::filesystem::path(*config.out_path));
  else
    r.summary = summarize(r.result.trajectory.events(), header.problems);
  return r;
}

AblationGrid ablation_grid(const RunConfig &config,
                           const std::vector<double> &budgets,
                           const std::vector<std::size_t> &depths,
                           std::size_t repeats, std::size_t jobs) {
  if (budgets.empty() || depths.empty())
    throw std::invalid_argument("ablation grid needs budgets and depths");
  if (repeats < 1)
    throw std::invalid_argument("ablation grid needs at least one repeat");

  AblationGrid g;
  g.budgets = budgets;
  g.depths = depths;
  g.values.assign(budgets.size(), std::vector<double>(depths.size(), 0.0));
  g.errors.assign(budgets.size(),
                  std::vector<std::string>(depths.size(), std::string()));

  const std::size_t cells = budgets.size() * depths.size();
  auto run_cell = [&](std::size_t cell) {
    const std::size_t b = cell / depths.size(), d = cell % depths.size();
    try {
      std::vector<double> solved;
      for (std::size_t r = 0; r < repeats; ++r) {
        RunConfig c = config;
        c.out_path.reset();
        c.budget_seconds = budgets[b];
        c.no_learn = budgets[b] <= 0.0;
        c.fixed_depth = depths[d];
        c.seed = config.seed + r;
        const auto report = run_once(c);
        solved.push_back(static_cast<double>(
            report.summary.largest_solved_index.value_or(0)));
      }
      std::sort(solved.begin(), solved.end());
      const std::size_t m = solved.size();
      g.values[b][d] =
          m % 2 ? solved[m / 2] : (solved[m / 2 - 1] + solved[m / 2]) / 2.0;
    } catch (const std::exception &e) {
      g.values[b][d] = std::numeric_limits<double>::quiet_NaN();
      g.errors[b][d] = e.what();
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, cells));
  if (jobs == 1) {
    for (std::size_t cell = 0; cell < cells; ++cell)
      run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t cell; (cell = next++) < cells;)
          run_cell(cell);
      });
    for (auto &t : pool)
      t.join();
  }
  return g;
}

void write_grid(const AblationGrid &g, std::ostream &out) {
  out << "budget";
  for (auto d : g.depths)
    out << "\tdepth=" << d;
  out << '\n';
  for (std::size_t b = 0; b < g.budgets.size(); ++b) {
    out << fmt(g.budgets[b]);
    for (std::size_t d = 0; d < g.depths.size(); ++d) {
      if (std::isnan(g.values[b][d]))
        out << "\terror";
      else
        out << '\t' << fmt(g.values[b][d]);
    }
    out << '\n';
  }
}

} // namespace stratlearn

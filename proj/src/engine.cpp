#include "stratlearn/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace stratlearn {

std::string_view to_string(Outcome o) {
  switch (o) {
  case Outcome::success:
    return "success";
  case Outcome::failure:
    return "failure";
  case Outcome::time_limit:
    return "time_limit";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (auto o : {Outcome::success, Outcome::failure, Outcome::time_limit})
    if (to_string(o) == s)
      return o;
  return std::nullopt;
}

std::string_view to_string(Phase p) {
  switch (p) {
  case Phase::solve:
    return "solve";
  case Phase::collect:
    return "collect";
  case Phase::train:
    return "train";
  case Phase::strategize:
    return "strategize";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view s) {
  for (auto p : {Phase::solve, Phase::collect, Phase::train, Phase::strategize})
    if (to_string(p) == s)
      return p;
  return std::nullopt;
}

void EpochPolicy::validate() const {
  if (samples_per_epoch < 1)
    throw std::invalid_argument("samples per epoch must be >= 1");
  if (strategize_samples < 1)
    throw std::invalid_argument("strategize samples must be >= 1");
  if (!(learning_budget >= 0.0))
    throw std::invalid_argument("learning budget must be >= 0");
}

void Trajectory::record(Event e) {
  cumulative_ += e.virtual_time;
  e.cumulative_time = cumulative_;
  events_.push_back(std::move(e));
}

EngineState rule_next(EngineState state, std::size_t problem_count,
                      Verdict verdict) {
  if (state.terminal)
    throw RuleNotApplicable("Next: state is terminal");
  if (verdict != Verdict::unsat)
    throw RuleNotApplicable("Next: current problem is not UNSAT");
  if (state.index >= problem_count)
    throw RuleNotApplicable("Next: already at the last problem");
  ++state.index;
  return state;
}

EngineState rule_success(EngineState state, Verdict verdict) {
  if (state.terminal)
    throw RuleNotApplicable("Success: state is terminal");
  if (verdict != Verdict::sat)
    throw RuleNotApplicable("Success: current problem is not SAT");
  state.terminal = Terminal::success;
  return state;
}

EngineState rule_failure(EngineState state, std::size_t problem_count,
                         Verdict verdict) {
  if (state.terminal)
    throw RuleNotApplicable("Failure: state is terminal");
  if (verdict != Verdict::unsat)
    throw RuleNotApplicable("Failure: current problem is not UNSAT");
  if (state.index != problem_count)
    throw RuleNotApplicable("Failure: not at the last problem");
  state.terminal = Terminal::failure;
  return state;
}

bool should_learn(const EngineState &state, const EpochPolicy &policy,
                  double t_current) {
  if (!(policy.learning_budget > 0.0))
    return false;
  return state.learning_time_spent +
             static_cast<double>(policy.samples_per_epoch) * t_current <=
         policy.learning_budget;
}

std::size_t rule_application_ceiling(std::size_t problem_count,
                                     std::size_t epochs,
                                     std::size_t samples_per_epoch) {
  return problem_count + epochs * (samples_per_epoch + 1) + problem_count;
}

Engine::Engine(const StrategySpace &space, Backend &backend,
               EngineConfig config)
    : space_(space), backend_(backend), config_(std::move(config)) {
  config_.policy.validate();
  config_.collect_sampler.validate();
  config_.strategize_sampler.validate();
  config_.cost.validate();
  if (config_.learner.trees < 1)
    throw std::invalid_argument("need at least one tree");
  if (config_.learner.init_depth < 1)
    throw std::invalid_argument("initial tree depth must be >= 1");
  if (config_.time_limit && !(*config_.time_limit >= 0.0))
    throw std::invalid_argument("time limit must be >= 0");
  if (!(config_.baseline_floor > 0.0))
    throw std::invalid_argument("baseline floor must be positive");
  if (config_.initial_strategy && !space_.contains(*config_.initial_strategy))
    throw std::invalid_argument("initial strategy is not in the space");
  if (backend_.problem_count() < 1)
    throw std::invalid_argument("backend offers no problems");
}

EngineState Engine::initial_state() const {
  EngineState s;
  s.index = 1;
  s.strategy = config_.initial_strategy.value_or(space_.default_strategy());
  s.dataset = Dataset(space_.parameter_count() + 1);
  return s;
}

double Engine::remaining() const {
  if (!config_.time_limit)
    return std::numeric_limits<double>::infinity();
  return *config_.time_limit - trajectory_.cumulative_time();
}

void Engine::record(Event e) { trajectory_.record(std::move(e)); }

SolveOutcome Engine::solve_current(EngineState &state) {
  const double left = remaining();
  if (left <= 0.0)
    throw TimeLimitReached{};
  std::optional<double> budget;
  if (config_.time_limit && config_.clock == ClockMode::virtual_clock)
    budget = left;

  SolveOutcome out;
  try {
    out = backend_.evaluate(state.index, state.strategy, budget);
  } catch (...) {
    std::throw_with_nested(EngineError("solving problem " +
                                       std::to_string(state.index) +
                                       " failed"));
  }

  Event e;
  e.phase = Phase::solve;
  e.index = state.index;
  e.strategy = space_.render(state.strategy);
  e.raw_metric = out.metric;
  e.virtual_time = config_.clock == ClockMode::wall_clock && out.wall_time
                       ? *out.wall_time
                       : charged_effort(out, budget);
  if (e.virtual_time > left) {
    e.virtual_time = left;
    out.verdict = Verdict::aborted;
  }
  if (out.verdict == Verdict::aborted && !config_.time_limit)
    throw EngineError("backend aborted problem " + std::to_string(state.index) +
                      " without a budget");
  e.verdict = out.verdict;
  e.aborted = out.verdict == Verdict::aborted;
  record(std::move(e));
  return out;
}

RandomForest Engine::train(const Dataset &data, std::size_t epoch) const {
  const auto &lc = config_.learner;
  const auto seed = derive_seed(config_.seed, "forest", epoch);
  if (lc.fixed_depth)
    return fit_forest(data, lc.trees, *lc.fixed_depth, seed, lc.bootstrap);
  AdaptiveDepthOptions opt;
  opt.trees = lc.trees;
  opt.init_depth = lc.init_depth;
  opt.score_threshold = lc.score_threshold;
  opt.depth_cap = std::max(lc.init_depth, lc.depth_cap.value_or(data.width()));
  opt.seed = seed;
  opt.bootstrap = lc.bootstrap;
  return fit_adaptive(data, opt);
}

bool Engine::learning_epoch(EngineState &state, double t_current) {
  if (state.terminal)
    throw RuleNotApplicable("learning epoch on a terminal state");
  if (!should_learn(state, config_.policy, t_current)) {
    log_.push_back("epoch refused at problem " + std::to_string(state.index) +
                   ": learning time " +
                   std::to_string(state.learning_time_spent) + " + " +
                   std::to_string(config_.policy.samples_per_epoch) + " x " +
                   std::to_string(t_current) + " exceeds budget " +
                   std::to_string(config_.policy.learning_budget));
    return false;
  }

  const std::size_t epoch = state.epochs;
  std::size_t index = state.index;
  if (config_.revisit_past_indices && state.baselines.size() > 1) {
    auto rng = make_rng(config_.seed, "collect-index", epoch);
    auto it = state.baselines.begin();
    std::advance(it, static_cast<long>(
                         uniform_index(rng, state.baselines.size())));
    index = it->first;
  }
  const auto base_it = state.baselines.find(index);
  if (base_it == state.baselines.end())
    throw RuleNotApplicable("Collect: problem " + std::to_string(index) +
                            " has no baseline yet");
  const double baseline = base_it->second;

  // Repeat visits reuse the first measurement: no solver call, no time.
  std::unordered_map<Strategy, double, StrategyHash> memo;
  auto cost_fn = [&](const Strategy &v) -> double {
    if (auto it = memo.find(v); it != memo.end())
      return it->second;
    if (remaining() <= 0.0)
      throw TimeLimitReached{};
    const auto rec = collect_cost(backend_, index, v, baseline, config_.cost);
    Event e;
    e.phase = Phase::collect;
    e.index = index;
    e.strategy = space_.render(v);
    e.verdict = rec.aborted ? Verdict::aborted : Verdict::unsat;
    e.raw_metric = rec.raw_metric;
    e.cost = rec.cost;
    e.aborted = rec.aborted;
    e.virtual_time = config_.clock == ClockMode::wall_clock && rec.wall_time
                         ? *rec.wall_time
                         : rec.effort;
    const bool over = e.virtual_time > remaining();
    if (over)
      e.virtual_time = remaining();
    state.learning_time_spent += e.virtual_time;
    record(std::move(e));
    if (over)
      throw TimeLimitReached{};
    memo.emplace(v, rec.cost);
    return rec.cost;
  };

  auto sampler = config_.collect_sampler;
  sampler.seed = derive_seed(config_.seed, "collect", epoch);
  auto observer = [&](const ChainRecord &r) {
    state.dataset.add({space_.encode_features(r.strategy, index), r.cost});
    ++rule_applications_;
  };
  try {
    run_chain(space_, cost_fn, state.strategy,
              config_.policy.samples_per_epoch, sampler, observer);
  } catch (const ChainError &e) {
    try {
      std::rethrow_if_nested(e);
    } catch (const TimeLimitReached &) {
      throw;
    } catch (...) {
      std::throw_with_nested(EngineError(
          "collect on problem " + std::to_string(index) + " failed: " +
          e.what()));
    }
    throw;
  }

  const auto t0 = std::chrono::steady_clock::now();
  state.oracle = train(state.dataset, epoch);
  const double train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ++state.epochs;
  ++rule_applications_;

  Event e;
  e.phase = Phase::train;
  e.index = index;
  e.strategy = space_.render(state.strategy);
  e.training_score = state.oracle->training_score();
  e.trained_depth = state.oracle->trained_depth();
  e.virtual_time =
      config_.clock == ClockMode::wall_clock ? train_seconds : 0.0;
  state.learning_time_spent += e.virtual_time;
  record(std::move(e));
  return true;
}

EngineState Engine::rule_strategize(EngineState state) {
  if (!state.oracle)
    throw RuleNotApplicable("Strategize: oracle has not been trained");
  const auto t0 = std::chrono::steady_clock::now();
  const auto &oracle = *state.oracle;
  const std::size_t index = state.index;
  auto predicted = [&](const Strategy &v) {
    return oracle.predict(space_.encode_features(v, index));
  };
  auto sampler = config_.strategize_sampler;
  sampler.seed = derive_seed(config_.seed, "strategize", index);
  const auto chain = run_chain(space_, predicted, state.strategy,
                               config_.policy.strategize_samples, sampler);
  // Earliest occurrence wins ties; chain[0] is the current strategy.
  std::size_t best = 0;
  for (std::size_t j = 1; j < chain.size(); ++j)
    if (chain[j].cost < chain[best].cost)
      best = j;
  state.strategy = chain[best].strategy;
  ++rule_applications_;

  Event e;
  e.phase = Phase::strategize;
  e.index = index;
  e.strategy = space_.render(state.strategy);
  e.cost = chain[best].cost;
  e.virtual_time =
      config_.clock == ClockMode::wall_clock
          ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count()
          : 0.0;
  state.learning_time_spent += e.virtual_time;
  record(std::move(e));
  return state;
}

RunResult Engine::run() {
  trajectory_ = {};
  log_.clear();
  rule_applications_ = 0;

  const std::size_t n = backend_.problem_count();
  EngineState state = initial_state();
  RunResult result;
  result.problem_count = n;

  try {
    while (true) {
      const auto out = solve_current(state);
      if (out.verdict == Verdict::aborted) {
        result.outcome = Outcome::time_limit;
        break;
      }
      result.largest_solved_index = state.index;
      ++rule_applications_;
      if (out.verdict == Verdict::sat) {
        state = rule_success(std::move(state), out.verdict);
        result.outcome = Outcome::success;
        break;
      }
      if (state.index == n) {
        state = rule_failure(std::move(state), n, out.verdict);
        result.outcome = Outcome::failure;
        break;
      }
      const double t_current = std::max(out.metric, config_.baseline_floor);
      state.baselines[state.index] = t_current;
      learning_epoch(state, t_current);

      state = rule_next(std::move(state), n, out.verdict);
      if (state.oracle)
        state = rule_strategize(std::move(state));
    }
  } catch (const TimeLimitReached &) {
    result.outcome = Outcome::time_limit;
    log_.push_back("time limit reached at problem " +
                   std::to_string(state.index));
  }

  result.trajectory = trajectory_;
  result.state = std::move(state);
  result.rule_applications = rule_applications_;
  result.log = log_;
  return result;
}

} // namespace stratlearn

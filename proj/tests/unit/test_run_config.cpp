#include "stratlearn/report.hpp"
#include "stratlearn/run_config.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stratlearn;

namespace {

const std::string dev_space = STRATLEARN_SOURCE_DIR "/data/spaces/kissat_dev.csv";
const std::string calibration =
    STRATLEARN_SOURCE_DIR "/data/landscapes/calibration.landscape";

RunConfig landscape_run(std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"--space", dev_space, "--landscape",
                                calibration};
  args.insert(args.end(), extra.begin(), extra.end());
  return parse_args(args);
}

Event ev(Phase p, std::size_t index, double t, std::optional<Verdict> v = {}) {
  Event e;
  e.phase = p;
  e.index = index;
  e.virtual_time = t;
  e.verdict = v;
  return e;
}

std::filesystem::path temp_path(const std::string &name) {
  return std::filesystem::temp_directory_path() /
         ("stratlearn_test_" + std::to_string(::getpid()) + "_" + name);
}

} // namespace

TEST_CASE("defaults") {
  const auto c = landscape_run();
  CHECK(c.budget_fraction == 0.15);
  CHECK(c.samples_per_epoch == 100);
  CHECK(c.strategize_samples == 500);
  CHECK(c.trees == 50);
  CHECK(c.seed == 0);
  CHECK_FALSE(c.init_depth);
  CHECK(default_init_depth(StrategySpace::load(dev_space)) == 3);
  CHECK(default_init_depth(StrategySpace::load(
            STRATLEARN_SOURCE_DIR "/data/spaces/kissat_exp.csv")) == 5);
}

TEST_CASE("flag handling") {
  CHECK(landscape_run({"--no-learn"}).budget_fraction == 0.0);
  CHECK_THROWS_AS(landscape_run({"--budget-frac", "1.5"}), UsageError);
  CHECK_THROWS_AS(landscape_run({"--frobnicate"}), UsageError);
  CHECK_THROWS_AS(landscape_run({"--abort-multiplier", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"--landscape", calibration}), UsageError);
  CHECK_THROWS_AS(parse_args({"--space", dev_space}), UsageError);
  CHECK_THROWS_AS(parse_args({"--space", dev_space, "--manifest", "m"}),
                  UsageError);
  CHECK_THROWS_AS(parse_args({"--space", dev_space, "--landscape", calibration,
                              "--manifest", "m", "--adapter", "a"}),
                  UsageError);
}

TEST_CASE("render_args inverts parse_args") {
  const auto c = landscape_run({"--budget-frac", "0.2", "--seed", "7",
                                "--time-limit", "1000", "--fixed-depth", "4",
                                "--beta", "0.5", "--step", "10",
                                "--virtual-clock", "--out", "t.jsonl"});
  CHECK(parse_args(render_args(c)) == c);
  const auto d = landscape_run({"--no-learn", "--trees", "9"});
  CHECK(parse_args(render_args(d)) == d);
}

TEST_CASE("learning budget resolution") {
  const auto space = StrategySpace::load(dev_space);
  CHECK(make_engine_config(landscape_run({"--time-limit", "1000"}), space)
            .policy.learning_budget == doctest::Approx(150));
  CHECK(make_engine_config(landscape_run({"--budget-seconds", "40",
                                          "--time-limit", "1000"}),
                           space)
            .policy.learning_budget == 40);
  CHECK(make_engine_config(landscape_run({"--no-learn"}), space)
            .policy.learning_budget == 0);
  CHECK_THROWS_AS(make_engine_config(landscape_run(), space), UsageError);
  const auto e = make_engine_config(landscape_run({"--no-learn"}), space);
  CHECK(e.learner.init_depth == 3);
  CHECK(e.clock == ClockMode::virtual_clock);
}

TEST_CASE("summary arithmetic") {
  Trajectory t;
  t.record(ev(Phase::solve, 1, 10, Verdict::unsat));
  t.record(ev(Phase::collect, 1, 5, Verdict::unsat));
  t.record(ev(Phase::train, 1, 0));
  t.record(ev(Phase::strategize, 2, 0));
  t.record(ev(Phase::solve, 2, 7, Verdict::unsat));
  t.record(ev(Phase::solve, 3, 3, Verdict::sat));
  const auto s = summarize(t.events(), 5);
  CHECK(s.outcome == Outcome::success);
  CHECK(s.largest_solved_index == 3);
  CHECK(s.epochs == 1);
  CHECK(s.learning_time == 5);
  CHECK(s.solving_time == 20);
  CHECK(s.total_time == 25);
  CHECK(s.time_to_index == std::map<std::size_t, double>{{1, 10}, {2, 22},
                                                          {3, 25}});

  const auto empty = summarize({}, 3);
  CHECK_FALSE(empty.outcome);
  CHECK_FALSE(empty.largest_solved_index);
  CHECK(empty.total_time == 0);
}

TEST_CASE("trajectory files replay") {
  auto c = landscape_run({"--budget-seconds", "600000", "--seed", "2"});
  c.out_path = temp_path("replay.jsonl").string();
  const auto r = run_once(c);
  const auto f = read_trajectory(std::filesystem::path(*c.out_path));
  CHECK(f.header.problems == 40);
  CHECK(f.header.metadata.at("seed") == "2");
  CHECK(f.events == r.result.trajectory.events());
  REQUIRE(f.summary);
  CHECK(*f.summary == r.summary);
  CHECK(summarize(f.events, 40) == r.summary);

  std::stringstream ss;
  emit_trajectory({}, f.header, ss);
  const auto g = read_trajectory(ss);
  CHECK(g.events.empty());
  CHECK(g.header == f.header);
  std::filesystem::remove(*c.out_path);

  std::istringstream bad("{\"format\":\"other\"}\n");
  CHECK_THROWS(read_trajectory(bad));
}

TEST_CASE("ablation grid") {
  auto c = landscape_run({"--time-limit", "1500000"});
  const auto one = ablation_grid(c, {500000}, {3});
  auto single = c;
  single.budget_seconds = 500000;
  single.fixed_depth = 3;
  CHECK(one.values[0][0] ==
        double(run_once(single).summary.largest_solved_index.value_or(0)));

  const auto g = ablation_grid(c, {0, 500000}, {1, 4}, 1, 4);
  CHECK(g.values[0][0] == g.values[0][1]);
  auto base = c;
  base.no_learn = true;
  CHECK(g.values[0][0] ==
        double(run_once(base).summary.largest_solved_index.value_or(0)));

  std::ostringstream out;
  write_grid(g, out);
  CHECK(out.str().rfind("budget\tdepth=1\tdepth=4\n", 0) == 0);

  auto broken = c;
  broken.space_path = "/no/such/space.csv";
  const auto e = ablation_grid(broken, {0}, {1});
  CHECK(std::isnan(e.values[0][0]));
  CHECK_FALSE(e.errors[0][0].empty());
}

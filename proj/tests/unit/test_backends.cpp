#include "stratlearn/external.hpp"
#include "stratlearn/manifest.hpp"
#include "stratlearn/synthetic.hpp"

#include "../support/stub_backend.hpp"

#include <doctest.h>

#include <filesystem>

using namespace stratlearn;
using stratlearn::testing::binary_space;

namespace {

const std::filesystem::path fixtures = STRATLEARN_SOURCE_DIR "/tests/fixtures";

SyntheticLandscape two_param_landscape() {
  SyntheticLandscape l;
  l.hidden_optimum = Strategy({0, 0});
  l.base_metric = {100, 200};
  l.weights = {0.5, 0.25};
  l.verdicts = {Verdict::unsat, Verdict::sat};
  return l;
}

SolverAdapterConfig stub_config() {
  return load_adapter_config(STRATLEARN_STUB_CONF);
}

StrategySpace stub_space() { return StrategySpace::load(fixtures / "space.csv"); }

} // namespace

TEST_CASE("verdict names") {
  for (auto v : {Verdict::sat, Verdict::unsat, Verdict::aborted})
    CHECK(parse_verdict(to_string(v)) == v);
  CHECK_FALSE(parse_verdict("maybe"));
}

TEST_CASE("charged effort caps aborted runs at the budget") {
  CHECK(charged_effort({Verdict::unsat, 50, {}}, 100.0) == 50);
  CHECK(charged_effort({Verdict::aborted, 150, {}}, 100.0) == 100);
  CHECK(charged_effort({Verdict::aborted, 150, {}}, std::nullopt) == 150);
}

TEST_CASE("synthetic metric") {
  const auto space = binary_space(2);
  const auto l = two_param_landscape();
  l.validate(space);
  CHECK(l.metric(1, Strategy({0, 0})) == 100);
  CHECK(l.metric(1, Strategy({1, 0})) == 150);
  CHECK(l.metric(2, Strategy({1, 1})) == 350);

  auto o = evaluate_synthetic(l, 1, Strategy({1, 0}), std::nullopt);
  CHECK(o.verdict == Verdict::unsat);
  CHECK(o.metric == 150);
  o = evaluate_synthetic(l, 1, Strategy({1, 0}), 120.0);
  CHECK(o.verdict == Verdict::aborted);
  CHECK(o.metric == 150);
  CHECK(evaluate_synthetic(l, 2, Strategy({0, 0}), 200.0).verdict ==
        Verdict::sat);
  CHECK_THROWS(evaluate_synthetic(l, 3, Strategy({0, 0}), std::nullopt));
  CHECK_THROWS(evaluate_synthetic(l, 0, Strategy({0, 0}), std::nullopt));
}

TEST_CASE("landscape description") {
  const auto space = binary_space(3);
  const auto l = parse_landscape("problems = 4\n"
                                 "sat_index = 3\n"
                                 "base_metric = 10\n"
                                 "growth = 2\n"
                                 "optimum = p1=1\n"
                                 "weights = p0=1.5\n"
                                 "drift = 3:p2=1\n",
                                 space);
  CHECK(l.problem_count() == 4);
  CHECK(l.verdicts[2] == Verdict::sat);
  CHECK(l.verdicts[3] == Verdict::unsat);
  CHECK(l.base_metric == std::vector<double>{10, 20, 40, 80});
  CHECK(l.weights == std::vector<double>{1.5, 0.5, 0.5});
  CHECK(l.optimum_at(1) == Strategy({0, 1, 0}));
  CHECK(l.optimum_at(3) == Strategy({0, 1, 1}));
  CHECK(l.metric(1, Strategy({1, 0, 0})) == 10 * (1 + 1.5 + 0.5));

  CHECK_THROWS(parse_landscape("problems = 2\ncolour = red\n", space));
  CHECK_THROWS(parse_landscape("verdicts = UUX\nbase_metric = 1\n", space));
}

TEST_CASE("calibration landscape optimum costs 1 against itself") {
  const auto space = StrategySpace::load(STRATLEARN_SOURCE_DIR
                                         "/data/spaces/kissat_dev.csv");
  const auto l = load_landscape(STRATLEARN_SOURCE_DIR
                                "/data/landscapes/calibration.landscape",
                                space);
  CHECK(l.metric(5, l.optimum_at(5)) == l.base_metric[4]);
  CHECK(l.metric(1, space.default_strategy()) ==
        doctest::Approx(4.4 * l.base_metric[0]));
}

TEST_CASE("manifest parsing") {
  const auto m = parse_manifest("1\ta.btor\n2\tb.btor\n3\tc.btor\n");
  REQUIRE(m.size() == 3);
  for (std::size_t i = 1; i <= 3; ++i)
    CHECK(m.at(i).index == i);
  CHECK_THROWS(m.at(4));

  try {
    parse_manifest("1\ta\n3\tc\n");
    FAIL("expected an error");
  } catch (const std::exception &e) {
    CHECK(std::string(e.what()).find("non-contiguous indices") !=
          std::string::npos);
  }
  CHECK_THROWS(parse_manifest("1\n"));
  CHECK_THROWS(parse_manifest("# nothing\n"));
}

TEST_CASE("manifest metadata round-trips") {
  const auto m = parse_manifest("1\tp10\tbound=10,step=10\n"
                                "2\tp20\tbound=20,step=10\n"
                                "3\tp30\tbound=30,step=10\n");
  for (std::size_t i = 1; i <= 3; ++i) {
    CHECK(m.at(i).bound() == 10 * static_cast<long long>(i));
    CHECK(m.at(i).step() == 10);
  }
  const auto again = parse_manifest(serialize_manifest(m));
  REQUIRE(again.size() == 3);
  for (std::size_t i = 1; i <= 3; ++i) {
    CHECK(again.at(i).locator == m.at(i).locator);
    CHECK(again.at(i).metadata == m.at(i).metadata);
  }
}

TEST_CASE("relative locators resolve against the manifest directory") {
  const auto m = load_manifest(fixtures / "bmc.manifest");
  CHECK(m.size() == 6);
  CHECK(std::filesystem::exists(m.at(1).locator));
}

TEST_CASE("external stub: exit codes and metric") {
  const auto cfg = stub_config();
  const auto space = stub_space();
  const auto v = space.default_strategy();
  auto o = evaluate_external(cfg, space, (fixtures / "problems/sat42.txt").string(),
                             v, std::nullopt);
  CHECK(o.verdict == Verdict::sat);
  CHECK(o.metric == 42);
  CHECK(o.wall_time.has_value());

  o = evaluate_external(cfg, space, (fixtures / "problems/unsat0.txt").string(),
                        v, std::nullopt);
  CHECK(o.verdict == Verdict::unsat);
  CHECK(o.metric == 0);

  try {
    evaluate_external(cfg, space, (fixtures / "problems/crash.txt").string(), v,
                      std::nullopt);
    FAIL("expected an exit code error");
  } catch (const ExitCodeError &e) {
    CHECK(e.code() == 1);
    CHECK(std::string(e.what()) == "unexpected exit code 1");
  }
}

TEST_CASE("external stub: budgets and parameters") {
  const auto cfg = stub_config();
  const auto space = stub_space();
  const auto p = (fixtures / "problems/bmc2.txt").string();
  const auto both_off = space.from_assignments("alpha=0,beta=0");

  auto o = evaluate_external(cfg, space, p, both_off, std::nullopt);
  CHECK(o.verdict == Verdict::unsat);
  CHECK(o.metric == 400);
  o = evaluate_external(cfg, space, p, both_off, 250.0);
  CHECK(o.verdict == Verdict::aborted);
  CHECK(o.metric == 250);
  o = evaluate_external(cfg, space, p, space.default_strategy(), 250.0);
  CHECK(o.verdict == Verdict::unsat);
  CHECK(o.metric == 200);

  // Without the budget flag the limit is applied after the fact.
  auto plain = cfg;
  plain.metric_budget_flag.reset();
  o = evaluate_external(plain, space, p, both_off, 250.0);
  CHECK(o.verdict == Verdict::aborted);
  CHECK(o.metric == 400);

  for (int rep = 0; rep < 3; ++rep)
    CHECK(evaluate_external(cfg, space, p, both_off, std::nullopt).metric ==
          400);
}

TEST_CASE("external adapter failures") {
  const auto space = stub_space();
  auto cfg = stub_config();
  cfg.metric_pattern = "^c\\s+decisions:\\s+([0-9]+)";
  CHECK_THROWS_AS(evaluate_external(cfg, space,
                                    (fixtures / "problems/sat42.txt").string(),
                                    space.default_strategy(), std::nullopt),
                  MetricParseError);

  cfg = stub_config();
  cfg.command_template = "/no/such/solver {problem} {alpha} {beta}";
  CHECK_THROWS_AS(evaluate_external(cfg, space, "x", space.default_strategy(),
                                    std::nullopt),
                  LaunchError);

  cfg = stub_config();
  cfg.command_template = "sleep 5; true {problem} {alpha} {beta}";
  cfg.timeout_seconds = 0.2;
  const auto o =
      evaluate_external(cfg, space, "x", space.default_strategy(), 100.0);
  CHECK(o.verdict == Verdict::aborted);
}

TEST_CASE("adapter config validation") {
  const auto space = stub_space();
  auto cfg = stub_config();
  CHECK_NOTHROW(cfg.validate(space));
  cfg.command_template = "solver {alpha} {beta}";
  CHECK_THROWS(cfg.validate(space));
  cfg.command_template = "solver {problem} {alpha}";
  CHECK_THROWS(cfg.validate(space));
  cfg.command_template = "solver {problem} {alpha} {beta} {gamma}";
  CHECK_THROWS(cfg.validate(space));
  CHECK_THROWS(parse_adapter_config("command = x\nfrobnicate = 1\n"));
  CHECK_THROWS(parse_adapter_config("sat_exit = ten\n"));
}

TEST_CASE("rendered commands quote values") {
  const auto space = StrategySpace::parse("name,default,alternatives\n"
                                          "mode,a b,c\n");
  SolverAdapterConfig cfg;
  cfg.command_template = "solver --mode={mode} {problem}";
  cfg.metric_budget_flag = "--limit={budget}";
  const auto cmd =
      render_command(cfg, space, "it's.cnf", space.default_strategy(), 500.0);
  CHECK(cmd == "solver --mode='a b' 'it'\\''s.cnf' --limit=500");
}

TEST_CASE("external backend runs manifest entries") {
  const auto space = stub_space();
  ExternalBackend backend(stub_config(), load_manifest(fixtures / "bmc.manifest"),
                          space);
  CHECK(backend.problem_count() == 6);
  CHECK(backend.evaluate(6, space.default_strategy(), std::nullopt).verdict ==
        Verdict::sat);
  CHECK(backend.evaluate(3, space.default_strategy(), std::nullopt).metric ==
        300);
}

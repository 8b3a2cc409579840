#include "stratlearn/sampler.hpp"

#include "../support/stub_backend.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

using namespace stratlearn;
using stratlearn::testing::binary_space;

TEST_CASE("acceptance probability examples") {
  CHECK(acceptance_probability(5.0, 5.0, 1.0) == 1.0);
  CHECK(acceptance_probability(1.0, 2.0, 1.0) ==
        doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(acceptance_probability(2.0, 4.0, 0.5) ==
        doctest::Approx(std::exp(-1.0)));
  CHECK(acceptance_probability(3.0, 1.0, 2.0) == 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS(acceptance_probability(inf, 1.0, 1.0));
  CHECK_THROWS(acceptance_probability(1.0, std::nan(""), 1.0));
  CHECK_THROWS(acceptance_probability(1.0, 2.0, 0.0));
}

TEST_CASE("acceptance is monotone in the new cost and in beta") {
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const double c = uniform_unit(rng) * 10;
    const double a = c + uniform_unit(rng) * 5;
    const double b = a + uniform_unit(rng) * 5;
    const double beta = 0.1 + uniform_unit(rng) * 3;
    CHECK(acceptance_probability(c, a, beta) >=
          acceptance_probability(c, b, beta));
    CHECK(acceptance_probability(c, a, beta) >=
          acceptance_probability(c, a, beta * 2));
  }
}

TEST_CASE("propose on a single binary domain") {
  const auto s = binary_space(1);
  Rng rng(1);
  for (int t = 0; t < 20; ++t)
    CHECK(propose(s, s.default_strategy(), rng)[0] == 1);
}

TEST_CASE("propose is uniform over radius-1 neighbors") {
  const auto dev = StrategySpace::load(STRATLEARN_SOURCE_DIR
                                       "/data/spaces/kissat_dev.csv");
  const auto start = dev.default_strategy();
  const auto nbrs = dev.neighbors(start, 1);
  REQUIRE(nbrs.size() == 9);
  std::map<Strategy, int> freq;
  Rng rng(42);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t)
    ++freq[propose(dev, start, rng)];
  CHECK(freq.size() == 9);
  for (const auto &w : nbrs)
    CHECK(std::abs(freq[w] / double(draws) - 1.0 / 9) < 0.01);
}

TEST_CASE("chain basics") {
  const auto s = binary_space(1);
  auto cost = [](const Strategy &v) { return v[0] == 0 ? 10.0 : 0.0; };
  SamplerConfig cfg;
  const auto chain = run_chain(s, cost, s.default_strategy(), 2, cfg);
  REQUIRE(chain.size() == 2);
  CHECK(chain[0].strategy == s.default_strategy());
  CHECK(chain[0].cost == 10.0);
  CHECK(chain[1].accepted);
  CHECK(chain[1].strategy[0] == 1);
}

TEST_CASE("constant cost accepts every proposal") {
  const auto s = binary_space(3);
  auto cost = [](const Strategy &) { return 1.0; };
  const auto chain = run_chain(s, cost, s.default_strategy(), 200, {});
  for (std::size_t i = 1; i < chain.size(); ++i) {
    CHECK(chain[i].accepted);
    CHECK(hamming_distance(chain[i - 1].strategy, chain[i].strategy) == 1);
  }
}

TEST_CASE("chain is deterministic and moves by one parameter") {
  const auto s = binary_space(4);
  auto cost = [](const Strategy &v) {
    double c = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      c += (j + 1) * v[j];
    return c;
  };
  SamplerConfig cfg;
  cfg.seed = 11;
  const auto a = run_chain(s, cost, s.default_strategy(), 500, cfg);
  const auto b = run_chain(s, cost, s.default_strategy(), 500, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].strategy == b[i].strategy);
    CHECK(a[i].accepted == b[i].accepted);
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto d = hamming_distance(a[i - 1].strategy, a[i].strategy);
    CHECK((d == 0 || d == 1));
    if (!a[i].accepted)
      CHECK(d == 0);
  }
}

TEST_CASE("observer sees every record and cost errors are wrapped") {
  const auto s = binary_space(2);
  std::size_t seen = 0;
  run_chain(
      s, [](const Strategy &) { return 1.0; }, s.default_strategy(), 25, {},
      [&](const ChainRecord &) { ++seen; });
  CHECK(seen == 25);

  int calls = 0;
  auto failing = [&](const Strategy &) -> double {
    if (++calls == 3)
      throw std::runtime_error("boom");
    return 1.0;
  };
  CHECK_THROWS_AS(run_chain(s, failing, s.default_strategy(), 10, {}),
                  ChainError);
}

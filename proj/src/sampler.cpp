#include "stratlearn/sampler.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace stratlearn {

void SamplerConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("sampler beta must be positive and finite");
  if (k_diff == 0)
    throw std::invalid_argument("sampler neighbor radius must be at least 1");
}

double acceptance_probability(double cost, double cost_new, double beta) {
  if (!std::isfinite(cost) || !std::isfinite(cost_new))
    throw std::invalid_argument("acceptance_probability: non-finite cost");
  if (!(beta > 0.0))
    throw std::invalid_argument("acceptance_probability: beta must be > 0");
  if (cost_new <= cost)
    return 1.0;
  return std::exp(beta * (cost - cost_new));
}

Strategy propose(const StrategySpace &space, const Strategy &current, Rng &rng,
                 std::size_t k_diff) {
  if (k_diff != 1) {
    const auto all = space.neighbors(current, k_diff);
    return all[uniform_index(rng, all.size())];
  }
  // Radius one: pick among sum_j (|domain_j| - 1) moves without
  // materializing them; same order as neighbors().
  if (!space.contains(current))
    throw std::invalid_argument("propose: strategy is not in the space");
  std::size_t r = uniform_index(rng, space.radius_one_count());
  const auto &domains = space.domains();
  for (std::size_t j = 0; j < domains.size(); ++j) {
    const std::size_t moves = domains[j].cardinality() - 1;
    if (r < moves) {
      auto code = static_cast<std::uint32_t>(r);
      if (code >= current[j])
        ++code;
      return current.with(j, code);
    }
    r -= moves;
  }
  throw std::logic_error("propose: neighbor index out of range");
}

namespace {

double evaluate(const StrategySpace &space, const CostFunction &cost_fn,
                const Strategy &v) {
  double c;
  try {
    c = cost_fn(v);
  } catch (...) {
    std::string what = "cost evaluation failed";
    try {
      throw;
    } catch (const std::exception &e) {
      what += ": ";
      what += e.what();
    } catch (...) {
    }
    std::throw_with_nested(
        ChainError(what + " (strategy " + space.render(v) + ")", v));
  }
  if (!std::isfinite(c))
    throw ChainError("non-finite cost for strategy " + space.render(v), v);
  return c;
}

} // namespace

std::vector<ChainRecord> run_chain(const StrategySpace &space,
                                   const CostFunction &cost_fn,
                                   const Strategy &start,
                                   std::size_t n_samples,
                                   const SamplerConfig &config,
                                   const ChainObserver &observer) {
  config.validate();
  if (n_samples == 0)
    throw std::invalid_argument("run_chain: n_samples must be at least 1");
  if (!space.contains(start))
    throw std::invalid_argument("run_chain: start is not in the space");

  auto rng = make_rng(config.seed, "mh-chain");
  std::vector<ChainRecord> chain;
  chain.reserve(n_samples);

  Strategy current = start;
  double cost = evaluate(space, cost_fn, current);
  chain.push_back({current, cost, true});
  if (observer)
    observer(chain.back());

  while (chain.size() < n_samples) {
    Strategy proposal = propose(space, current, rng, config.k_diff);
    const double proposal_cost = evaluate(space, cost_fn, proposal);
    bool accept = proposal_cost <= cost;
    if (!accept)
      accept = uniform_unit(rng) <
               acceptance_probability(cost, proposal_cost, config.beta);
    if (accept) {
      current = std::move(proposal);
      cost = proposal_cost;
    }
    chain.push_back({current, cost, accept});
    if (observer)
      observer(chain.back());
  }
  return chain;
}

} // namespace stratlearn

#include "stratlearn/synthetic.hpp"

#include "text_util.hpp"

#include <cmath>

namespace stratlearn {

using detail::split;
using detail::trim;

const Strategy &SyntheticLandscape::optimum_at(std::size_t index) const {
  auto it = drift.upper_bound(index);
  if (it == drift.begin())
    return hidden_optimum;
  return std::prev(it)->second;
}

double SyntheticLandscape::metric(std::size_t index, const Strategy &v) const {
  if (index < 1 || index > problem_count())
    throw BackendError("problem index " + std::to_string(index) +
                       " out of range 1.." + std::to_string(problem_count()));
  const Strategy &opt = optimum_at(index);
  if (v.size() != opt.size())
    throw BackendError("strategy width does not match the landscape");
  double penalty = 1.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (v[j] != opt[j])
      penalty += weights[j];
  return base_metric[index - 1] * penalty;
}

void SyntheticLandscape::validate(const StrategySpace &space) const {
  if (verdicts.empty())
    throw std::invalid_argument("landscape needs at least one problem");
  if (base_metric.size() != verdicts.size())
    throw std::invalid_argument("landscape: base metric schedule length " +
                                std::to_string(base_metric.size()) +
                                " does not match problem count " +
                                std::to_string(verdicts.size()));
  for (double b : base_metric)
    if (!(b > 0.0) || !std::isfinite(b))
      throw std::invalid_argument("landscape: base metric must be positive");
  if (weights.size() != space.parameter_count())
    throw std::invalid_argument("landscape: need one weight per parameter");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("landscape: weights must be nonnegative");
  if (!space.contains(hidden_optimum))
    throw std::invalid_argument("landscape: optimum is not in the space");
  for (const auto &[from, opt] : drift) {
    if (!space.contains(opt))
      throw std::invalid_argument("landscape: drift optimum not in the space");
    if (from < 1)
      throw std::invalid_argument("landscape: drift index must be >= 1");
  }
  for (auto v : verdicts)
    if (v == Verdict::aborted)
      throw std::invalid_argument("landscape: verdicts must be SAT or UNSAT");
}

SyntheticLandscape parse_landscape(std::string_view text,
                                   const StrategySpace &space) {
  std::map<std::string, std::string> kv;
  std::size_t row = 0;
  for (auto line : detail::lines(text)) {
    ++row;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("landscape line " + std::to_string(row) +
                                  ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
      throw std::invalid_argument("landscape line " + std::to_string(row) +
                                  ": duplicate key '" + key + "'");
  }
  auto take = [&](const std::string &key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end())
      return std::nullopt;
    auto v = std::move(it->second);
    kv.erase(it);
    return v;
  };
  auto number = [](const std::string &key, const std::string &s) {
    auto v = detail::parse_double(s);
    if (!v)
      throw std::invalid_argument("landscape: '" + key +
                                  "' is not a number: " + s);
    return *v;
  };

  SyntheticLandscape l;
  const auto problems = take("problems");
  const auto verdicts = take("verdicts");
  if (verdicts) {
    for (char c : *verdicts) {
      if (c == 'S' || c == 's')
        l.verdicts.push_back(Verdict::sat);
      else if (c == 'U' || c == 'u')
        l.verdicts.push_back(Verdict::unsat);
      else
        throw std::invalid_argument("landscape: verdicts use only S and U");
    }
  } else if (problems) {
    const auto n = detail::parse_int(*problems);
    if (!n || *n < 1)
      throw std::invalid_argument("landscape: problems must be >= 1");
    l.verdicts.assign(static_cast<std::size_t>(*n), Verdict::unsat);
  } else {
    throw std::invalid_argument("landscape: need 'problems' or 'verdicts'");
  }
  if (problems && verdicts &&
      detail::parse_int(*problems) != static_cast<long long>(l.verdicts.size()))
    throw std::invalid_argument("landscape: problems and verdicts disagree");
  if (auto sat = take("sat_index")) {
    const auto i = detail::parse_int(*sat);
    if (!i || *i < 0 || *i > static_cast<long long>(l.verdicts.size()))
      throw std::invalid_argument("landscape: sat_index out of range");
    if (*i > 0)
      l.verdicts[static_cast<std::size_t>(*i - 1)] = Verdict::sat;
  }

  const std::size_t n = l.verdicts.size();
  if (auto list = take("base_metrics")) {
    for (auto cell : split(*list, ','))
      l.base_metric.push_back(number("base_metrics", std::string(cell)));
  } else {
    const double base = number("base_metric", take("base_metric").value_or("1"));
    const double growth = number("growth", take("growth").value_or("1"));
    for (std::size_t i = 0; i < n; ++i)
      l.base_metric.push_back(base * std::pow(growth, static_cast<double>(i)));
  }

  l.hidden_optimum = space.from_assignments(take("optimum").value_or(""));

  const double w0 =
      number("default_weight", take("default_weight").value_or("0.5"));
  l.weights.assign(space.parameter_count(), w0);
  if (auto ws = take("weights")) {
    for (auto item : split(*ws, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument("landscape: weights expect name=value");
      const auto j = space.index_of(trim(item.substr(0, eq)));
      if (!j)
        throw std::invalid_argument("landscape: unknown parameter in weights");
      l.weights[*j] = number("weights", std::string(item.substr(eq + 1)));
    }
  }

  if (auto dr = take("drift")) {
    for (auto seg : split(*dr, ';')) {
      seg = trim(seg);
      if (seg.empty())
        continue;
      const auto colon = seg.find(':');
      const auto from = colon == std::string_view::npos
                            ? std::nullopt
                            : detail::parse_int(seg.substr(0, colon));
      if (!from || *from < 1)
        throw std::invalid_argument("landscape: drift expects index:assignments");
      // Drift assignments are relative to the base optimum.
      Strategy opt = l.hidden_optimum;
      const auto delta = space.from_assignments(seg.substr(colon + 1));
      for (auto item : split(seg.substr(colon + 1), ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
          continue;
        if (auto j = space.index_of(trim(item.substr(0, eq))))
          opt = opt.with(*j, delta[*j]);
      }
      l.drift[static_cast<std::size_t>(*from)] = opt;
    }
  }

  if (!kv.empty())
    throw std::invalid_argument("landscape: unknown key '" + kv.begin()->first +
                                "'");
  l.validate(space);
  return l;
}

SyntheticLandscape load_landscape(const std::filesystem::path &path,
                                  const StrategySpace &space) {
  return parse_landscape(detail::read_file(path.string()), space);
}

SolveOutcome evaluate_synthetic(const SyntheticLandscape &landscape,
                                std::size_t index, const Strategy &strategy,
                                std::optional<double> budget) {
  SolveOutcome out;
  out.metric = landscape.metric(index, strategy);
  out.verdict = landscape.verdicts[index - 1];
  if (budget && out.metric > *budget)
    out.verdict = Verdict::aborted;
  return out;
}

} // namespace stratlearn

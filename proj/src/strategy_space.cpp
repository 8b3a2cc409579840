#include "stratlearn/strategy_space.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace stratlearn {

using detail::split;
using detail::trim;

SpaceError::SpaceError(const std::string &msg, std::size_t row)
    : std::runtime_error(row ? "row " + std::to_string(row) + ": " + msg : msg),
      row_(row) {}

const std::string &ParameterDomain::value(std::size_t code) const {
  if (code == 0)
    return default_value;
  if (code > alternatives.size())
    throw std::out_of_range("value code " + std::to_string(code) +
                            " out of range for parameter '" + name + "'");
  return alternatives[code - 1];
}

std::optional<std::uint32_t>
ParameterDomain::code_of(std::string_view v) const {
  if (v == default_value)
    return 0;
  for (std::size_t i = 0; i < alternatives.size(); ++i)
    if (alternatives[i] == v)
      return static_cast<std::uint32_t>(i + 1);
  return std::nullopt;
}

std::size_t StrategyHash::operator()(const Strategy &s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto c : s.codes()) {
    h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::size_t hamming_distance(const Strategy &a, const Strategy &b) {
  std::size_t d = 0;
  for (std::size_t j = 0; j < a.size(); ++j)
    d += a[j] != b[j];
  return d;
}

namespace {

void validate_domain(const ParameterDomain &d, std::size_t row) {
  if (d.name.empty())
    throw SpaceError("empty parameter name", row);
  if (d.alternatives.empty())
    throw SpaceError("parameter '" + d.name + "' has no alternatives", row);
  std::unordered_set<std::string> seen{d.default_value};
  for (const auto &a : d.alternatives) {
    if (a.empty())
      throw SpaceError("parameter '" + d.name + "' has an empty value", row);
    if (!seen.insert(a).second)
      throw SpaceError("value '" + a + "' duplicated in parameter '" + d.name +
                           "'",
                       row);
  }
}

} // namespace

StrategySpace::StrategySpace(std::vector<ParameterDomain> domains)
    : domains_(std::move(domains)) {
  if (domains_.empty())
    throw SpaceError("strategy space needs at least one parameter");
  std::unordered_set<std::string> names;
  for (const auto &d : domains_) {
    validate_domain(d, 0);
    if (!names.insert(d.name).second)
      throw SpaceError("duplicate parameter name '" + d.name + "'");
  }
}

StrategySpace StrategySpace::parse(std::string_view text) {
  std::vector<ParameterDomain> domains;
  std::unordered_set<std::string> names;
  bool header_seen = false;
  std::size_t row = 0;
  for (auto line : detail::lines(text)) {
    ++row;
    line = trim(line);
    if (line.empty() || line.front() == '#')
      continue;
    const auto cells = split(line, ',');
    if (!header_seen) {
      if (cells.size() != 3 || trim(cells[0]) != "name" ||
          trim(cells[1]) != "default" || trim(cells[2]) != "alternatives")
        throw SpaceError("expected header 'name,default,alternatives'", row);
      header_seen = true;
      continue;
    }
    if (cells.size() != 3)
      throw SpaceError("expected 3 cells, found " +
                           std::to_string(cells.size()),
                       row);
    ParameterDomain d;
    d.name = std::string(trim(cells[0]));
    d.default_value = std::string(trim(cells[1]));
    if (d.default_value.empty())
      throw SpaceError("parameter '" + d.name + "' has an empty default", row);
    if (trim(cells[2]).empty())
      throw SpaceError("empty alternatives cell for parameter '" + d.name + "'",
                       row);
    for (auto alt : split(cells[2], ';'))
      d.alternatives.emplace_back(trim(alt));
    validate_domain(d, row);
    if (!names.insert(d.name).second)
      throw SpaceError("duplicate parameter name '" + d.name + "'", row);
    domains.push_back(std::move(d));
  }
  if (!header_seen)
    throw SpaceError("missing header 'name,default,alternatives'");
  return StrategySpace(std::move(domains));
}

StrategySpace StrategySpace::load(const std::filesystem::path &path) {
  return parse(detail::read_file(path.string()));
}

std::string StrategySpace::serialize() const {
  std::ostringstream out;
  out << "name,default,alternatives\n";
  for (const auto &d : domains_) {
    out << d.name << ',' << d.default_value << ',';
    for (std::size_t i = 0; i < d.alternatives.size(); ++i)
      out << (i ? ";" : "") << d.alternatives[i];
    out << '\n';
  }
  return out.str();
}

std::optional<std::size_t> StrategySpace::index_of(std::string_view name) const {
  for (std::size_t j = 0; j < domains_.size(); ++j)
    if (domains_[j].name == name)
      return j;
  return std::nullopt;
}

std::uint64_t StrategySpace::size() const {
  std::uint64_t n = 1;
  for (const auto &d : domains_)
    n *= d.cardinality();
  return n;
}

Strategy StrategySpace::default_strategy() const {
  return Strategy(std::vector<std::uint32_t>(domains_.size(), 0));
}

bool StrategySpace::contains(const Strategy &v) const {
  if (v.size() != domains_.size())
    return false;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (v[j] >= domains_[j].cardinality())
      return false;
  return true;
}

void StrategySpace::check(const Strategy &v) const {
  if (!contains(v))
    throw std::invalid_argument("strategy is not a member of the space");
}

Strategy StrategySpace::from_values(std::span<const std::string> values) const {
  if (values.size() != domains_.size())
    throw std::invalid_argument("expected " + std::to_string(domains_.size()) +
                                " values, got " +
                                std::to_string(values.size()));
  std::vector<std::uint32_t> codes;
  codes.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto code = domains_[j].code_of(values[j]);
    if (!code)
      throw std::invalid_argument("value '" + values[j] +
                                  "' not in domain of '" + domains_[j].name +
                                  "'");
    codes.push_back(*code);
  }
  return Strategy(std::move(codes));
}

Strategy StrategySpace::from_assignments(std::string_view text) const {
  auto v = default_strategy();
  text = trim(text);
  if (text.empty())
    return v;
  for (auto item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("expected name=value, got '" +
                                  std::string(item) + "'");
    const auto name = trim(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    const auto j = index_of(name);
    if (!j)
      throw std::invalid_argument("unknown parameter '" + std::string(name) +
                                  "'");
    const auto code = domains_[*j].code_of(value);
    if (!code)
      throw std::invalid_argument("value '" + std::string(value) +
                                  "' not in domain of '" + std::string(name) +
                                  "'");
    v = v.with(*j, *code);
  }
  return v;
}

std::vector<std::string> StrategySpace::values(const Strategy &v) const {
  check(v);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    out.push_back(domains_[j].value(v[j]));
  return out;
}

std::string StrategySpace::render(const Strategy &v) const {
  check(v);
  std::string out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j)
      out += ',';
    out += domains_[j].name;
    out += '=';
    out += domains_[j].value(v[j]);
  }
  return out;
}

std::vector<Strategy> StrategySpace::neighbors(const Strategy &v,
                                               std::size_t k_diff) const {
  check(v);
  if (k_diff == 0)
    throw std::invalid_argument("neighbor radius must be at least 1");
  if (k_diff > domains_.size())
    throw std::invalid_argument("neighbor radius " + std::to_string(k_diff) +
                                " exceeds parameter count " +
                                std::to_string(domains_.size()));

  std::vector<Strategy> out;
  // Lexicographic walk over k_diff-subsets of domains; for each subset, every
  // combination of non-current values in value-position order.
  std::vector<std::size_t> subset(k_diff);
  std::iota(subset.begin(), subset.end(), 0);
  const std::size_t k = domains_.size();
  while (true) {
    std::vector<std::uint32_t> pick(k_diff, 0);
    auto codes = std::vector<std::uint32_t>(v.codes().begin(), v.codes().end());
    // Odometer over the chosen domains, skipping each domain's current value.
    std::function<void(std::size_t)> fill = [&](std::size_t pos) {
      if (pos == k_diff) {
        out.emplace_back(codes);
        return;
      }
      const std::size_t j = subset[pos];
      for (std::uint32_t c = 0; c < domains_[j].cardinality(); ++c) {
        if (c == v[j])
          continue;
        codes[j] = c;
        fill(pos + 1);
      }
      codes[j] = v[j];
    };
    fill(0);

    std::size_t i = k_diff;
    while (i > 0 && subset[i - 1] == k - k_diff + (i - 1))
      --i;
    if (i == 0)
      break;
    ++subset[i - 1];
    for (std::size_t t = i; t < k_diff; ++t)
      subset[t] = subset[t - 1] + 1;
  }
  return out;
}

std::size_t StrategySpace::radius_one_count() const {
  std::size_t n = 0;
  for (const auto &d : domains_)
    n += d.cardinality() - 1;
  return n;
}

std::vector<double> StrategySpace::encode_features(const Strategy &v,
                                                   std::size_t index) const {
  check(v);
  std::vector<double> f;
  f.reserve(v.size() + 1);
  for (auto c : v.codes())
    f.push_back(static_cast<double>(c));
  f.push_back(static_cast<double>(index));
  return f;
}

std::vector<Strategy> StrategySpace::enumerate(std::uint64_t limit) const {
  if (size() > limit)
    throw std::length_error("strategy space of size " + std::to_string(size()) +
                            " exceeds enumeration limit");
  std::vector<Strategy> out;
  out.reserve(size());
  std::vector<std::uint32_t> codes(domains_.size(), 0);
  while (true) {
    out.emplace_back(codes);
    std::size_t j = 0;
    while (j < codes.size() && ++codes[j] == domains_[j].cardinality()) {
      codes[j] = 0;
      ++j;
    }
    if (j == codes.size())
      break;
  }
  return out;
}

} // namespace stratlearn

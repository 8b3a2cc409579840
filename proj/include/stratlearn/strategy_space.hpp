#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stratlearn {

/// Malformed strategy-space table. row() is the 1-based line number in the
/// source text, or 0 when the error is not tied to a line.
class SpaceError : public std::runtime_error {
public:
  SpaceError(const std::string &msg, std::size_t row = 0);
  std::size_t row() const { return row_; }

private:
  std::size_t row_;
};

/// One solver parameter and its finite set of admissible values. Values are
/// opaque strings; position 0 is the default, followed by the alternatives.
struct ParameterDomain {
  std::string name;
  std::string default_value;
  std::vector<std::string> alternatives;

  std::size_t cardinality() const { return alternatives.size() + 1; }
  const std::string &value(std::size_t code) const;
  std::optional<std::uint32_t> code_of(std::string_view v) const;
};

/// A point in the strategy space: one value code per domain, aligned with
/// StrategySpace::domains(). Code 0 is always the domain default.
class Strategy {
public:
  Strategy() = default;
  explicit Strategy(std::vector<std::uint32_t> codes)
      : codes_(std::move(codes)) {}

  std::span<const std::uint32_t> codes() const { return codes_; }
  std::uint32_t operator[](std::size_t j) const { return codes_[j]; }
  std::size_t size() const { return codes_.size(); }

  Strategy with(std::size_t j, std::uint32_t code) const {
    Strategy s = *this;
    s.codes_[j] = code;
    return s;
  }

  auto operator<=>(const Strategy &) const = default;

private:
  std::vector<std::uint32_t> codes_;
};

struct StrategyHash {
  std::size_t operator()(const Strategy &s) const noexcept;
};

/// Number of positions at which two equally sized strategies differ.
std::size_t hamming_distance(const Strategy &a, const Strategy &b);

/// The cartesian product of k parameter domains. Immutable once built.
class StrategySpace {
public:
  explicit StrategySpace(std::vector<ParameterDomain> domains);

  /// Parses the `name,default,alternatives` table. Alternatives are
  /// `;`-separated; blank lines and `#` comments are skipped.
  static StrategySpace parse(std::string_view text);
  static StrategySpace load(const std::filesystem::path &path);
  std::string serialize() const;

  const std::vector<ParameterDomain> &domains() const { return domains_; }
  std::size_t parameter_count() const { return domains_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Product of the domain cardinalities.
  std::uint64_t size() const;

  Strategy default_strategy() const;
  bool contains(const Strategy &v) const;

  /// Builds a strategy from one value per domain, in domain order.
  Strategy from_values(std::span<const std::string> values) const;
  /// Builds a strategy from `name=value` pairs separated by commas. Domains
  /// not mentioned keep their default.
  Strategy from_assignments(std::string_view text) const;
  std::vector<std::string> values(const Strategy &v) const;
  /// `name=value,...` in domain order.
  std::string render(const Strategy &v) const;

  /// All strategies at Hamming distance exactly k_diff from v, ordered by
  /// domain combination and then by value position.
  std::vector<Strategy> neighbors(const Strategy &v, std::size_t k_diff) const;
  /// Sum over domains of (cardinality - 1).
  std::size_t radius_one_count() const;

  /// Ordinal code of each assignment followed by the raw problem index.
  std::vector<double> encode_features(const Strategy &v,
                                      std::size_t index) const;

  /// Every strategy in mixed-radix order. Throws when size() > limit.
  std::vector<Strategy> enumerate(std::uint64_t limit = 1u << 20) const;

private:
  void check(const Strategy &v) const;

  std::vector<ParameterDomain> domains_;
};

} // namespace stratlearn

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stratlearn {

struct ManifestEntry {
  std::size_t index = 0;
  std::string locator;
  /// Free-form key=value pairs in file order, e.g. bound=20,step=10.
  std::vector<std::pair<std::string, std::string>> metadata;

  std::optional<std::string> get(std::string_view key) const;
  /// BMC unrolling bound k, when recorded.
  std::optional<long long> bound() const;
  /// BMC step size s, when recorded.
  std::optional<long long> step() const;
};

/// Ordered problem list; indices are contiguous from 1.
struct ProblemManifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
  const ManifestEntry &at(std::size_t index) const;
};

/// One entry per line: `index<TAB>locator[<TAB>key=value,...]`. Blank lines
/// and `#` comments are skipped. Relative locators are resolved against
/// base_dir when it is non-empty.
ProblemManifest parse_manifest(std::string_view text,
                               const std::filesystem::path &base_dir = {});
ProblemManifest load_manifest(const std::filesystem::path &path);
std::string serialize_manifest(const ProblemManifest &manifest);

} // namespace stratlearn

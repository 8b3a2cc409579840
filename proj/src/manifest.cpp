#include "stratlearn/manifest.hpp"

#include "text_util.hpp"

#include <sstream>
#include <stdexcept>

namespace stratlearn {

using detail::split;
using detail::trim;

std::optional<std::string> ManifestEntry::get(std::string_view key) const {
  for (const auto &[k, v] : metadata)
    if (k == key)
      return v;
  return std::nullopt;
}

std::optional<long long> ManifestEntry::bound() const {
  auto v = get("bound");
  return v ? detail::parse_int(*v) : std::nullopt;
}

std::optional<long long> ManifestEntry::step() const {
  auto v = get("step");
  return v ? detail::parse_int(*v) : std::nullopt;
}

const ManifestEntry &ProblemManifest::at(std::size_t index) const {
  if (index < 1 || index > entries.size())
    throw std::out_of_range("manifest has no problem " + std::to_string(index));
  return entries[index - 1];
}

ProblemManifest parse_manifest(std::string_view text,
                               const std::filesystem::path &base_dir) {
  ProblemManifest m;
  std::size_t row = 0;
  for (auto raw : detail::lines(text)) {
    ++row;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    const auto where = "manifest line " + std::to_string(row) + ": ";
    const auto cells = split(line, '\t');
    const auto index = detail::parse_int(cells[0]);
    if (!index || *index < 1)
      throw std::invalid_argument(where + "bad index '" +
                                  std::string(cells[0]) + "'");
    if (static_cast<std::size_t>(*index) != m.entries.size() + 1)
      throw std::invalid_argument(where + "non-contiguous indices (expected " +
                                  std::to_string(m.entries.size() + 1) +
                                  ", got " + std::to_string(*index) + ")");
    if (cells.size() < 2 || trim(cells[1]).empty())
      throw std::invalid_argument(where + "missing locator");
    if (cells.size() > 3)
      throw std::invalid_argument(where + "too many fields");

    ManifestEntry e;
    e.index = static_cast<std::size_t>(*index);
    std::filesystem::path loc{std::string(trim(cells[1]))};
    if (!base_dir.empty() && loc.is_relative())
      loc = base_dir / loc;
    e.locator = loc.string();
    if (cells.size() == 3 && !trim(cells[2]).empty()) {
      for (auto item : split(trim(cells[2]), ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || trim(item.substr(0, eq)).empty())
          throw std::invalid_argument(where + "metadata expects key=value");
        e.metadata.emplace_back(std::string(trim(item.substr(0, eq))),
                                std::string(trim(item.substr(eq + 1))));
      }
    }
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty())
    throw std::invalid_argument("manifest lists no problems");
  return m;
}

ProblemManifest load_manifest(const std::filesystem::path &path) {
  return parse_manifest(detail::read_file(path.string()), path.parent_path());
}

std::string serialize_manifest(const ProblemManifest &manifest) {
  std::ostringstream out;
  for (const auto &e : manifest.entries) {
    out << e.index << '\t' << e.locator;
    if (!e.metadata.empty()) {
      out << '\t';
      for (std::size_t i = 0; i < e.metadata.size(); ++i)
        out << (i ? "," : "") << e.metadata[i].first << '='
            << e.metadata[i].second;
    }
    out << '\n';
  }
  return out.str();
}

} // namespace stratlearn

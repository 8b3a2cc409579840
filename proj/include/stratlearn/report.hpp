#pragma once

#include "stratlearn/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stratlearn {

inline constexpr int kTrajectoryFormatVersion = 1;

/// Per-run totals. learning_time covers collect, train and strategize
/// events; time_to_index maps each solved index to the cumulative time
/// (learning included) at which its solve finished.
struct Summary {
  std::optional<Outcome> outcome;
  std::optional<std::size_t> largest_solved_index;
  std::size_t events = 0;
  std::size_t epochs = 0;
  double learning_time = 0.0;
  double solving_time = 0.0;
  double total_time = 0.0;
  std::map<std::size_t, double> time_to_index;

  bool operator==(const Summary &) const = default;
};

/// Outcome is derived from the last solve event; an empty or interrupted
/// trajectory has none.
Summary summarize(const std::vector<Event> &events, std::size_t problem_count);

struct TrajectoryHeader {
  int version = kTrajectoryFormatVersion;
  std::size_t problems = 0;
  std::string metric = "conflicts";
  std::map<std::string, std::string> metadata;

  bool operator==(const TrajectoryHeader &) const = default;
};

struct TrajectoryFile {
  TrajectoryHeader header;
  std::vector<Event> events;
  std::optional<Summary> summary;
};

/// Header line, one line per event, then the summary line. Each line is a
/// JSON object.
Summary emit_trajectory(const std::vector<Event> &events,
                        const TrajectoryHeader &header, std::ostream &out);
Summary emit_trajectory(const std::vector<Event> &events,
                        const TrajectoryHeader &header,
                        const std::filesystem::path &path);

TrajectoryFile read_trajectory(std::istream &in);
TrajectoryFile read_trajectory(const std::filesystem::path &path);

std::string summary_to_json(const Summary &summary);

} // namespace stratlearn

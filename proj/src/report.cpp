#include "stratlearn/report.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace stratlearn {

using nlohmann::json;

Summary summarize(const std::vector<Event> &events,
                  std::size_t problem_count) {
  Summary s;
  s.events = events.size();
  const Event *last_solve = nullptr;
  for (const auto &e : events) {
    switch (e.phase) {
    case Phase::solve:
      s.solving_time += e.virtual_time;
      last_solve = &e;
      if (e.verdict == Verdict::sat || e.verdict == Verdict::unsat) {
        s.largest_solved_index =
            std::max(s.largest_solved_index.value_or(0), e.index);
        s.time_to_index[e.index] = e.cumulative_time;
      }
      break;
    case Phase::train:
      ++s.epochs;
      [[fallthrough]];
    case Phase::collect:
    case Phase::strategize:
      s.learning_time += e.virtual_time;
      break;
    }
  }
  if (!events.empty())
    s.total_time = events.back().cumulative_time;
  if (last_solve) {
    if (last_solve->verdict == Verdict::sat)
      s.outcome = Outcome::success;
    else if (last_solve->verdict == Verdict::aborted)
      s.outcome = Outcome::time_limit;
    else if (last_solve->index == problem_count)
      s.outcome = Outcome::failure;
  }
  return s;
}

namespace {

template <class T> json opt(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

json event_json(const Event &e) {
  return json{
      {"phase", to_string(e.phase)},
      {"index", e.index},
      {"strategy", e.strategy},
      {"verdict", e.verdict ? json(to_string(*e.verdict)) : json(nullptr)},
      {"raw_metric", e.raw_metric},
      {"cost", opt(e.cost)},
      {"virtual_time", e.virtual_time},
      {"cumulative_time", e.cumulative_time},
      {"aborted", e.aborted},
      {"training_score", opt(e.training_score)},
      {"trained_depth", opt(e.trained_depth)},
  };
}

template <class T> std::optional<T> get_opt(const json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null())
    return std::nullopt;
  return j.at(key).get<T>();
}

Event event_from_json(const json &j) {
  Event e;
  const auto phase = parse_phase(j.at("phase").get<std::string>());
  if (!phase)
    throw std::runtime_error("trajectory: unknown phase");
  e.phase = *phase;
  e.index = j.at("index").get<std::size_t>();
  e.strategy = j.at("strategy").get<std::string>();
  if (auto v = get_opt<std::string>(j, "verdict")) {
    e.verdict = parse_verdict(*v);
    if (!e.verdict)
      throw std::runtime_error("trajectory: unknown verdict '" + *v + "'");
  }
  e.raw_metric = j.at("raw_metric").get<double>();
  e.cost = get_opt<double>(j, "cost");
  e.virtual_time = j.at("virtual_time").get<double>();
  e.cumulative_time = j.at("cumulative_time").get<double>();
  e.aborted = j.at("aborted").get<bool>();
  e.training_score = get_opt<double>(j, "training_score");
  e.trained_depth = get_opt<std::size_t>(j, "trained_depth");
  return e;
}

json summary_json(const Summary &s) {
  json by_index = json::object();
  for (const auto &[i, t] : s.time_to_index)
    by_index[std::to_string(i)] = t;
  return json{
      {"outcome", s.outcome ? json(to_string(*s.outcome)) : json(nullptr)},
      {"largest_solved_index", opt(s.largest_solved_index)},
      {"events", s.events},
      {"epochs", s.epochs},
      {"learning_time", s.learning_time},
      {"solving_time", s.solving_time},
      {"total_time", s.total_time},
      {"time_to_index", by_index},
  };
}

Summary summary_from_json(const json &j) {
  Summary s;
  if (auto o = get_opt<std::string>(j, "outcome"))
    s.outcome = parse_outcome(*o);
  s.largest_solved_index = get_opt<std::size_t>(j, "largest_solved_index");
  s.events = j.at("events").get<std::size_t>();
  s.epochs = j.at("epochs").get<std::size_t>();
  s.learning_time = j.at("learning_time").get<double>();
  s.solving_time = j.at("solving_time").get<double>();
  s.total_time = j.at("total_time").get<double>();
  for (const auto &[k, v] : j.at("time_to_index").items())
    s.time_to_index[std::stoul(k)] = v.get<double>();
  return s;
}

} // namespace

std::string summary_to_json(const Summary &summary) {
  return summary_json(summary).dump();
}

Summary emit_trajectory(const std::vector<Event> &events,
                        const TrajectoryHeader &header, std::ostream &out) {
  json h{{"format", "stratlearn-trajectory"},
         {"version", header.version},
         {"problems", header.problems},
         {"metric", header.metric},
         {"metadata", header.metadata}};
  out << h.dump() << '\n';
  for (const auto &e : events)
    out << event_json(e).dump() << '\n';
  const auto s = summarize(events, header.problems);
  out << json{{"summary", summary_json(s)}}.dump() << '\n';
  if (!out)
    throw std::runtime_error("failed writing trajectory");
  return s;
}

Summary emit_trajectory(const std::vector<Event> &events,
                        const TrajectoryHeader &header,
                        const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write trajectory to '" + path.string() +
                             "'");
  return emit_trajectory(events, header, out);
}

TrajectoryFile read_trajectory(std::istream &in) {
  TrajectoryFile f;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("trajectory: missing header line");
  const auto h = json::parse(line);
  if (h.value("format", "") != "stratlearn-trajectory")
    throw std::runtime_error("trajectory: not a trajectory file");
  f.header.version = h.at("version").get<int>();
  if (f.header.version != kTrajectoryFormatVersion)
    throw std::runtime_error("trajectory: unsupported version " +
                             std::to_string(f.header.version));
  f.header.problems = h.at("problems").get<std::size_t>();
  f.header.metric = h.at("metric").get<std::string>();
  f.header.metadata =
      h.at("metadata").get<std::map<std::string, std::string>>();
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto j = json::parse(line);
    if (j.contains("summary"))
      f.summary = summary_from_json(j.at("summary"));
    else
      f.events.push_back(event_from_json(j));
  }
  return f;
}

TrajectoryFile read_trajectory(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open trajectory '" + path.string() + "'");
  return read_trajectory(in);
}

} // namespace stratlearn

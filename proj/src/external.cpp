#include "stratlearn/external.hpp"

#include "text_util.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <regex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace stratlearn {

using detail::trim;

namespace {

// Placeholder names in template order.
std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = tmpl.find('{', pos)) != std::string_view::npos) {
    const auto close = tmpl.find('}', pos);
    if (close == std::string_view::npos)
      throw std::invalid_argument("unbalanced '{' in command template");
    out.emplace_back(tmpl.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return out;
}

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += '\'';
  return out;
}

std::string format_budget(double b) {
  std::ostringstream ss;
  if (b == std::floor(b) && std::abs(b) < 1e15)
    ss << static_cast<long long>(b);
  else
    ss << b;
  return ss.str();
}

std::string substitute(std::string_view tmpl,
                       const std::map<std::string, std::string> &values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      return out;
    }
    const auto close = tmpl.find('}', open);
    out += tmpl.substr(pos, open - pos);
    const std::string key(tmpl.substr(open + 1, close - open - 1));
    auto it = values.find(key);
    if (it == values.end())
      throw std::invalid_argument("unknown placeholder {" + key + "}");
    out += it->second;
    pos = close + 1;
  }
}

struct ProcessResult {
  int exit_code = -1;
  int signal = 0;
  bool timed_out = false;
  std::string output;
  double wall_seconds = 0.0;
};

ProcessResult run_shell(const std::string &command, double timeout_seconds) {
  int fds[2];
  if (pipe(fds) != 0)
    throw LaunchError(std::string("pipe failed: ") + std::strerror(errno));

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw LaunchError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    _exit(127);
  }
  close(fds[1]);

  ProcessResult result;
  char buf[4096];
  bool open = true;
  while (open) {
    int wait_ms = -1;
    if (timeout_seconds > 0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      const double left = timeout_seconds - elapsed;
      if (left <= 0) {
        result.timed_out = true;
        kill(-pid, SIGKILL);
        break;
      }
      wait_ms = static_cast<int>(std::ceil(left * 1000.0));
    }
    pollfd p{fds[0], POLLIN, 0};
    const int r = poll(&p, 1, wait_ms);
    if (r < 0 && errno == EINTR)
      continue;
    if (r == 0)
      continue; // deadline check at top of loop
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n > 0)
      result.output.append(buf, static_cast<std::size_t>(n));
    else if (n == 0 || errno != EINTR)
      open = false;
  }
  close(fds[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR)
      throw LaunchError(std::string("waitpid failed: ") + std::strerror(errno));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.signal = WTERMSIG(status);
  return result;
}

std::optional<double> find_metric(const std::string &output,
                                  const std::string &pattern) {
  const std::regex re(pattern);
  std::optional<double> found;
  for (auto line : detail::lines(output)) {
    std::cmatch m;
    if (!std::regex_search(line.data(), line.data() + line.size(), m, re))
      continue;
    std::string_view text =
        m.size() > 1 && m[1].matched
            ? std::string_view(m[1].first, static_cast<std::size_t>(m[1].length()))
            : std::string_view(m[0].second,
                               static_cast<std::size_t>(line.data() +
                                                        line.size() -
                                                        m[0].second));
    // Tolerate trailing tokens after the number.
    text = trim(text);
    const auto end = text.find_first_of(" \t");
    if (end != std::string_view::npos)
      text = text.substr(0, end);
    if (auto v = detail::parse_double(text))
      found = *v;
  }
  return found;
}

} // namespace

void SolverAdapterConfig::validate(const StrategySpace &space) const {
  if (trim(command_template).empty())
    throw std::invalid_argument("adapter: empty command template");
  std::map<std::string, int> seen;
  for (auto &p : placeholders(command_template))
    ++seen[p];
  if (seen["problem"] != 1)
    throw std::invalid_argument(
        "adapter: command must reference {problem} exactly once");
  for (const auto &d : space.domains()) {
    if (seen[d.name] != 1)
      throw std::invalid_argument("adapter: command must reference {" + d.name +
                                  "} exactly once");
  }
  for (const auto &[name, count] : seen) {
    if (count == 0 || name == "problem")
      continue;
    if (!space.index_of(name))
      throw std::invalid_argument("adapter: unknown placeholder {" + name + "}");
  }
  if (metric_budget_flag) {
    const auto ps = placeholders(*metric_budget_flag);
    if (ps.size() != 1 || ps[0] != "budget")
      throw std::invalid_argument(
          "adapter: budget_flag must contain exactly one {budget}");
  }
  if (sat_exit == unsat_exit)
    throw std::invalid_argument("adapter: SAT and UNSAT exit codes coincide");
  try {
    std::regex re(metric_pattern);
  } catch (const std::regex_error &e) {
    throw std::invalid_argument(std::string("adapter: bad metric_pattern: ") +
                                e.what());
  }
}

SolverAdapterConfig parse_adapter_config(std::string_view text) {
  SolverAdapterConfig c;
  std::size_t row = 0;
  for (auto line : detail::lines(text)) {
    ++row;
    line = trim(line);
    if (line.empty() || line.front() == '#')
      continue;
    const auto eq = line.find('=');
    const auto where = "adapter line " + std::to_string(row) + ": ";
    if (eq == std::string_view::npos)
      throw std::invalid_argument(where + "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const std::string value(trim(line.substr(eq + 1)));
    auto as_int = [&] {
      auto v = detail::parse_int(value);
      if (!v)
        throw std::invalid_argument(where + "'" + std::string(key) +
                                    "' expects an integer");
      return static_cast<int>(*v);
    };
    if (key == "command")
      c.command_template = value;
    else if (key == "sat_exit")
      c.sat_exit = as_int();
    else if (key == "unsat_exit")
      c.unsat_exit = as_int();
    else if (key == "unknown_exit")
      c.unknown_exit = as_int();
    else if (key == "metric_pattern")
      c.metric_pattern = value;
    else if (key == "budget_flag")
      c.metric_budget_flag = value;
    else if (key == "timeout_seconds") {
      auto v = detail::parse_double(value);
      if (!v || *v < 0)
        throw std::invalid_argument(where + "bad timeout_seconds");
      c.timeout_seconds = *v;
    } else
      throw std::invalid_argument(where + "unknown key '" + std::string(key) +
                                  "'");
  }
  return c;
}

SolverAdapterConfig load_adapter_config(const std::filesystem::path &path) {
  return parse_adapter_config(detail::read_file(path.string()));
}

std::string render_command(const SolverAdapterConfig &config,
                           const StrategySpace &space,
                           const std::string &problem,
                           const Strategy &strategy,
                           std::optional<double> budget) {
  std::map<std::string, std::string> values{{"problem", shell_quote(problem)}};
  const auto vals = space.values(strategy);
  for (std::size_t j = 0; j < vals.size(); ++j)
    values[space.domains()[j].name] = shell_quote(vals[j]);
  std::string cmd = substitute(config.command_template, values);
  if (budget && config.metric_budget_flag) {
    cmd += ' ';
    cmd += substitute(*config.metric_budget_flag,
                      {{"budget", format_budget(*budget)}});
  }
  return cmd;
}

SolveOutcome evaluate_external(const SolverAdapterConfig &config,
                               const StrategySpace &space,
                               const std::string &problem,
                               const Strategy &strategy,
                               std::optional<double> budget) {
  const auto cmd = render_command(config, space, problem, strategy, budget);
  const auto proc = run_shell(cmd, config.timeout_seconds);

  SolveOutcome out;
  out.wall_time = proc.wall_seconds;
  const auto metric = find_metric(proc.output, config.metric_pattern);

  if (proc.timed_out) {
    out.verdict = Verdict::aborted;
    out.metric = metric.value_or(budget.value_or(0.0));
    return out;
  }
  if (proc.signal != 0)
    throw LaunchError("solver terminated by signal " +
                      std::to_string(proc.signal) + ": " + cmd);
  if (proc.exit_code == 127 || proc.exit_code == 126)
    throw LaunchError("cannot launch solver (exit " +
                      std::to_string(proc.exit_code) + "): " + cmd);

  if (proc.exit_code == config.sat_exit)
    out.verdict = Verdict::sat;
  else if (proc.exit_code == config.unsat_exit)
    out.verdict = Verdict::unsat;
  else if (budget && config.unknown_exit &&
           proc.exit_code == *config.unknown_exit)
    out.verdict = Verdict::aborted;
  else
    throw ExitCodeError(proc.exit_code);

  if (!metric)
    throw MetricParseError("no line matching metric pattern '" +
                           config.metric_pattern + "' in solver output");
  out.metric = *metric;
  if (budget && out.metric > *budget)
    out.verdict = Verdict::aborted;
  return out;
}

ExternalBackend::ExternalBackend(SolverAdapterConfig config,
                                 ProblemManifest manifest,
                                 const StrategySpace &space)
    : config_(std::move(config)), manifest_(std::move(manifest)),
      space_(space) {
  config_.validate(space_);
}

SolveOutcome ExternalBackend::evaluate(std::size_t index,
                                       const Strategy &strategy,
                                       std::optional<double> budget) {
  return evaluate_external(config_, space_, manifest_.at(index).locator,
                           strategy, budget);
}

} // namespace stratlearn

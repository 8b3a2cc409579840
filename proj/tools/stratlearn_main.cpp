// stratlearn: solve a sequence of related problems while learning which
// solver configuration to use for each one.
//
//   stratlearn run      --space S (--landscape L | --manifest M --adapter A) ...
//   stratlearn ablation <run flags> --budgets 180,360 --depths 1,2,4 [--grid-out F]
//   stratlearn space    --space S

#include "stratlearn/report.hpp"
#include "stratlearn/run_config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace stratlearn;

namespace {

template <class T> std::vector<T> parse_list(const std::string &s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof())
      throw UsageError("bad list element '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw UsageError("empty list");
  return out;
}

int cmd_run(const std::vector<std::string> &args) {
  const auto config = parse_args(args);
  const auto report = run_once(config);
  const auto &log = report.result.log;
  if (!log.empty())
    std::cerr << "note: " << log.front() << '\n';
  if (log.size() > 1)
    std::cerr << "note: " << log.size() - 1 << " more log lines\n";
  std::cout << summary_to_json(report.summary) << '\n';
  return 0;
}

int cmd_ablation(std::vector<std::string> args) {
  // Peel off the grid flags; everything else is a run flag.
  std::string budgets, depths;
  std::optional<std::string> grid_out;
  std::size_t repeats = 1, jobs = 1;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    auto value = [&]() -> std::string {
      if (i + 1 >= args.size())
        throw UsageError(args[i] + " needs a value");
      return args[++i];
    };
    if (args[i] == "--budgets")
      budgets = value();
    else if (args[i] == "--depths")
      depths = value();
    else if (args[i] == "--grid-out")
      grid_out = value();
    else if (args[i] == "--repeats")
      repeats = std::stoul(value());
    else if (args[i] == "--jobs")
      jobs = std::stoul(value());
    else
      rest.push_back(args[i]);
  }
  if (budgets.empty() || depths.empty())
    throw UsageError("ablation needs --budgets and --depths");
  const auto config = parse_args(rest);
  const auto grid = ablation_grid(config, parse_list<double>(budgets),
                                  parse_list<std::size_t>(depths), repeats,
                                  jobs);
  if (grid_out) {
    std::ofstream out(*grid_out);
    if (!out)
      throw std::runtime_error("cannot write '" + *grid_out + "'");
    write_grid(grid, out);
  } else {
    write_grid(grid, std::cout);
  }
  for (std::size_t b = 0; b < grid.budgets.size(); ++b)
    for (std::size_t d = 0; d < grid.depths.size(); ++d)
      if (!grid.errors[b][d].empty())
        std::cerr << "cell budget=" << grid.budgets[b]
                  << " depth=" << grid.depths[d] << ": " << grid.errors[b][d]
                  << '\n';
  return 0;
}

int cmd_space(const std::vector<std::string> &args) {
  CLI::App app{"stratlearn space"};
  std::string path;
  app.add_option("--space", path, "strategy-space table")->required();
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    throw UsageError(std::string(e.what()) + "\n" + app.help());
  }
  const auto space = StrategySpace::load(path);
  std::cout << "parameters: " << space.parameter_count() << '\n'
            << "size: " << space.size() << '\n'
            << "default: " << space.render(space.default_strategy()) << '\n'
            << "radius-1 neighbors: " << space.radius_one_count() << '\n'
            << "default init depth: " << default_init_depth(space) << '\n';
  return 0;
}

void usage(std::ostream &out) {
  out << "usage: stratlearn <run|ablation|space> [flags]\n"
         "       stratlearn run --help\n";
}

} // namespace

int main(int argc, char **argv) {
  if (argc < 2) {
    usage(std::cerr);
    return 2;
  }
  const std::string cmd = argv[1];
  std::vector<std::string> args(argv + 2, argv + argc);
  try {
    if (cmd == "run")
      return cmd_run(args);
    if (cmd == "ablation")
      return cmd_ablation(args);
    if (cmd == "space")
      return cmd_space(args);
    if (cmd == "-h" || cmd == "--help") {
      usage(std::cout);
      return 0;
    }
    usage(std::cerr);
    return 2;
  } catch (const UsageError &e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    try {
      std::rethrow_if_nested(e);
    } catch (const std::exception &inner) {
      std::cerr << "  caused by: " << inner.what() << '\n';
    } catch (...) {
    }
    return 1;
  }
}

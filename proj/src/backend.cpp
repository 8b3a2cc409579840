#include "stratlearn/backend.hpp"

#include <algorithm>

namespace stratlearn {

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::sat:
    return "SAT";
  case Verdict::unsat:
    return "UNSAT";
  case Verdict::aborted:
    return "ABORTED";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "SAT")
    return Verdict::sat;
  if (s == "UNSAT")
    return Verdict::unsat;
  if (s == "ABORTED")
    return Verdict::aborted;
  return std::nullopt;
}

double charged_effort(const SolveOutcome &outcome,
                      std::optional<double> budget) {
  if (outcome.verdict == Verdict::aborted && budget)
    return std::min(outcome.metric, *budget);
  return outcome.metric;
}

} // namespace stratlearn

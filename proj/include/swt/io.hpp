#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swt/core.hpp"

namespace swt {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a time value: a JSON number, or a string "a/b" / "a" for exact rationals.
template <Numeric Num>
Num time_from_json(const json& value) {
  if (value.is_number()) return num_from<Num>(value.get<double>());
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    if constexpr (NumTraits<Num>::exact) {
      Rational r;
      if (r.set_str(text, 10) != 0) throw FormatError("bad rational '" + text + "'");
      r.canonicalize();
      return r;
    } else {
      const auto slash = text.find('/');
      try {
        if (slash == std::string::npos) return std::stod(text);
        return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
      } catch (const std::exception&) {
        throw FormatError("bad number '" + text + "'");
      }
    }
  }
  throw FormatError("expected a number, got " + value.dump());
}

/// Writes a time value: doubles as JSON numbers (round-trip precision), rationals as
/// integers when whole and as "a/b" strings otherwise.
template <Numeric Num>
json time_to_json(const Num& value) {
  if constexpr (NumTraits<Num>::exact) {
    if (value.get_den() == 1 && value.get_num().fits_slong_p()) return json(value.get_num().get_si());
    return json(value.get_str());
  } else {
    return json(value);
  }
}

template <Numeric Num>
json instance_to_json(const Instance<Num>& instance) {
  json out = json::array();
  for (const auto& job : instance.jobs()) {
    json item = {{"upper", time_to_json(job.upper)}, {"proc", time_to_json(job.proc)}};
    if (job.lower != Num(0)) item["lower"] = time_to_json(job.lower);
    out.push_back(std::move(item));
  }
  return out;
}

/// Parses `[{"upper", "proc", "lower"?}, ...]`; array order is id order. Throws
/// FormatError on malformed input or broken instance invariants.
template <Numeric Num>
Instance<Num> instance_from_json(const json& doc) {
  if (!doc.is_array()) throw FormatError("instance must be a JSON array");
  std::vector<Job<Num>> jobs;
  jobs.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    if (!item.is_object() || !item.contains("upper") || !item.contains("proc")) {
      throw FormatError("job " + std::to_string(i) + ": expected {\"upper\", \"proc\"}");
    }
    Job<Num> job;
    job.id = i;
    job.upper = time_from_json<Num>(item["upper"]);
    job.proc = time_from_json<Num>(item["proc"]);
    job.lower = item.contains("lower") ? time_from_json<Num>(item["lower"]) : Num(0);
    jobs.push_back(std::move(job));
  }
  Instance<Num> instance(std::move(jobs));
  const auto problems = validate_instance(instance);
  if (!problems.empty()) throw FormatError("invalid instance: " + problems.front());
  return instance;
}

template <Numeric Num>
Instance<Num> read_instance(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("instance parse error: ") + e.what());
  }
  return instance_from_json<Num>(doc);
}

template <Numeric Num>
void write_instance(std::ostream& out, const Instance<Num>& instance) {
  out << instance_to_json(instance).dump() << '\n';
}

/// One JSON object per line: {"t": start, "kind": ..., "job": id, "dur": duration}.
template <Numeric Num>
void write_trace(std::ostream& out, const Trace<Num>& trace) {
  for (const auto& step : trace.actions) {
    json line = {{"t", time_to_json(step.start)},
                 {"kind", std::string(to_string(step.action.kind))},
                 {"job", step.action.job},
                 {"dur", time_to_json(step.duration)}};
    out << line.dump() << '\n';
  }
}

template <Numeric Num>
std::vector<TimedAction<Num>> read_trace(std::istream& in) {
  std::vector<TimedAction<Num>> actions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json item = json::parse(line);
      TimedAction<Num> step;
      step.action.kind = parse_action_kind(item.at("kind").get<std::string>());
      step.action.job = item.at("job").get<std::size_t>();
      step.start = time_from_json<Num>(item.at("t"));
      step.duration = time_from_json<Num>(item.at("dur"));
      actions.push_back(std::move(step));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return actions;
}

/// Job count implied by an action list (largest id + 1).
template <Numeric Num>
std::size_t trace_job_count(const std::vector<TimedAction<Num>>& actions) {
  std::size_t n = 0;
  for (const auto& step : actions) n = std::max(n, step.action.job + 1);
  return n;
}

}  // namespace swt

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swt/numeric.hpp"

namespace swt {

/// One job of a scheduling-with-testing instance.
///
/// `upper` is the untested execution time and is public knowledge; `proc` is
/// the execution time after a unit-length test and is only ever handed to an
/// algorithm by the engine once the test has completed. `lower` is accepted
/// for input compatibility and ignored by every algorithm.
template <Numeric Num>
struct Job {
  std::size_t id = 0;
  Num upper{};
  Num proc{};
  Num lower{};

  friend bool operator==(const Job&, const Job&) = default;
};

template <Numeric Num>
class Instance {
 public:
  Instance() = default;
  explicit Instance(std::vector<Job<Num>> jobs) : jobs_(std::move(jobs)) {}

  /// Builds an instance from (upper, proc) pairs; ids follow input order.
  static Instance from_pairs(const std::vector<std::pair<Num, Num>>& pairs) {
    std::vector<Job<Num>> jobs;
    jobs.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      jobs.push_back(Job<Num>{i, pairs[i].first, pairs[i].second, Num(0)});
    }
    return Instance(std::move(jobs));
  }

  std::size_t size() const { return jobs_.size(); }
  bool empty() const { return jobs_.empty(); }
  const std::vector<Job<Num>>& jobs() const { return jobs_; }
  const Job<Num>& operator[](std::size_t i) const { return jobs_[i]; }

  std::vector<Num> upper_limits() const {
    std::vector<Num> out;
    out.reserve(jobs_.size());
    for (const auto& j : jobs_) out.push_back(j.upper);
    return out;
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::vector<Job<Num>> jobs_;
};

/// Lists every broken Job/Instance invariant; empty means the instance is valid.
template <Numeric Num>
std::vector<std::string> validate_instance(const Instance<Num>& instance) {
  std::vector<std::string> out;
  std::vector<bool> seen(instance.size(), false);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const auto& job = instance[i];
    const std::string where = "job " + std::to_string(i) + ": ";
    if (job.id != i) {
      out.push_back(where + "id " + std::to_string(job.id) + " does not match position");
    }
    if (job.id < seen.size()) {
      if (seen[job.id]) out.push_back(where + "duplicate id " + std::to_string(job.id));
      seen[job.id] = true;
    }
    if (job.upper < Num(0)) out.push_back(where + "upper_limit < 0");
    if (job.proc < Num(0)) out.push_back(where + "processing_time < 0");
    if (job.upper < job.proc) out.push_back(where + "processing_time > upper_limit");
    if (job.lower < Num(0)) out.push_back(where + "lower_limit < 0");
    if (job.proc < job.lower) out.push_back(where + "lower_limit > processing_time");
  }
  return out;
}

enum class ActionKind : std::uint8_t { Test, ExecuteTested, ExecuteUntested };

inline std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Test:
      return "test";
    case ActionKind::ExecuteTested:
      return "exec_tested";
    case ActionKind::ExecuteUntested:
      return "exec_untested";
  }
  return "?";
}

inline ActionKind parse_action_kind(std::string_view s) {
  if (s == "test") return ActionKind::Test;
  if (s == "exec_tested") return ActionKind::ExecuteTested;
  if (s == "exec_untested") return ActionKind::ExecuteUntested;
  throw std::invalid_argument("unknown action kind '" + std::string(s) + "'");
}

struct Action {
  ActionKind kind = ActionKind::Test;
  std::size_t job = 0;

  static Action test(std::size_t j) { return {ActionKind::Test, j}; }
  static Action execute_tested(std::size_t j) { return {ActionKind::ExecuteTested, j}; }
  static Action execute_untested(std::size_t j) { return {ActionKind::ExecuteUntested, j}; }

  friend bool operator==(const Action&, const Action&) = default;
};

template <Numeric Num>
struct TimedAction {
  Action action;
  Num start{};
  Num duration{};

  Num end() const { return start + duration; }
  friend bool operator==(const TimedAction&, const TimedAction&) = default;
};

/// A complete schedule: contiguous actions from time 0 plus per-job completion times.
template <Numeric Num>
struct Trace {
  std::vector<TimedAction<Num>> actions;
  std::vector<Num> completion;
  Num total_completion{};
  Num makespan{};
  Num length{};

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Raised for a structurally broken trace; `action_index` names the first offender
/// (npos when the problem is not tied to a single action).
class TraceError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  TraceError(std::size_t action_index, const std::string& what)
      : std::runtime_error(action_index == npos
                               ? what
                               : "action " + std::to_string(action_index) + ": " + what),
        action_index_(action_index) {}

  std::size_t action_index() const { return action_index_; }

 private:
  std::size_t action_index_;
};

template <Numeric Num>
struct TraceCost {
  Num total_completion{};
  Num makespan{};
};

/// Appends actions back to back and tracks completion times. Used by the engine
/// and by the offline planner so both produce traces the same way.
template <Numeric Num>
class TraceBuilder {
 public:
  explicit TraceBuilder(std::size_t n) {
    trace_.completion.assign(n, Num(0));
  }

  const Num& clock() const { return clock_; }

  void append(Action action, const Num& duration) {
    TimedAction<Num> step{action, clock_, duration};
    clock_ += duration;
    if (action.kind != ActionKind::Test) {
      trace_.completion[action.job] = clock_;
      trace_.total_completion += clock_;
      if (trace_.makespan < clock_) trace_.makespan = clock_;
    }
    trace_.actions.push_back(std::move(step));
  }

  Trace<Num> finish() && {
    trace_.length = clock_;
    return std::move(trace_);
  }

 private:
  Trace<Num> trace_;
  Num clock_{0};
};

/// Recomputes sum of completion times and makespan from an action list over `n` jobs.
///
/// Throws TraceError on gaps/overlaps, negative or wrong test durations, unknown
/// ids, double tests or executions, executing a tested job untested, executing an
/// untested job as tested, or jobs that never run.
template <Numeric Num>
TraceCost<Num> cost_of_trace(std::span<const TimedAction<Num>> actions, std::size_t n) {
  enum class State : std::uint8_t { Fresh, Tested, Done };
  std::vector<State> state(n, State::Fresh);
  TraceCost<Num> cost;
  Num clock(0);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& step = actions[i];
    const std::size_t j = step.action.job;
    if (j >= n) throw TraceError(i, "unknown job id " + std::to_string(j));
    if (!NumTraits<Num>::nearly_equal(step.start, clock)) {
      throw TraceError(i, step.start < clock ? "overlaps previous action" : "gap before action");
    }
    if (step.duration < Num(0)) throw TraceError(i, "negative duration");
    switch (step.action.kind) {
      case ActionKind::Test:
        if (state[j] != State::Fresh) throw TraceError(i, "job tested twice or after execution");
        if (!NumTraits<Num>::nearly_equal(step.duration, Num(1))) {
          throw TraceError(i, "test duration must be 1");
        }
        state[j] = State::Tested;
        break;
      case ActionKind::ExecuteTested:
        if (state[j] == State::Done) throw TraceError(i, "duplicate execution");
        if (state[j] != State::Tested) throw TraceError(i, "execute_tested before test");
        state[j] = State::Done;
        break;
      case ActionKind::ExecuteUntested:
        if (state[j] == State::Done) throw TraceError(i, "duplicate execution");
        if (state[j] == State::Tested) throw TraceError(i, "execute_untested after test");
        state[j] = State::Done;
        break;
    }
    clock = step.start + step.duration;
    if (step.action.kind != ActionKind::Test) {
      cost.total_completion += clock;
      if (cost.makespan < clock) cost.makespan = clock;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (state[j] != State::Done) {
      throw TraceError(TraceError::npos, "job " + std::to_string(j) + " never executed");
    }
  }
  return cost;
}

/// Recomputes a trace's costs and checks them against its stored aggregates.
template <Numeric Num>
TraceCost<Num> cost_of_trace(const Trace<Num>& trace) {
  const auto cost = cost_of_trace<Num>(std::span<const TimedAction<Num>>(trace.actions),
                                       trace.completion.size());
  if (!NumTraits<Num>::nearly_equal(cost.total_completion, trace.total_completion)) {
    throw TraceError(TraceError::npos, "stored total_completion disagrees with actions");
  }
  if (!NumTraits<Num>::nearly_equal(cost.makespan, trace.makespan)) {
    throw TraceError(TraceError::npos, "stored makespan disagrees with actions");
  }
  for (const auto& step : trace.actions) {
    if (step.action.kind == ActionKind::Test) continue;
    if (!NumTraits<Num>::nearly_equal(trace.completion[step.action.job], step.end())) {
      throw TraceError(TraceError::npos, "stored completion time disagrees for job " +
                                             std::to_string(step.action.job));
    }
  }
  return cost;
}

/// Checks the kind-specific duration rule against the instance a trace was run on:
/// tests take 1, tested executions take p_j, untested executions take the upper limit.
template <Numeric Num>
void check_durations(std::span<const TimedAction<Num>> actions, const Instance<Num>& instance) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& step = actions[i];
    if (step.action.job >= instance.size()) {
      throw TraceError(i, "unknown job id " + std::to_string(step.action.job));
    }
    const auto& job = instance[step.action.job];
    Num expected(1);
    if (step.action.kind == ActionKind::ExecuteTested) expected = job.proc;
    if (step.action.kind == ActionKind::ExecuteUntested) expected = job.upper;
    if (!NumTraits<Num>::nearly_equal(step.duration, expected)) {
      throw TraceError(i, std::string("duration does not match ") +
                              std::string(to_string(step.action.kind)) + " rule");
    }
  }
}

enum class Objective : std::uint8_t { SumCompletion, Makespan };

inline std::string_view to_string(Objective objective) {
  return objective == Objective::SumCompletion ? "sum" : "makespan";
}

inline Objective parse_objective(std::string_view s) {
  if (s == "sum") return Objective::SumCompletion;
  if (s == "makespan") return Objective::Makespan;
  throw std::invalid_argument("unknown objective '" + std::string(s) + "'");
}

template <Numeric Num>
Num objective_value(const Trace<Num>& trace, Objective objective) {
  return objective == Objective::SumCompletion ? trace.total_completion : trace.makespan;
}

/// Algorithm cost against the offline optimum. `std_error` is zero for deterministic
/// runs and for exactly enumerated expectations.
template <Numeric Num>
struct RatioReport {
  Num alg_cost{};
  Num opt_cost{};
  double ratio = 1.0;
  std::size_t trials = 1;
  double std_error = 0.0;
  bool exact = true;
};

template <Numeric Num>
RatioReport<Num> make_ratio_report(const Num& alg_cost, const Num& opt_cost,
                                   std::size_t trials = 1, double std_error = 0.0,
                                   bool exact = true) {
  RatioReport<Num> report{alg_cost, opt_cost, 1.0, trials, std_error, exact};
  if (opt_cost != Num(0)) {
    if constexpr (NumTraits<Num>::exact) {
      report.ratio = Rational(alg_cost / opt_cost).get_d();
    } else {
      report.ratio = alg_cost / opt_cost;
    }
  } else if (alg_cost != Num(0)) {
    report.ratio = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace swt

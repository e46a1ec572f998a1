#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "swt/core.hpp"

namespace swt {

/// What an online algorithm is allowed to see up front.
template <Numeric Num>
struct View {
  std::size_t n = 0;
  std::vector<Num> upper;

  bool uniform() const {
    return std::all_of(upper.begin(), upper.end(),
                       [&](const Num& u) { return u == upper.front(); });
  }
};

/// Pull-based online algorithm. The engine owns the clock: it asks for the next
/// action, and calls `reveal` exactly once per tested job, right after the test.
/// Algorithms never see an Instance, so hidden processing times are out of reach.
template <Numeric Num>
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;
  virtual void start(const View<Num>& view) = 0;
  /// Next action, or nullopt once the algorithm considers itself finished.
  virtual std::optional<Action> next() = 0;
  virtual void reveal(std::size_t job, const Num& proc) = 0;
};

/// Supplies processing times to the engine. Static sources read a fixed instance;
/// adaptive ones commit p_j at the first touch of job j (its test or its untested
/// execution) and never change it afterwards.
template <Numeric Num>
class RevealSource {
 public:
  virtual ~RevealSource() = default;

  virtual std::vector<Num> upper_limits() const = 0;
  /// First touch of `job`; `tested` is false for an untested execution.
  virtual void touch(std::size_t job, bool tested) = 0;
  virtual Num reveal(std::size_t job) = 0;
  /// The instance as realized so far; complete after a full run.
  virtual Instance<Num> realized() const = 0;
};

template <Numeric Num>
class StaticSource final : public RevealSource<Num> {
 public:
  explicit StaticSource(Instance<Num> instance) : instance_(std::move(instance)) {}

  std::vector<Num> upper_limits() const override { return instance_.upper_limits(); }
  void touch(std::size_t, bool) override {}
  Num reveal(std::size_t job) override { return instance_[job].proc; }
  Instance<Num> realized() const override { return instance_; }

 private:
  Instance<Num> instance_;
};

/// The algorithm broke the protocol (illegal or missing action).
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::size_t action_index, const std::string& what)
      : std::runtime_error("protocol error at action " + std::to_string(action_index) + ": " +
                           what),
        action_index_(action_index) {}
  std::size_t action_index() const { return action_index_; }

 private:
  std::size_t action_index_;
};

/// The reveal source produced a processing time outside [0, upper].
class AdversaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `algorithm` to completion against `source` and returns the trace.
template <Numeric Num>
Trace<Num> run(Algorithm<Num>& algorithm, RevealSource<Num>& source) {
  enum class State : std::uint8_t { Fresh, Tested, Done };

  View<Num> view;
  view.upper = source.upper_limits();
  view.n = view.upper.size();
  const std::size_t n = view.n;
  for (const auto& u : view.upper) {
    if (u < Num(0)) throw std::invalid_argument("upper limits must be nonnegative");
  }

  std::vector<State> state(n, State::Fresh);
  std::vector<Num> revealed(n);
  TraceBuilder<Num> builder(n);
  std::size_t executed = 0;
  std::size_t index = 0;

  algorithm.start(view);
  while (executed < n) {
    const std::optional<Action> next = algorithm.next();
    if (!next) {
      throw ProtocolError(index, "algorithm stopped with " + std::to_string(n - executed) +
                                     " job(s) unexecuted");
    }
    const Action action = *next;
    const std::size_t j = action.job;
    if (j >= n) throw ProtocolError(index, "unknown job id " + std::to_string(j));

    switch (action.kind) {
      case ActionKind::Test: {
        if (state[j] != State::Fresh) throw ProtocolError(index, "job " + std::to_string(j) + " tested twice or after execution");
        source.touch(j, true);
        builder.append(action, Num(1));
        Num p = source.reveal(j);
        if (p < Num(0) || view.upper[j] < p) {
          throw AdversaryError("revealed p_" + std::to_string(j) + " outside [0, upper]");
        }
        state[j] = State::Tested;
        revealed[j] = p;
        algorithm.reveal(j, revealed[j]);
        break;
      }
      case ActionKind::ExecuteTested:
        if (state[j] == State::Done) throw ProtocolError(index, "duplicate execution of job " + std::to_string(j));
        if (state[j] != State::Tested) throw ProtocolError(index, "execute_tested before test of job " + std::to_string(j));
        builder.append(action, revealed[j]);
        state[j] = State::Done;
        ++executed;
        break;
      case ActionKind::ExecuteUntested:
        if (state[j] == State::Done) throw ProtocolError(index, "duplicate execution of job " + std::to_string(j));
        if (state[j] == State::Tested) throw ProtocolError(index, "execute_untested after test of job " + std::to_string(j));
        source.touch(j, false);
        builder.append(action, view.upper[j]);
        state[j] = State::Done;
        ++executed;
        break;
    }
    ++index;
  }
  return std::move(builder).finish();
}

template <Numeric Num>
Trace<Num> run(Algorithm<Num>& algorithm, const Instance<Num>& instance) {
  StaticSource<Num> source(instance);
  return run(algorithm, source);
}

// ---------------------------------------------------------------------------
// Expectations over an algorithm's randomness.

/// splitmix64 finalizer; per-trial seeds are derived from (master, trial index)
/// so trials can run on any worker without changing results.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return mix_seed(mix_seed(master) ^ mix_seed(trial + 0x5851f42d4c957f2dULL));
}

template <Numeric Num>
using OutcomeVisitor = std::function<void(const Num& probability, Algorithm<Num>& algorithm)>;

/// A randomized algorithm: a seeded sampler plus, when the randomness has small
/// finite support, an enumerator that visits every outcome with its probability.
template <Numeric Num>
struct RandomizedSpec {
  std::function<std::unique_ptr<Algorithm<Num>>(std::uint64_t seed)> sample;
  /// Returns false (visiting nothing) when the support for `view` is too large.
  std::function<bool(const View<Num>& view, const OutcomeVisitor<Num>& visit)> enumerate;
};

/// Wraps a deterministic algorithm factory; its support is a single outcome.
template <Numeric Num>
RandomizedSpec<Num> deterministic_spec(std::function<std::unique_ptr<Algorithm<Num>>()> make) {
  RandomizedSpec<Num> spec;
  spec.sample = [make](std::uint64_t) { return make(); };
  spec.enumerate = [make](const View<Num>&, const OutcomeVisitor<Num>& visit) {
    auto alg = make();
    visit(Num(1), *alg);
    return true;
  };
  return spec;
}

template <Numeric Num>
using SourceFactory = std::function<std::unique_ptr<RevealSource<Num>>(std::uint64_t trial_seed)>;

template <Numeric Num>
SourceFactory<Num> static_source_factory(Instance<Num> instance) {
  return [instance = std::move(instance)](std::uint64_t) {
    return std::make_unique<StaticSource<Num>>(instance);
  };
}

enum class ExpectationMode : std::uint8_t { Auto, MonteCarlo, Exact };

template <Numeric Num>
struct Expectation {
  Num mean{};
  /// Mean optimal cost over the realized instances (a constant for static sources).
  Num opt_mean{};
  double std_error = 0.0;
  std::size_t trials = 0;
  bool exact = false;
};

struct ExpectationOptions {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  ExpectationMode mode = ExpectationMode::Auto;
  Objective objective = Objective::SumCompletion;
  std::size_t workers = 1;
};

/// Expected cost of a randomized algorithm.
///
/// Exact mode enumerates the algorithm's support (e.g. all test orders for n <= 8)
/// against a single source built with seed 0, returning stderr 0. Monte Carlo runs
/// `trials` independent seeded trials; trial i uses trial_seed(seed, i) for both the
/// algorithm and the source, so results are identical for any worker count.
/// `opt` maps a realized instance to its optimal cost.
template <Numeric Num>
Expectation<Num> run_expected(const RandomizedSpec<Num>& spec, const SourceFactory<Num>& make_source,
                              const std::function<Num(const Instance<Num>&)>& opt,
                              const ExpectationOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");

  if (options.mode != ExpectationMode::MonteCarlo && spec.enumerate) {
    auto probe = make_source(0);
    View<Num> view;
    view.upper = probe->upper_limits();
    view.n = view.upper.size();
    Expectation<Num> out;
    Num total_probability(0);
    std::size_t outcomes = 0;
    const bool ok = spec.enumerate(view, [&](const Num& probability, Algorithm<Num>& alg) {
      auto source = make_source(0);
      const Trace<Num> trace = run(alg, *source);
      out.mean += probability * objective_value(trace, options.objective);
      out.opt_mean += probability * opt(source->realized());
      total_probability += probability;
      ++outcomes;
    });
    if (ok) {
      if constexpr (NumTraits<Num>::exact) {
        if (total_probability != Num(1)) throw std::logic_error("outcome probabilities do not sum to 1");
      }
      out.trials = outcomes;
      out.exact = true;
      return out;
    }
    if (options.mode == ExpectationMode::Exact) {
      throw std::invalid_argument("exact expectation unavailable: support too large");
    }
  } else if (options.mode == ExpectationMode::Exact) {
    throw std::invalid_argument("exact expectation unavailable for this algorithm");
  }

  const std::size_t trials = options.trials;
  std::vector<Num> costs(trials);
  std::vector<Num> opts(trials);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < trials; i += stride) {
      const std::uint64_t s = trial_seed(options.seed, i);
      auto alg = spec.sample(s);
      auto source = make_source(s);
      const Trace<Num> trace = run(*alg, *source);
      costs[i] = objective_value(trace, options.objective);
      opts[i] = opt(source->realized());
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, trials));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  Expectation<Num> out;
  out.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    out.mean += costs[i];
    out.opt_mean += opts[i];
  }
  out.mean /= Num(static_cast<long>(trials));
  out.opt_mean /= Num(static_cast<long>(trials));
  if (trials > 1) {
    const double mean = to_double(out.mean);
    double ss = 0.0;
    for (const auto& c : costs) {
      const double d = to_double(c) - mean;
      ss += d * d;
    }
    out.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  return out;
}

}  // namespace swt

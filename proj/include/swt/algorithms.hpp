#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swt/engine.hpp"

namespace swt {

/// Algorithm configuration does not fit the instance (e.g. non-uniform limits for Beat).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kGoldenRatio = 1.6180339887498949;

/// Jobs with upper limit below `rho`, ascending by limit then id. Every algorithm
/// that claims ratio rho may run exactly these untested before anything else.
template <Numeric Num>
std::vector<std::size_t> preprocess_small_limits(const std::vector<Num>& upper, const Num& rho) {
  if (rho < Num(1)) throw std::invalid_argument("rho must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < upper.size(); ++j) {
    if (upper[j] < rho) out.push_back(j);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return upper[a] < upper[b]; });
  return out;
}

/// Base for algorithms that plan a few actions at a time: `refill` is asked for
/// more work whenever the queue runs dry, and `reveal` handlers may push follow-ups.
template <Numeric Num>
class QueuedAlgorithm : public Algorithm<Num> {
 public:
  std::optional<Action> next() final {
    if (queue_.empty()) refill();
    if (queue_.empty()) return std::nullopt;
    const Action a = queue_.front();
    queue_.pop_front();
    return a;
  }

 protected:
  virtual void refill() = 0;
  void push(Action a) { queue_.push_back(a); }

 private:
  std::deque<Action> queue_;
};

/// Tested-but-unexecuted jobs kept in (p_j, id) order.
template <Numeric Num>
class DeferredSet {
 public:
  void add(std::size_t job, const Num& proc) { items_.emplace(proc, job); }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::pair<Num, std::size_t>& front() const { return *items_.begin(); }
  void pop_front() { items_.erase(items_.begin()); }

  template <class Push>
  void flush(Push&& push) {
    for (const auto& [p, j] : items_) push(Action::execute_tested(j));
    items_.clear();
  }

 private:
  std::set<std::pair<Num, std::size_t>> items_;
};

/// Runs every job untested, ascending by upper limit.
template <Numeric Num>
class AllUntestedAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  std::string name() const override { return "untested"; }
  void start(const View<Num>& view) override {
    order_.resize(view.n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return view.upper[a] < view.upper[b];
    });
    cursor_ = 0;
  }
  void reveal(std::size_t, const Num&) override {}

 protected:
  void refill() override {
    if (cursor_ < order_.size()) this->push(Action::execute_untested(order_[cursor_++]));
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// Threshold: limits below 2 run untested (ascending); all others are tested in id
/// order; p_j <= 2 executes right away, longer jobs wait and run ascending by p_j.
/// With `delay_all` every tested job waits (the DelayAll variant).
template <Numeric Num>
class ThresholdAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  explicit ThresholdAlgorithm(bool delay_all = false) : delay_all_(delay_all) {}

  std::string name() const override { return delay_all_ ? "delay_all" : "threshold"; }

  void start(const View<Num>& view) override {
    const auto prefix = preprocess_small_limits(view.upper, Num(2));
    std::vector<bool> in_prefix(view.n, false);
    for (std::size_t j : prefix) {
      in_prefix[j] = true;
      this->push(Action::execute_untested(j));
    }
    to_test_.clear();
    for (std::size_t j = 0; j < view.n; ++j) {
      if (!in_prefix[j]) to_test_.push_back(j);
    }
    cursor_ = 0;
  }

  void reveal(std::size_t job, const Num& proc) override {
    if (!delay_all_ && !(Num(2) < proc)) {
      this->push(Action::execute_tested(job));
    } else {
      deferred_.add(job, proc);
    }
  }

 protected:
  void refill() override {
    if (cursor_ < to_test_.size()) {
      this->push(Action::test(to_test_[cursor_++]));
    } else {
      deferred_.flush([this](Action a) { this->push(a); });
    }
  }

 private:
  bool delay_all_;
  std::vector<std::size_t> to_test_;
  std::size_t cursor_ = 0;
  DeferredSet<Num> deferred_;
};

struct RandomParams {
  double T = 1.7453;
  double E = 2.8609;

  void validate() const {
    if (!(1.0 <= T && T <= E)) throw std::invalid_argument("Random needs 1 <= T <= E");
  }
};

/// Random(T, E): limits below T run untested (ascending); the rest are tested in a
/// uniformly random order; p_j <= E executes right away, the others wait and run
/// ascending by p_j at the end.
///
/// The test order is either shuffled from a seed, or given explicitly as a
/// permutation of the tested jobs' ranks (used to enumerate the exact expectation).
template <Numeric Num>
class RandomAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  RandomAlgorithm(RandomParams params, std::uint64_t seed) : params_(params), seed_(seed) {
    params_.validate();
  }
  RandomAlgorithm(RandomParams params, std::vector<std::size_t> rank_order)
      : params_(params), rank_order_(std::move(rank_order)) {
    params_.validate();
  }

  std::string name() const override { return "random"; }

  void start(const View<Num>& view) override {
    const Num threshold = num_from<Num>(params_.T);
    execute_limit_ = num_from<Num>(params_.E);
    const auto prefix = preprocess_small_limits(view.upper, threshold);
    std::vector<bool> in_prefix(view.n, false);
    for (std::size_t j : prefix) {
      in_prefix[j] = true;
      this->push(Action::execute_untested(j));
    }
    std::vector<std::size_t> tested;
    for (std::size_t j = 0; j < view.n; ++j) {
      if (!in_prefix[j]) tested.push_back(j);
    }
    if (rank_order_) {
      if (rank_order_->size() != tested.size()) {
        throw ConfigurationError("explicit test order has wrong length");
      }
      order_.clear();
      for (std::size_t r : *rank_order_) order_.push_back(tested.at(r));
    } else {
      order_ = std::move(tested);
      std::mt19937_64 rng(seed_);
      std::shuffle(order_.begin(), order_.end(), rng);
    }
    cursor_ = 0;
  }

  void reveal(std::size_t job, const Num& proc) override {
    if (!(execute_limit_ < proc)) {
      this->push(Action::execute_tested(job));
    } else {
      deferred_.add(job, proc);
    }
  }

  const std::vector<std::size_t>& test_order() const { return order_; }

 protected:
  void refill() override {
    if (cursor_ < order_.size()) {
      this->push(Action::test(order_[cursor_++]));
    } else {
      deferred_.flush([this](Action a) { this->push(a); });
    }
  }

 private:
  RandomParams params_;
  std::uint64_t seed_ = 0;
  std::optional<std::vector<std::size_t>> rank_order_;
  Num execute_limit_{};
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  DeferredSet<Num> deferred_;
};

/// Number of jobs Random tests (upper limit >= T); the size of its order space.
template <Numeric Num>
std::size_t random_tested_count(const View<Num>& view, const RandomParams& params) {
  const Num threshold = num_from<Num>(params.T);
  return static_cast<std::size_t>(std::count_if(view.upper.begin(), view.upper.end(),
                                                [&](const Num& u) { return !(u < threshold); }));
}

inline std::size_t factorial(std::size_t k) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

template <Numeric Num>
RandomizedSpec<Num> random_spec(RandomParams params, std::size_t max_enumerated = 8) {
  params.validate();
  RandomizedSpec<Num> spec;
  spec.sample = [params](std::uint64_t seed) {
    return std::make_unique<RandomAlgorithm<Num>>(params, seed);
  };
  spec.enumerate = [params, max_enumerated](const View<Num>& view, const OutcomeVisitor<Num>& visit) {
    const std::size_t m = random_tested_count(view, params);
    if (m > max_enumerated) return false;
    const Num probability = Num(1) / Num(static_cast<long>(factorial(m)));
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      RandomAlgorithm<Num> alg(params, perm);
      visit(probability, alg);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
  };
  return spec;
}

/// One step of Beat's main loop, recorded for invariant checks.
template <Numeric Num>
struct BeatStep {
  Num total_test{};
  Num total_exec{};
  bool deferred_execution = false;  // this step executed a waiting long job
  bool long_pending = false;        // a tested long job was waiting at decision time
};

/// Beat for uniform upper limit U. Short means p_j <= max{1, U - 1}. While untested
/// jobs remain: if the cheapest waiting job k satisfies TotalExec + p_k <= TotalTest
/// it runs (TotalExec += p_k); otherwise the lowest-id untested job is tested, short
/// jobs run at once, long ones add 1 to TotalTest and wait. Leftovers run ascending.
template <Numeric Num>
class BeatAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  std::string name() const override { return "beat"; }

  void start(const View<Num>& view) override {
    if (!view.uniform()) throw ConfigurationError("beat requires uniform upper limits");
    n_ = view.n;
    short_limit_ = n_ == 0 ? Num(1) : num_max<Num>(Num(1), Num(view.upper.front() - 1));
    cursor_ = 0;
    total_test_ = Num(0);
    total_exec_ = Num(0);
    steps_.clear();
  }

  void reveal(std::size_t job, const Num& proc) override {
    if (!(short_limit_ < proc)) {
      this->push(Action::execute_tested(job));
    } else {
      total_test_ += 1;
      waiting_.add(job, proc);
    }
  }

  const Num& short_limit() const { return short_limit_; }
  const Num& total_test() const { return total_test_; }
  const Num& total_exec() const { return total_exec_; }
  const std::vector<BeatStep<Num>>& steps() const { return steps_; }

 protected:
  void refill() override {
    if (cursor_ < n_) {
      BeatStep<Num> step;
      step.long_pending = !waiting_.empty();
      if (!waiting_.empty() && !(total_test_ < Num(total_exec_ + waiting_.front().first))) {
        const auto [p, k] = waiting_.front();
        waiting_.pop_front();
        total_exec_ += p;
        step.deferred_execution = true;
        this->push(Action::execute_tested(k));
      } else {
        this->push(Action::test(cursor_++));
      }
      step.total_test = total_test_;
      step.total_exec = total_exec_;
      steps_.push_back(std::move(step));
    } else {
      waiting_.flush([this](Action a) { this->push(a); });
    }
  }

 private:
  std::size_t n_ = 0;
  Num short_limit_{1};
  Num total_test_{0};
  Num total_exec_{0};
  std::size_t cursor_ = 0;
  DeferredSet<Num> waiting_;
  std::vector<BeatStep<Num>> steps_;
};

struct CombinedThresholds {
  double T1 = 1.9338;
  double T2 = 2.2948;
};

/// Uniform-limit dispatcher: U < T1 runs everything untested, T1 <= U <= T2 runs
/// Beat, U > T2 runs Threshold.
template <Numeric Num>
class CombinedAlgorithm final : public Algorithm<Num> {
 public:
  explicit CombinedAlgorithm(CombinedThresholds thresholds) : thresholds_(thresholds) {
    if (!(thresholds_.T1 < thresholds_.T2)) throw ConfigurationError("combined needs T1 < T2");
  }

  std::string name() const override { return "combined"; }

  void start(const View<Num>& view) override {
    if (!view.uniform()) throw ConfigurationError("combined requires uniform upper limits");
    const Num limit = view.n == 0 ? Num(0) : view.upper.front();
    if (limit < num_from<Num>(thresholds_.T1)) {
      inner_ = std::make_unique<AllUntestedAlgorithm<Num>>();
    } else if (!(num_from<Num>(thresholds_.T2) < limit)) {
      inner_ = std::make_unique<BeatAlgorithm<Num>>();
    } else {
      inner_ = std::make_unique<ThresholdAlgorithm<Num>>();
    }
    inner_->start(view);
  }
  std::optional<Action> next() override { return inner_->next(); }
  void reveal(std::size_t job, const Num& proc) override { inner_->reveal(job, proc); }

  /// Name of the algorithm chosen by the last start().
  std::string dispatched() const { return inner_ ? inner_->name() : ""; }

 private:
  CombinedThresholds thresholds_;
  std::unique_ptr<Algorithm<Num>> inner_;
};

/// Fraction of UTE's tests that execute regardless of p_j, for uniform limit U and
/// target ratio rho (may be negative; UTE clamps at 0).
template <Numeric Num>
Num ute_beta(const Num& upper, const Num& rho) {
  const Num u2 = upper * upper;
  const Num num = Num(1) - upper + u2 - rho + Num(2) * upper * rho - u2 * rho;
  const Num den = Num(1) - upper + u2 - rho + upper * rho;
  return num / den;
}

/// Limit above which UTE's immediate prefix vanishes.
inline double ute_p_star(double rho) {
  return (2.0 * rho + std::sqrt(4.0 * rho - 3.0) - 1.0) / (2.0 * (rho - 1.0));
}

struct UteParams {
  double rho = 1.8667603991738622;  // (1 + sqrt(3 + 2 sqrt 5)) / 2

  double beta(double upper) const { return ute_beta<double>(upper, rho); }
  double p_star() const { return ute_p_star(rho); }
};

/// UTE for extreme uniform instances. U <= rho: all untested. Otherwise every job is
/// tested in id order; the first ceil(max{0, beta} n) run right after their test, the
/// rest run right away only if p_j = 0 and otherwise wait until the end.
template <Numeric Num>
class UteAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  explicit UteAlgorithm(UteParams params) : params_(params) {
    if (params_.rho < 1.0) throw ConfigurationError("ute needs rho >= 1");
  }

  std::string name() const override { return "ute"; }

  void start(const View<Num>& view) override {
    if (!view.uniform()) throw ConfigurationError("ute requires uniform upper limits");
    n_ = view.n;
    cursor_ = 0;
    tested_ = 0;
    untested_ = false;
    prefix_ = 0;
    if (n_ == 0) return;
    const Num upper = view.upper.front();
    const Num rho = num_from<Num>(params_.rho);
    if (!(rho < upper)) {
      untested_ = true;
      return;
    }
    const Num beta = ute_beta(upper, rho);
    if (Num(0) < beta) {
      const Num count = NumTraits<Num>::ceil(Num(beta * Num(static_cast<long>(n_))));
      prefix_ = std::min<std::size_t>(n_, static_cast<std::size_t>(to_double(count) + 0.5));
    }
  }

  void reveal(std::size_t job, const Num& proc) override {
    ++tested_;
    if (tested_ <= prefix_ || proc == Num(0)) {
      this->push(Action::execute_tested(job));
    } else {
      deferred_.add(job, proc);
    }
  }

  std::size_t prefix() const { return prefix_; }

 protected:
  void refill() override {
    if (cursor_ >= n_) {
      deferred_.flush([this](Action a) { this->push(a); });
      return;
    }
    const std::size_t j = cursor_++;
    this->push(untested_ ? Action::execute_untested(j) : Action::test(j));
  }

 private:
  UteParams params_;
  std::size_t n_ = 0;
  std::size_t cursor_ = 0;
  std::size_t tested_ = 0;
  std::size_t prefix_ = 0;
  bool untested_ = false;
  DeferredSet<Num> deferred_;
};

/// upper > golden ratio, decided exactly for rationals (U > 1 and U^2 - U - 1 > 0).
template <Numeric Num>
bool exceeds_golden_ratio(const Num& upper) {
  if constexpr (NumTraits<Num>::exact) {
    return Num(1) < upper && Num(0) < Num(upper * upper - upper - 1);
  } else {
    return upper > kGoldenRatio;
  }
}

/// Makespan, deterministic: test a job iff its limit exceeds the golden ratio,
/// run it right after the test. Jobs are handled in id order.
template <Numeric Num>
class MakespanDetAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  std::string name() const override { return "makespan_det"; }
  void start(const View<Num>& view) override {
    upper_ = view.upper;
    cursor_ = 0;
  }
  void reveal(std::size_t job, const Num&) override { this->push(Action::execute_tested(job)); }

 protected:
  void refill() override {
    if (cursor_ >= upper_.size()) return;
    const std::size_t j = cursor_++;
    this->push(exceeds_golden_ratio(upper_[j]) ? Action::test(j) : Action::execute_untested(j));
  }

 private:
  std::vector<Num> upper_;
  std::size_t cursor_ = 0;
};

/// Probability of testing a job with limit U > 1: 1 - 1/(U^2 - U + 1).
template <Numeric Num>
Num makespan_test_probability(const Num& upper) {
  if (!(Num(1) < upper)) return Num(0);
  return Num(1) - Num(1) / Num(upper * upper - upper + 1);
}

/// Makespan, randomized: limits <= 1 run untested; otherwise test with probability
/// 1 - 1/(U^2 - U + 1). Coins are drawn from a seed, or fixed per job for enumeration.
template <Numeric Num>
class MakespanRandAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  explicit MakespanRandAlgorithm(std::uint64_t seed) : seed_(seed) {}
  explicit MakespanRandAlgorithm(std::vector<bool> coins) : coins_(std::move(coins)) {}

  std::string name() const override { return "makespan_rand"; }

  void start(const View<Num>& view) override {
    upper_ = view.upper;
    cursor_ = 0;
    decisions_.assign(view.n, false);
    if (coins_) {
      if (coins_->size() != view.n) throw ConfigurationError("coin vector has wrong length");
      for (std::size_t j = 0; j < view.n; ++j) {
        decisions_[j] = Num(1) < upper_[j] && (*coins_)[j];
      }
    } else {
      std::mt19937_64 rng(seed_);
      for (std::size_t j = 0; j < view.n; ++j) {
        const double p = to_double(makespan_test_probability(upper_[j]));
        decisions_[j] = p > 0.0 && std::bernoulli_distribution(p)(rng);
      }
    }
  }
  void reveal(std::size_t job, const Num&) override { this->push(Action::execute_tested(job)); }

 protected:
  void refill() override {
    if (cursor_ >= upper_.size()) return;
    const std::size_t j = cursor_++;
    this->push(decisions_[j] ? Action::test(j) : Action::execute_untested(j));
  }

 private:
  std::uint64_t seed_ = 0;
  std::optional<std::vector<bool>> coins_;
  std::vector<Num> upper_;
  std::vector<bool> decisions_;
  std::size_t cursor_ = 0;
};

template <Numeric Num>
RandomizedSpec<Num> makespan_rand_spec(std::size_t max_coins = 16) {
  RandomizedSpec<Num> spec;
  spec.sample = [](std::uint64_t seed) { return std::make_unique<MakespanRandAlgorithm<Num>>(seed); };
  spec.enumerate = [max_coins](const View<Num>& view, const OutcomeVisitor<Num>& visit) {
    std::vector<std::size_t> random_jobs;
    for (std::size_t j = 0; j < view.n; ++j) {
      if (Num(1) < view.upper[j]) random_jobs.push_back(j);
    }
    if (random_jobs.size() > max_coins) return false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << random_jobs.size()); ++mask) {
      std::vector<bool> coins(view.n, false);
      Num probability(1);
      for (std::size_t b = 0; b < random_jobs.size(); ++b) {
        const std::size_t j = random_jobs[b];
        const Num q = makespan_test_probability(view.upper[j]);
        coins[j] = (mask >> b & 1U) != 0;
        probability *= coins[j] ? q : Num(Num(1) - q);
      }
      MakespanRandAlgorithm<Num> alg(std::move(coins));
      visit(probability, alg);
    }
    return true;
  };
  return spec;
}

/// Closed-form expected makespan of the randomized makespan algorithm.
template <Numeric Num>
Num makespan_rand_expected(const Instance<Num>& instance) {
  Num total(0);
  for (const auto& job : instance.jobs()) {
    const Num q = makespan_test_probability(job.upper);
    total += q * Num(job.proc + 1) + Num(Num(1) - q) * job.upper;
  }
  return total;
}

/// The (nu, lambda) schedule family against the deterministic lower-bound adversary:
/// touches jobs in id order, runs the first floor(nu n) untested, tests and runs the
/// next floor(lambda n) immediately, then tests the rest, running p_j = 0 jobs at
/// once and deferring the others to the end.
template <Numeric Num>
class ScheduleFamilyAlgorithm final : public QueuedAlgorithm<Num> {
 public:
  ScheduleFamilyAlgorithm(double nu, double lambda) : nu_(nu), lambda_(lambda) {
    if (nu < 0.0 || lambda < 0.0 || nu + lambda > 1.0) {
      throw ConfigurationError("family needs nu, lambda >= 0 and nu + lambda <= 1");
    }
  }

  std::string name() const override { return "family"; }

  void start(const View<Num>& view) override {
    n_ = view.n;
    untested_ = fraction_count(nu_, n_);
    eager_ = std::min(n_ - untested_, fraction_count(lambda_, n_));
    cursor_ = 0;
  }

  void reveal(std::size_t job, const Num& proc) override {
    if (job < untested_ + eager_ || proc == Num(0)) {
      this->push(Action::execute_tested(job));
    } else {
      deferred_.add(job, proc);
    }
  }

 protected:
  void refill() override {
    if (cursor_ >= n_) {
      deferred_.flush([this](Action a) { this->push(a); });
      return;
    }
    const std::size_t j = cursor_++;
    this->push(j < untested_ ? Action::execute_untested(j) : Action::test(j));
  }

 private:
  double nu_;
  double lambda_;
  std::size_t n_ = 0;
  std::size_t untested_ = 0;
  std::size_t eager_ = 0;
  std::size_t cursor_ = 0;
  DeferredSet<Num> deferred_;
};

}  // namespace swt

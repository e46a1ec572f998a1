#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "swt/core.hpp"

namespace swt {

/// Full-information optimum for the sum of completion times.
template <Numeric Num>
struct OptPlan {
  std::vector<std::size_t> order;
  std::vector<bool> tested;  // indexed by job id
  Num cost{};
};

/// Time the optimum spends on job j: min{1 + p_j, upper_j}.
template <Numeric Num>
Num optimal_block(const Job<Num>& job) {
  return num_min<Num>(Num(job.proc + 1), job.upper);
}

/// SPT on the effective lengths min{1 + p_j, upper_j}. Jobs with 1 + p_j < upper_j
/// are tested; ties (1 + p_j == upper_j) run untested. Equal keys keep id order.
template <Numeric Num>
OptPlan<Num> optimal_sum(const Instance<Num>& instance) {
  const std::size_t n = instance.size();
  std::vector<Num> key(n);
  OptPlan<Num> plan;
  plan.tested.assign(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    key[j] = optimal_block(instance[j]);
    plan.tested[j] = Num(instance[j].proc + 1) < instance[j].upper;
  }
  plan.order.resize(n);
  std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
  std::stable_sort(plan.order.begin(), plan.order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  Num clock(0);
  for (std::size_t j : plan.order) {
    clock += key[j];
    plan.cost += clock;
  }
  return plan;
}

/// Materializes an OptPlan as a trace (tested jobs run right after their test).
template <Numeric Num>
Trace<Num> plan_trace(const Instance<Num>& instance, const OptPlan<Num>& plan) {
  TraceBuilder<Num> builder(instance.size());
  for (std::size_t j : plan.order) {
    if (plan.tested[j]) {
      builder.append(Action::test(j), Num(1));
      builder.append(Action::execute_tested(j), instance[j].proc);
    } else {
      builder.append(Action::execute_untested(j), instance[j].upper);
    }
  }
  return std::move(builder).finish();
}

template <Numeric Num>
Num optimal_makespan(const Instance<Num>& instance) {
  Num total(0);
  for (const auto& job : instance.jobs()) total += optimal_block(job);
  return total;
}

template <Numeric Num>
Num optimal_cost(const Instance<Num>& instance, Objective objective) {
  return objective == Objective::SumCompletion ? optimal_sum(instance).cost
                                               : optimal_makespan(instance);
}

namespace detail {

template <Numeric Num>
class SumSearch {
 public:
  explicit SumSearch(const Instance<Num>& instance) : instance_(instance) {
    used_.assign(instance.size(), false);
  }

  Num solve() {
    visit(Num(0), Num(0), instance_.size());
    return *best_;
  }

 private:
  // Depth-first over (next job, tested?) sequences; a tested job runs right after
  // its test. Pruned with the bound `partial + remaining * clock`.
  void visit(const Num& clock, const Num& partial, std::size_t remaining) {
    if (remaining == 0) {
      if (!best_ || partial < *best_) best_ = partial;
      return;
    }
    if (best_ && !(Num(partial + Num(static_cast<long>(remaining)) * clock) < *best_)) return;
    for (std::size_t j = 0; j < instance_.size(); ++j) {
      if (used_[j]) continue;
      used_[j] = true;
      const auto& job = instance_[j];
      const Num untested = clock + job.upper;
      visit(untested, Num(partial + untested), remaining - 1);
      const Num tested = clock + 1 + job.proc;
      visit(tested, Num(partial + tested), remaining - 1);
      used_[j] = false;
    }
  }

  const Instance<Num>& instance_;
  std::vector<bool> used_;
  std::optional<Num> best_;
};

}  // namespace detail

/// Exhaustive optimum over every job order and every test subset (n <= 10).
///
/// Searching only schedules where a tested job executes immediately after its test
/// loses nothing: postponing a test until just before its execution moves every
/// action in between one unit earlier and leaves the job itself unchanged. The
/// unrestricted interleaving search in the test suite confirms this on small
/// instances.
template <Numeric Num>
Num brute_force_optimum(const Instance<Num>& instance, Objective objective) {
  const std::size_t n = instance.size();
  if (n > 10) throw std::invalid_argument("brute_force_optimum refuses n > 10");
  if (n == 0) return Num(0);
  if (objective == Objective::Makespan) {
    std::optional<Num> best;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Num length(0);
      for (std::size_t j = 0; j < n; ++j) {
        length += (mask >> j & 1U) ? Num(instance[j].proc + 1) : instance[j].upper;
      }
      if (!best || length < *best) best = length;
    }
    return *best;
  }
  return detail::SumSearch<Num>(instance).solve();
}

}  // namespace swt

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "swt/algorithms.hpp"
#include "swt/analysis.hpp"
#include "swt/generators.hpp"
#include "swt/offline.hpp"
#include "swt/registry.hpp"

namespace {

using namespace swt;

template <class Alg, class Num>
Num cost(Alg&& alg, const Instance<Num>& instance) {
  return run(alg, instance).total_completion;
}

Instance<double> uniform(double upper, const std::vector<double>& procs) {
  std::vector<std::pair<double, double>> pairs;
  for (double p : procs) pairs.emplace_back(upper, p);
  return Instance<double>::from_pairs(pairs);
}

Instance<Rational> random_rational(std::mt19937_64& rng, std::size_t max_n) {
  RandomMixedProfile profile;
  profile.n = 1 + rng() % max_n;
  profile.grid = 4;
  return gen_random_mixed<Rational>(profile, rng());
}

TEST(Preprocess, SortsSmallLimits) {
  EXPECT_EQ(preprocess_small_limits<double>({3.0, 1.2, 0.5}, 2.0), (std::vector<std::size_t>{2, 1}));
  EXPECT_TRUE(preprocess_small_limits<double>({3.0, 2.0}, 2.0).empty());
  EXPECT_EQ(preprocess_small_limits<double>({1.0, 1.0, 1.0}, 2.0), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Threshold, MatchesReferenceSchedule) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto instance = random_rational(rng, 15);
    EXPECT_EQ(cost(ThresholdAlgorithm<Rational>(), instance), oracle::threshold_cost(instance));
    EXPECT_EQ(cost(ThresholdAlgorithm<Rational>(true), instance), oracle::threshold_cost(instance, true));
  }
}

TEST(Threshold, WorstCaseFamilyClosedForm) {
  const double eps = 1e-6;
  for (std::size_t a = 0; a <= 6; ++a) {
    for (std::size_t b = 0; b <= 6; ++b) {
      for (std::size_t c = 0; c <= 6; ++c) {
        if (a + b + c == 0) continue;
        const auto instance = gen_threshold_worstcase<double>(a, b, c, eps);
        const double alg = cost(ThresholdAlgorithm<double>(), instance);
        const double opt = optimal_sum(instance).cost;
        EXPECT_NEAR(alg, oracle::threshold_family_alg(a, b, c, eps), 1e-9 * alg);
        EXPECT_NEAR(opt, oracle::threshold_family_opt(a, b, c, eps), 1e-9 * opt);
      }
    }
  }
}

TEST(Threshold, FamilyRatioAtOnes) {
  const auto instance = gen_threshold_worstcase<Rational>(1, 1, 1, 0.0);
  EXPECT_EQ(cost(ThresholdAlgorithm<Rational>(), instance), Rational(16));
  EXPECT_EQ(optimal_sum(instance).cost, Rational(9));
}

TEST(Threshold, SingleJobExamples) {
  EXPECT_EQ(cost(ThresholdAlgorithm<double>(), uniform(4.0, {4.0})), 5.0);
  const Rational upper = Rational(2) - Rational(1, 1000000);
  const auto tight = Instance<Rational>::from_pairs({{upper, Rational(0)}});
  EXPECT_EQ(cost(ThresholdAlgorithm<Rational>(), tight), upper);
}

TEST(Threshold, LimitTwoIsTested) {
  const auto trace = run(*std::make_unique<ThresholdAlgorithm<double>>(), uniform(2.0, {0.0}));
  EXPECT_EQ(trace.actions.front().action.kind, ActionKind::Test);
}

TEST(DelayAll, ZeroJobsCostNSquared) {
  for (std::size_t n : {1u, 2u, 5u, 30u}) {
    const auto instance = uniform(2.0, std::vector<double>(n, 0.0));
    const double nn = static_cast<double>(n);
    EXPECT_EQ(cost(ThresholdAlgorithm<double>(true), instance), nn * nn);
    EXPECT_EQ(cost(ThresholdAlgorithm<double>(), instance), nn * (nn + 1) / 2);
  }
}

TEST(DelayAll, MixedExample) {
  EXPECT_EQ(cost(ThresholdAlgorithm<double>(true), uniform(2.0, {0.0, 0.0, 2.0})), 11.0);
}

TEST(Threshold, TwoCompetitiveOnRandomCorpus) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto instance = random_rational(rng, 30);
    const Rational opt = optimal_sum(instance).cost;
    EXPECT_LE(cost(ThresholdAlgorithm<Rational>(), instance), 2 * opt);
    EXPECT_LE(cost(ThresholdAlgorithm<Rational>(true), instance), 2 * opt);
  }
}

TEST(RandomParams, Validates) {
  EXPECT_THROW((RandomParams{0.5, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((RandomParams{3.0, 2.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(RandomParams{}.validate());
}

TEST(Random, LongSingleJobCostsFour) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_EQ(cost(RandomAlgorithm<double>(RandomParams{}, seed), uniform(3.0, {3.0})), 4.0);
  }
}

TEST(Random, TestOrderIsSeededPermutation) {
  const auto instance = uniform(3.0, std::vector<double>(20, 1.0));
  RandomAlgorithm<double> a(RandomParams{}, 1);
  RandomAlgorithm<double> b(RandomParams{}, 1);
  RandomAlgorithm<double> c(RandomParams{}, 2);
  run(a, instance);
  run(b, instance);
  run(c, instance);
  EXPECT_EQ(a.test_order(), b.test_order());
  EXPECT_NE(a.test_order(), c.test_order());
  auto sorted = a.test_order();
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < sorted.size(); ++j) EXPECT_EQ(sorted[j], j);
}

TEST(Random, ExactExpectationMatchesPermutationOracle) {
  std::mt19937_64 rng(3);
  const RandomParams params{1.75, 2.5};
  for (int i = 0; i < 40; ++i) {
    const auto instance = random_rational(rng, 6);
    ExpectationOptions options;
    options.mode = ExpectationMode::Exact;
    const auto e = run_expected<Rational>(random_spec<Rational>(params), static_source_factory(instance),
                                          [](const Instance<Rational>& x) { return optimal_sum(x).cost; }, options);
    EXPECT_EQ(e.mean, oracle::random_expectation(instance, Rational(7, 4), Rational(5, 2)));
  }
}

TEST(Random, EnumerationDeclinesLargeSupport) {
  const auto spec = random_spec<double>(RandomParams{});
  View<double> view{9, std::vector<double>(9, 3.0)};
  bool visited = false;
  EXPECT_FALSE(spec.enumerate(view, [&](const double&, Algorithm<double>&) { visited = true; }));
  EXPECT_FALSE(visited);
}

TEST(Beat, AllZeroJobs) {
  for (std::size_t n : {1u, 4u, 25u}) {
    const double nn = static_cast<double>(n);
    EXPECT_EQ(cost(BeatAlgorithm<double>(), uniform(2.0, std::vector<double>(n, 0.0))), nn * (nn + 1) / 2);
  }
}

TEST(Beat, SingleLongJob) { EXPECT_EQ(cost(BeatAlgorithm<double>(), uniform(3.0, {3.0})), 4.0); }

TEST(Beat, AccumulatorInvariants) {
  for (double upper : {1.95, 2.0, 2.2}) {
    for (const auto& procs : {std::vector<double>(40, upper), std::vector<double>{upper, upper, 0.0, 1.0, upper, 0.0}}) {
      BeatAlgorithm<double> alg;
      run(alg, uniform(upper, procs));
      for (const auto& step : alg.steps()) {
        if (step.deferred_execution) EXPECT_LE(step.total_exec, step.total_test);
        if (step.long_pending) EXPECT_GE(step.total_exec, step.total_test - upper);
      }
    }
  }
}

TEST(Beat, FirstDeferredAfterTwoTests) {
  BeatAlgorithm<double> alg;
  const auto trace = run(alg, uniform(2.0, std::vector<double>(6, 2.0)));
  std::vector<ActionKind> kinds;
  for (const auto& s : trace.actions) kinds.push_back(s.action.kind);
  ASSERT_GE(kinds.size(), 3u);
  EXPECT_EQ(kinds[0], ActionKind::Test);
  EXPECT_EQ(kinds[1], ActionKind::Test);
  EXPECT_EQ(kinds[2], ActionKind::ExecuteTested);
}

TEST(Beat, RejectsNonUniformLimits) {
  BeatAlgorithm<double> alg;
  EXPECT_THROW(run(alg, Instance<double>::from_pairs({{2.0, 0.0}, {3.0, 0.0}})), ConfigurationError);
}

TEST(Combined, Dispatch) {
  const auto dispatched = [](double upper) {
    CombinedAlgorithm<double> alg(CombinedThresholds{});
    run(alg, uniform(upper, {0.0, 0.0}));
    return alg.dispatched();
  };
  EXPECT_EQ(dispatched(1.5), "untested");
  EXPECT_EQ(dispatched(2.0), "beat");
  EXPECT_EQ(dispatched(3.0), "threshold");
  EXPECT_EQ(dispatched(1.9338), "beat");
  EXPECT_EQ(dispatched(2.2948), "beat");
}

TEST(Combined, UntestedRatioIsLimit) {
  const auto instance = uniform(1.5, std::vector<double>(10, 0.0));
  EXPECT_DOUBLE_EQ(cost(CombinedAlgorithm<double>(CombinedThresholds{}), instance) / optimal_sum(instance).cost, 1.5);
}

TEST(Combined, RejectsBadThresholds) {
  EXPECT_THROW(CombinedAlgorithm<double>(CombinedThresholds{2.5, 2.0}), ConfigurationError);
}

TEST(Ute, BelowRhoRunsUntested) {
  UteAlgorithm<double> alg(UteParams{});
  const auto trace = run(alg, uniform(1.8, {0.0, 1.8}));
  for (const auto& s : trace.actions) EXPECT_EQ(s.action.kind, ActionKind::ExecuteUntested);
}

TEST(Ute, PrefixFollowsBeta) {
  const UteParams params;
  EXPECT_NEAR(params.p_star(), 2.796077, 1e-6);
  for (double upper : {1.9, 2.2, 2.7, 2.9, 3.5}) {
    UteAlgorithm<double> alg(params);
    run(alg, uniform(upper, std::vector<double>(100, 0.0)));
    const double beta = params.beta(upper);
    const std::size_t expected = beta > 0 ? static_cast<std::size_t>(std::ceil(beta * 100 - 1e-9)) : 0;
    EXPECT_EQ(alg.prefix(), expected) << upper;
    if (upper >= params.p_star()) EXPECT_EQ(alg.prefix(), 0u);
  }
  EXPECT_NEAR(ute_beta<double>(params.rho, params.rho), 0.2869, 1e-4);
}

TEST(Ute, DefersLongJobsAfterPrefix) {
  UteAlgorithm<double> alg(UteParams{});
  const auto trace = run(alg, uniform(3.0, {3.0, 0.0, 3.0}));
  // No prefix at p_bar = 3: long jobs wait, the zero job runs right after its test.
  std::vector<Action> expected = {Action::test(0), Action::test(1), Action::execute_tested(1),
                                  Action::test(2), Action::execute_tested(0), Action::execute_tested(2)};
  ASSERT_EQ(trace.actions.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(trace.actions[i].action, expected[i]);
}

TEST(MakespanDet, Examples) {
  const double phi = kGoldenRatio;
  const auto makespan = [](const Instance<double>& i) {
    MakespanDetAlgorithm<double> alg;
    return run(alg, i).makespan;
  };
  EXPECT_EQ(makespan(uniform(phi, {phi})), phi);
  EXPECT_EQ(makespan(uniform(2.0, {2.0})), 3.0);
  EXPECT_EQ(makespan(uniform(phi + 0.01, {0.0})), 1.0);
}

TEST(MakespanDet, ExactGoldenComparison) {
  EXPECT_FALSE(exceeds_golden_ratio<Rational>(Rational(1618, 1000)));
  EXPECT_TRUE(exceeds_golden_ratio<Rational>(Rational(1619, 1000)));
  EXPECT_FALSE(exceeds_golden_ratio<Rational>(Rational(1, 2)));
}

TEST(MakespanRand, TestProbability) {
  EXPECT_EQ(makespan_test_probability<Rational>(Rational(2)), Rational(2, 3));
  EXPECT_EQ(makespan_test_probability<Rational>(Rational(1, 2)), Rational(0));
  EXPECT_EQ(makespan_test_probability<Rational>(Rational(1)), Rational(0));
}

TEST(MakespanRand, ExpectedCosts) {
  const auto zero = Instance<Rational>::from_pairs({{Rational(2), Rational(0)}});
  const auto full = Instance<Rational>::from_pairs({{Rational(2), Rational(2)}});
  EXPECT_EQ(makespan_rand_expected(zero), Rational(4, 3));
  EXPECT_EQ(makespan_rand_expected(full), Rational(8, 3));
  ExpectationOptions options;
  options.mode = ExpectationMode::Exact;
  options.objective = Objective::Makespan;
  const auto e = run_expected<Rational>(makespan_rand_spec<Rational>(), static_source_factory(full),
                                        [](const Instance<Rational>& i) { return optimal_makespan(i); }, options);
  EXPECT_EQ(e.mean, Rational(8, 3));
  EXPECT_EQ(e.mean / e.opt_mean, Rational(4, 3));
}

TEST(MakespanRand, ExpectationMatchesClosedFormOnManyJobs) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto instance = random_rational(rng, 8);
    ExpectationOptions options;
    options.mode = ExpectationMode::Exact;
    options.objective = Objective::Makespan;
    const auto e = run_expected<Rational>(makespan_rand_spec<Rational>(), static_source_factory(instance),
                                          [](const Instance<Rational>& x) { return optimal_makespan(x); }, options);
    EXPECT_EQ(e.mean, makespan_rand_expected(instance));
    EXPECT_LE(e.mean, Rational(4, 3) * e.opt_mean);
  }
}

TEST(Family, ScheduleStructure) {
  ScheduleFamilyAlgorithm<double> alg(0.2, 0.3);
  const auto trace = run(alg, uniform(2.0, std::vector<double>(10, 0.0)));
  std::size_t untested = 0;
  for (const auto& s : trace.actions) untested += s.action.kind == ActionKind::ExecuteUntested ? 1 : 0;
  EXPECT_EQ(untested, 2u);
  EXPECT_EQ(trace.actions[0].action, Action::execute_untested(0));
  EXPECT_EQ(trace.actions[2].action, Action::test(2));
  EXPECT_EQ(trace.actions[3].action, Action::execute_tested(2));
  EXPECT_THROW(ScheduleFamilyAlgorithm<double>(0.7, 0.5), ConfigurationError);
}

TEST(AllAlgorithms, TracesPassChecks) {
  std::mt19937_64 rng(6);
  const std::vector<std::string> general = {"threshold", "delay_all", "random", "makespan_det", "makespan_rand",
                                            "family[nu=0.1,lambda=0.3]", "untested"};
  const std::vector<std::string> uniform_only = {"beat", "combined", "ute"};
  for (int i = 0; i < 60; ++i) {
    const auto instance = random_rational(rng, 12);
    for (const auto& key : general) {
      auto alg = make_algorithm<Rational>(parse_key(key)).sample(rng());
      const auto trace = run(*alg, instance);
      EXPECT_NO_THROW(cost_of_trace(trace)) << key;
      EXPECT_NO_THROW(check_durations<Rational>(trace.actions, instance)) << key;
    }
    const Rational upper(static_cast<long>(rng() % 16), 4);
    std::vector<std::pair<Rational, Rational>> pairs;
    for (std::size_t j = 0; j < 10; ++j) pairs.emplace_back(upper, Rational(static_cast<long>(rng() % 5)) * upper / 4);
    const auto u = Instance<Rational>::from_pairs(pairs);
    for (const auto& key : uniform_only) {
      auto alg = make_algorithm<Rational>(parse_key(key)).sample(0);
      const auto trace = run(*alg, u);
      EXPECT_NO_THROW(cost_of_trace(trace)) << key;
      EXPECT_NO_THROW(check_durations<Rational>(trace.actions, u)) << key;
    }
  }
}

TEST(Registry, ParsesKeysAndRejectsUnknowns) {
  const Key key = parse_key("random[T=1.8,E=3]");
  EXPECT_EQ(key.name, "random");
  EXPECT_EQ(key.params.at("T"), "1.8");
  EXPECT_EQ(key.params.at("E"), "3");
  AlgorithmChoice choice;
  make_algorithm<double>(key, &choice);
  EXPECT_TRUE(choice.randomized);
  EXPECT_THROW(make_algorithm<double>(parse_key("nope")), std::invalid_argument);
  EXPECT_THROW(make_algorithm<double>(parse_key("threshold[x=1]")), std::invalid_argument);
  EXPECT_THROW(make_algorithm<double>(parse_key("random[T=3,E=2]")), std::invalid_argument);
  EXPECT_THROW(make_algorithm<double>(parse_key("random[T=abc]")), std::invalid_argument);
  EXPECT_THROW(parse_key("random[T=1"), std::invalid_argument);
  for (const auto& name : algorithm_names()) EXPECT_NO_THROW(make_algorithm<double>(parse_key(name))) << name;
}

}  // namespace

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "swt/engine.hpp"

namespace swt {

inline void require_fraction(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

template <Numeric Num>
class InstanceBuilder {
 public:
  void add(const Num& upper, const Num& proc, std::size_t count = 1) {
    for (std::size_t i = 0; i < count; ++i) {
      jobs_.push_back(Job<Num>{jobs_.size(), upper, proc, Num(0)});
    }
  }
  Instance<Num> build() && { return Instance<Num>(std::move(jobs_)); }

 private:
  std::vector<Job<Num>> jobs_;
};

/// Threshold's worst-case family: c long jobs (2+eps, 2+eps), then b jobs (2, 2),
/// then a jobs (2, 0). Id order puts long tests first, as in the tight example.
template <Numeric Num>
Instance<Num> gen_threshold_worstcase(std::size_t a, std::size_t b, std::size_t c, double epsilon = 1e-6) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  const Num two(2);
  const Num long_time = two + num_from<Num>(epsilon);
  InstanceBuilder<Num> out;
  out.add(long_time, long_time, c);
  out.add(two, two, b);
  out.add(two, Num(0), a);
  return std::move(out).build();
}

struct FourTypeProfile {
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double T = 1.7453;
  double E = 2.8609;
  double epsilon = 1e-6;

  void validate() const {
    require_fraction(alpha, "alpha");
    require_fraction(beta, "beta");
    require_fraction(gamma, "gamma");
    if (alpha + beta + gamma > 1.0 + 1e-12) throw std::invalid_argument("alpha + beta + gamma must be <= 1");
    if (!(1.0 <= T && T <= E)) throw std::invalid_argument("four_type needs 1 <= T <= E");
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  }
};

/// Random's worst-case family. Counts: floor(alpha n) type T (p = upper = T),
/// floor(beta n) type E (p = upper = E), floor(gamma n) type E+ (p = upper = E+eps);
/// the remainder is type 0 (upper T, p = 0). Id order: type 0, T, E, E+.
template <Numeric Num>
Instance<Num> gen_four_type(const FourTypeProfile& profile) {
  profile.validate();
  const std::size_t n = profile.n;
  const std::size_t na = fraction_count(profile.alpha, n);
  const std::size_t nb = fraction_count(profile.beta, n);
  const std::size_t nc = fraction_count(profile.gamma, n);
  if (na + nb + nc > n) throw std::invalid_argument("fraction counts exceed n");
  const Num t = num_from<Num>(profile.T);
  const Num e = num_from<Num>(profile.E);
  const Num e_plus = e + num_from<Num>(profile.epsilon);
  InstanceBuilder<Num> out;
  out.add(t, Num(0), n - na - nb - nc);
  out.add(t, t, na);
  out.add(e, e, nb);
  out.add(e_plus, e_plus, nc);
  return std::move(out).build();
}

struct DetLbProfile {
  std::size_t n = 0;
  double delta = 0.6306655;
  double p_bar = 1.9896202;

  void validate() const {
    require_fraction(delta, "delta");
    if (!(p_bar > 1.0)) throw std::invalid_argument("p_bar must be > 1");
  }
};

/// Adaptive adversary for the deterministic lower bound. All jobs have upper limit
/// p_bar. The k-th distinct job touched gets p = p_bar if it was tested and
/// k <= floor(delta n), and p = 0 otherwise; the value is committed at the touch.
template <Numeric Num>
class DetLbAdversary final : public RevealSource<Num> {
 public:
  explicit DetLbAdversary(const DetLbProfile& profile)
      : upper_(num_from<Num>(profile.p_bar)),
        long_budget_(fraction_count(profile.delta, profile.n)),
        proc_(profile.n),
        committed_(profile.n, false) {
    profile.validate();
  }

  std::vector<Num> upper_limits() const override { return std::vector<Num>(proc_.size(), upper_); }

  void touch(std::size_t job, bool tested) override {
    if (committed_.at(job)) return;
    committed_[job] = true;
    ++touched_;
    const bool is_long = tested && touched_ <= long_budget_;
    proc_[job] = is_long ? upper_ : Num(0);
    if (is_long) ++long_jobs_;
  }

  Num reveal(std::size_t job) override {
    if (!committed_.at(job)) throw AdversaryError("reveal before touch");
    return proc_[job];
  }

  Instance<Num> realized() const override {
    std::vector<Job<Num>> jobs;
    jobs.reserve(proc_.size());
    for (std::size_t j = 0; j < proc_.size(); ++j) jobs.push_back(Job<Num>{j, upper_, proc_[j], Num(0)});
    return Instance<Num>(std::move(jobs));
  }

  std::size_t long_budget() const { return long_budget_; }
  std::size_t long_jobs() const { return long_jobs_; }

 private:
  Num upper_;
  std::size_t long_budget_;
  std::vector<Num> proc_;
  std::vector<bool> committed_;
  std::size_t touched_ = 0;
  std::size_t long_jobs_ = 0;
};

struct RandLbProfile {
  std::size_t n = 0;
  double q = 0.42264973081037427;  // 1 - 1/sqrt(3)

  void validate() const {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  }
};

/// Yao distribution: every job has upper 1/q and p = 0 w.p. q, p = 1/q otherwise.
template <Numeric Num>
Instance<Num> gen_rand_lb(const RandLbProfile& profile, std::uint64_t seed) {
  profile.validate();
  const Num upper = Num(1) / num_from<Num>(profile.q);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution zero(profile.q);
  InstanceBuilder<Num> out;
  for (std::size_t j = 0; j < profile.n; ++j) out.add(upper, zero(rng) ? Num(0) : upper);
  return std::move(out).build();
}

struct ExtremeUniformProfile {
  std::size_t n = 0;
  double p_bar = 2.0;
  double gamma = 0.0;  // fraction of zero jobs

  void validate() const {
    require_fraction(gamma, "gamma");
    if (p_bar < 0.0) throw std::invalid_argument("p_bar must be >= 0");
  }
};

/// floor((1 - gamma) n) jobs with p = p_bar first, then the zero jobs.
template <Numeric Num>
Instance<Num> gen_extreme_uniform(const ExtremeUniformProfile& profile) {
  profile.validate();
  const std::size_t longs = fraction_count(1.0 - profile.gamma, profile.n);
  const Num upper = num_from<Num>(profile.p_bar);
  InstanceBuilder<Num> out;
  out.add(upper, upper, longs);
  out.add(upper, Num(0), profile.n - longs);
  return std::move(out).build();
}

struct UniformMixedProfile {
  std::size_t n = 0;
  double p_bar = 2.0;
  double long_fraction = 0.0;   // p = p_bar
  double short_fraction = 0.0;  // p = E = max{1, p_bar - 1}
  std::optional<double> middle;  // one extra job with p in (E, p_bar)

  double short_limit() const { return std::max(1.0, p_bar - 1.0); }

  void validate() const {
    require_fraction(long_fraction, "long fraction");
    require_fraction(short_fraction, "short fraction");
    if (long_fraction + short_fraction > 1.0 + 1e-12) throw std::invalid_argument("fractions must sum to <= 1");
    if (p_bar < 1.0) throw std::invalid_argument("p_bar must be >= 1");
    if (middle && !(*middle > short_limit() && *middle < p_bar)) {
      throw std::invalid_argument("middle job must satisfy E < p < p_bar");
    }
  }
};

/// Beat's worst-case shape: uniform upper p_bar and p in {0, E, p_bar} plus at most
/// one job strictly between E and p_bar. Ids follow decreasing p: long, middle, E, zero.
template <Numeric Num>
Instance<Num> gen_uniform_mixed(const UniformMixedProfile& profile) {
  profile.validate();
  const std::size_t n = profile.n;
  const std::size_t extra = profile.middle ? 1 : 0;
  if (extra > n) throw std::invalid_argument("n too small for a middle job");
  const std::size_t longs = std::min(n - extra, fraction_count(profile.long_fraction, n));
  const std::size_t shorts = std::min(n - extra - longs, fraction_count(profile.short_fraction, n));
  const Num upper = num_from<Num>(profile.p_bar);
  InstanceBuilder<Num> out;
  out.add(upper, upper, longs);
  if (profile.middle) out.add(upper, num_from<Num>(*profile.middle));
  out.add(upper, num_from<Num>(profile.short_limit()), shorts);
  out.add(upper, Num(0), n - extra - longs - shorts);
  return std::move(out).build();
}

struct ThresholdUniformProfile {
  std::size_t n = 0;
  double p_bar = 3.0;
  double alpha = 0.0;  // p = 0
  double beta = 0.0;   // p = 2

  void validate() const {
    require_fraction(alpha, "alpha");
    require_fraction(beta, "beta");
    if (alpha + beta > 1.0 + 1e-12) throw std::invalid_argument("alpha + beta must be <= 1");
    if (!(p_bar > 2.0)) throw std::invalid_argument("p_bar must be > 2");
  }
};

/// Threshold's worst case for uniform limits: the remaining gamma = 1 - alpha - beta
/// share has p = p_bar and comes first, then the p = 2 jobs, then the p = 0 jobs.
template <Numeric Num>
Instance<Num> gen_threshold_uniform(const ThresholdUniformProfile& profile) {
  profile.validate();
  const std::size_t n = profile.n;
  const std::size_t zeros = fraction_count(profile.alpha, n);
  const std::size_t twos = std::min(n - zeros, fraction_count(profile.beta, n));
  const Num upper = num_from<Num>(profile.p_bar);
  InstanceBuilder<Num> out;
  out.add(upper, upper, n - zeros - twos);
  out.add(upper, Num(2), twos);
  out.add(upper, Num(0), zeros);
  return std::move(out).build();
}

struct RandomMixedProfile {
  std::size_t n = 0;
  double max_upper = 5.0;
  std::size_t grid = 4;  // values are multiples of 1/grid
};

/// Random instance with limits and processing times on a 1/grid lattice, so rational
/// and float modes see the same values.
template <Numeric Num>
Instance<Num> gen_random_mixed(const RandomMixedProfile& profile, std::uint64_t seed) {
  if (profile.grid == 0) throw std::invalid_argument("grid must be >= 1");
  if (profile.max_upper < 0.0) throw std::invalid_argument("max_upper must be >= 0");
  const auto steps = static_cast<std::int64_t>(profile.max_upper * static_cast<double>(profile.grid));
  const auto den = static_cast<std::int64_t>(profile.grid);
  std::mt19937_64 rng(seed);
  InstanceBuilder<Num> out;
  for (std::size_t j = 0; j < profile.n; ++j) {
    const std::int64_t u = std::uniform_int_distribution<std::int64_t>(0, steps)(rng);
    const std::int64_t p = std::uniform_int_distribution<std::int64_t>(0, u)(rng);
    out.add(num_ratio<Num>(u, den), num_ratio<Num>(p, den));
  }
  return std::move(out).build();
}

}  // namespace swt

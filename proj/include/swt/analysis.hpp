#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "swt/algorithms.hpp"
#include "swt/numeric.hpp"

namespace swt {

/// A root finder or optimizer could not bracket or converge.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numerics {

inline constexpr double kTolerance = 1e-9;

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section minimum of `f` on [a, b]; the endpoints are compared explicitly.
inline Extremum golden_min(const std::function<double(double)>& f, double a, double b,
                           double tol = kTolerance) {
  if (!(a <= b)) throw std::invalid_argument("golden_min needs a <= b");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a;
  double hi = b;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  Extremum best{0.5 * (lo + hi), f(0.5 * (lo + hi))};
  for (double x : {a, b}) {
    const double v = f(x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

inline Extremum golden_max(const std::function<double(double)>& f, double a, double b,
                           double tol = kTolerance) {
  const Extremum m = golden_min([&](double x) { return -f(x); }, a, b, tol);
  return {m.x, -m.value};
}

/// Grid scan followed by golden-section refinement around the best grid cell.
/// Robust for functions with a few isolated local extrema.
inline Extremum scan_min(const std::function<double(double)>& f, double a, double b,
                         std::size_t cells = 2000) {
  const double h = (b - a) / static_cast<double>(cells);
  std::size_t best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= cells; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double lo = std::max(a, a + h * (static_cast<double>(best_i) - 1.0));
  const double hi = std::min(b, a + h * (static_cast<double>(best_i) + 1.0));
  return golden_min(f, lo, hi);
}

inline Extremum scan_max(const std::function<double(double)>& f, double a, double b,
                         std::size_t cells = 2000) {
  const Extremum m = scan_min([&](double x) { return -f(x); }, a, b, cells);
  return {m.x, -m.value};
}

/// Root of `f` on [a, b] by bisection; requires a sign change.
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) {
    throw NumericFailure("no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

struct Extremum2 {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Maximum of f over [x0, x1] x [y0, y1]: a 200 x 200 grid, then alternating
/// golden-section line searches in a box shrinking around the incumbent.
inline Extremum2 grid_max_2d(const std::function<double(double, double)>& f, double x0, double x1,
                             double y0, double y1, std::size_t cells = 200) {
  Extremum2 best{x0, y0, -std::numeric_limits<double>::infinity()};
  const double hx = (x1 - x0) / static_cast<double>(cells);
  const double hy = (y1 - y0) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) {
    for (std::size_t j = 0; j <= cells; ++j) {
      const double x = x0 + hx * static_cast<double>(i);
      const double y = y0 + hy * static_cast<double>(j);
      const double v = f(x, y);
      if (v > best.value) best = {x, y, v};
    }
  }
  double rx = hx;
  double ry = hy;
  for (int round = 0; round < 60; ++round) {
    const double before = best.value;
    const Extremum ex = golden_max([&](double x) { return f(x, best.y); }, std::max(x0, best.x - rx),
                                   std::min(x1, best.x + rx), 1e-12);
    if (ex.value >= best.value) best = {ex.x, best.y, ex.value};
    const Extremum ey = golden_max([&](double y) { return f(best.x, y); }, std::max(y0, best.y - ry),
                                   std::min(y1, best.y + ry), 1e-12);
    if (ey.value >= best.value) best = {best.x, ey.x, ey.value};
    if (best.value - before < 1e-15 && round > 5) break;
  }
  return best;
}

}  // namespace numerics

// ---------------------------------------------------------------------------
// Deterministic lower bound.

/// Algorithm fractions (nu untested, lambda tested-and-run) against the adversary's
/// (delta, p_bar).
struct DetLbPoint {
  double nu = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  double p_bar = 2.0;

  void validate() const {
    if (nu < 0.0 || lambda < 0.0) throw std::invalid_argument("nu, lambda must be >= 0");
    if (nu + lambda > delta + 1e-12) throw std::invalid_argument("nu + lambda must be <= delta");
    if (delta > 1.0) throw std::invalid_argument("delta must be <= 1");
  }
};

/// n^2 coefficient of the (nu, lambda) schedule's cost against the adversary.
inline double det_lb_alg(const DetLbPoint& pt) {
  pt.validate();
  const double nu = pt.nu;
  const double l = pt.lambda;
  const double d = pt.delta;
  const double p = pt.p_bar;
  return 0.5 * (1.0 + 2.0 * d * (1.0 - nu * p) + d * d * (p - 1.0) + 2.0 * nu * (nu + p - 2.0) + l * l +
                2.0 * l * (nu + p - 1.0 - d * p));
}

/// n^2 coefficient of the optimum on the realized adversary instance.
inline double det_lb_opt(double nu, double delta, double p_bar) {
  if (!(0.0 <= nu && nu <= delta + 1e-12 && delta <= 1.0)) {
    throw std::invalid_argument("det_lb_opt needs 0 <= nu <= delta <= 1");
  }
  const double gap = delta - nu;
  return 0.5 * (1.0 + gap * gap * (p_bar - 1.0));
}

/// The lambda minimizing the algorithm cost is 1 + delta p_bar - p_bar - nu.
inline double det_lb_tau(double delta, double p_bar) { return 1.0 + delta * p_bar - p_bar; }

/// Algorithm's best lambda for a given nu: max{0, tau - nu}, capped by delta - nu.
inline double det_lb_best_lambda(double nu, double delta, double p_bar) {
  return std::clamp(det_lb_tau(delta, p_bar) - nu, 0.0, std::max(0.0, delta - nu));
}

inline double det_lb_ratio_at(double nu, double delta, double p_bar) {
  const double lambda = det_lb_best_lambda(nu, delta, p_bar);
  return det_lb_alg({nu, lambda, delta, p_bar}) / det_lb_opt(nu, delta, p_bar);
}

struct DetLbValue {
  double ratio = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
};

/// min over (nu, lambda) of the cost ratio for fixed (delta, p_bar): lambda follows
/// the closed-form case split, nu is found by scan plus golden section on [0, delta].
inline DetLbValue det_lb_value(double delta, double p_bar) {
  if (!(0.0 <= delta && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (!(p_bar > 1.0)) throw std::invalid_argument("p_bar must be > 1");
  const auto best = numerics::scan_min([&](double nu) { return det_lb_ratio_at(nu, delta, p_bar); }, 0.0,
                                       delta);
  return {best.value, best.x, det_lb_best_lambda(best.x, delta, p_bar)};
}

/// Independent cross-check of det_lb_value: brute 2-D grid over (nu, lambda).
inline double det_lb_value_grid(double delta, double p_bar, std::size_t cells = 400) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= cells; ++i) {
    const double nu = delta * static_cast<double>(i) / static_cast<double>(cells);
    for (std::size_t j = 0; j <= cells; ++j) {
      const double lambda = (delta - nu) * static_cast<double>(j) / static_cast<double>(cells);
      best = std::min(best, det_lb_alg({nu, lambda, delta, p_bar}) / det_lb_opt(nu, delta, p_bar));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random: worst-case costs and parameter conditions.

/// Cost coefficients of Random and the optimum on the four-type family:
/// ALG = n^2/2 alg2 + n/2 alg1, OPT = n^2/2 opt2 + n/2 opt1. `eps` is the gap of
/// the E+ jobs above E; pass 0 for the limit.
template <Numeric Num>
struct RandomCosts {
  Num alg2{};
  Num alg1{};
  Num opt2{};
  Num opt1{};
};

template <Numeric Num>
RandomCosts<Num> random_costs(const Num& a, const Num& b, const Num& g, const Num& T, const Num& E,
                              const Num& eps = Num(0)) {
  const Num ep = E + eps;
  const Num s = a + b + g;
  RandomCosts<Num> c;
  c.alg2 = Num(1) + g + b * E + b * g * E + g * g * ep + a * T + a * g * T;
  c.alg1 = Num(1) - g + b * E + g * ep + a * T;
  c.opt2 = Num(1) - s * s + b * b * E + Num(2) * b * g * E + g * g * ep + a * a * T + Num(2) * a * b * T +
           Num(2) * a * g * T;
  c.opt1 = Num(1) - s + b * E + g * ep + a * T;
  return c;
}

/// T OPT_2 - ALG_2 in the eps -> 0 limit; nonnegative over the validity polytope
/// exactly when Random is T-competitive to leading order.
inline double random_G(double T, double E, double a, double b, double g) {
  return T * (1.0 + (b + g) * (b + g) * (E - 1.0) + a * a * (T - 1.0) + 2.0 * a * (b + g) * (T - 1.0) - a -
              a * g) -
         g - 1.0 - E * (g * g + b * g + b);
}

using ConditionVector = std::array<double, 8>;

/// Left-hand sides of the eight conditions on (T, E); all must be >= 0.
inline ConditionVector random_conditions(double T, double E) {
  if (!(T > 1.0 && E > 1.0)) throw std::invalid_argument("random_conditions needs T, E > 1");
  const double t1 = T - 1.0;
  return {
      E * E * t1 * t1 + T * (2.0 * T - 1.0) - E * T * T,
      4.0 * t1 - 1.0 / t1 - E / T,
      T * t1 - 0.75 - E / (4.0 * T),
      4.0 * E * (1.0 - (2.0 - T) * T * T) - std::pow(2.0 * T * t1 - 1.0, 2),
      E * t1 - 2.0,
      4.0 * T - 5.0 - 1.0 / t1,
      4.0 * t1 - E * E / (T * (E - 1.0)),
      t1 - 1.0 / (4.0 * (E * T - E - T)),
  };
}

/// E on the zero set of condition (2) for a given T.
inline double random_E_on_cond2(double T) { return T * (4.0 * (T - 1.0) - 1.0 / (T - 1.0)); }

/// Intersection of conditions (2) and (4) with T above the golden ratio.
inline RandomParams solve_random_params() {
  const auto cond4 = [](double T) { return random_conditions(T, random_E_on_cond2(T))[3]; };
  const double T = numerics::bisect(cond4, 1.6181, 1.9);
  const double E = random_E_on_cond2(T);
  if (!(T > kGoldenRatio && E >= 2.5 && E <= 3.2)) {
    throw NumericFailure("random parameter root outside the search box");
  }
  return {T, E};
}

/// Interior stationary point of G (may fall outside the validity polytope).
struct FractionPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

inline FractionPoint random_interior_candidate(double T, double E) {
  FractionPoint p;
  p.gamma = (E * (T - 1.0) - T) * (2.0 * T - 1.0) / (E * (T - 1.0) + T);
  p.beta = (1.0 + p.gamma - 2.0 * p.gamma * T) / (2.0 * T);
  p.alpha = p.beta - p.gamma + (1.0 + p.gamma) / (2.0 * (T - 1.0));
  return p;
}

/// Minimizer of G on the facet gamma = 0; binds condition (2).
inline FractionPoint random_facet_candidate(double T) {
  const double beta = 1.0 / (2.0 * T);
  return {1.0 / (2.0 * (T - 1.0)) - beta, beta, 0.0};
}

/// Minimizer of G on the edge (x, 0, 1 - x); binds condition (4).
inline FractionPoint random_edge_candidate(double T, double E) {
  const double x = (2.0 * E * T + 2.0 * T - 2.0 * T * T - 2.0 * E - 1.0) / (2.0 * (E - T) * (T - 1.0));
  return {x, 0.0, 1.0 - x};
}

// ---------------------------------------------------------------------------
// Randomized lower bound.

inline void require_probability(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
}

inline double rand_lb_value(double q) {
  require_probability(q);
  return (1.0 / q) / (1.0 / q + 3.0 * q - 2.0 - q * q);
}

/// Exact E[OPT] for n jobs drawn from the distribution.
inline double rand_lb_expected_opt(std::size_t n, double q) {
  require_probability(q);
  const double nn = static_cast<double>(n);
  const double ez = nn * q;
  const double ez2 = nn * nn * q * q + nn * q * (1.0 - q);
  // Z(Z+1)/2 + Z(n-Z) + (n-Z)(n-Z+1)/(2q), expanded in moments of Z.
  const double first = 0.5 * (ez2 + ez);
  const double second = nn * ez - ez2;
  const double third = (nn * nn - 2.0 * nn * ez + ez2 + nn - ez) / (2.0 * q);
  return first + second + third;
}

/// Leading term of E[OPT]: n^2/2 (1/q + 3q - 2 - q^2).
inline double rand_lb_opt_leading(std::size_t n, double q) {
  require_probability(q);
  const double nn = static_cast<double>(n);
  return nn * nn / 2.0 * (1.0 / q + 3.0 * q - 2.0 - q * q);
}

/// Every deterministic algorithm pays at least n^2/(2q) in expectation.
inline double rand_lb_alg_bound(std::size_t n, double q) {
  require_probability(q);
  const double nn = static_cast<double>(n);
  return nn * nn / (2.0 * q);
}

inline numerics::Extremum maximize_rand_lb() {
  return numerics::golden_max(rand_lb_value, 1e-6, 1.0 - 1e-6, 1e-12);
}

// ---------------------------------------------------------------------------
// Beat, Threshold and the combined algorithm for uniform upper limits.

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error(what);
}

/// Beat's asymptotic ratio for uniform upper limit p in [1.5, 3].
inline double beat_ratio(double p) {
  require_domain(p >= 1.5 && p <= 3.0, "beat_ratio needs p_bar in [1.5, 3]");
  const double root = std::sqrt((1.0 - 2.0 * p) * (1.0 - 2.0 * p) * (4.0 * p - 3.0));
  return (1.0 + 2.0 * (p - 2.0) * p + root) / (2.0 * (p - 1.0) * p);
}

/// Beat's ratio bound with short-to-long ratio alpha and E-job share delta.
inline double beat_ratio_expression(double p, double alpha, double delta) {
  const double E = std::max(1.0, p - 1.0);
  const double a2 = alpha * alpha;
  const double num = p + 2.0 - 1.0 / p + a2 * ((1.0 + E) * (2.0 * delta - delta * delta) + (1.0 - delta) * (1.0 - delta)) +
                     2.0 * alpha * (2.0 + (1.0 - 1.0 / p) * (1.0 + E * delta));
  const double den = p + a2 * ((p - 1.0) * delta * delta + 1.0) + 2.0 * alpha * (1.0 + (p - 1.0) * delta);
  return num / den;
}

struct BeatWorstCase {
  double ratio = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
};

/// Numeric maximum of beat_ratio_expression over alpha >= 0, delta in [0, 1].
/// alpha is searched as t / (1 - t) for t in [0, 0.999].
inline BeatWorstCase beat_ratio_numeric(double p) {
  const auto f = [p](double t, double delta) { return beat_ratio_expression(p, t / (1.0 - t), delta); };
  const auto best = numerics::grid_max_2d(f, 0.0, 0.999, 0.0, 1.0);
  return {best.value, best.x / (1.0 - best.x), best.y};
}

/// Threshold's asymptotic ratio for uniform upper limit p > 2.
inline double thresh_uniform_ratio(double p) {
  require_domain(p > 2.0, "thresh_uniform_ratio needs p_bar > 2");
  if (p >= 3.0) return std::sqrt(3.0);
  return (-3.0 + p + std::sqrt(-15.0 + p * (18.0 + p))) / (2.0 * (p - 1.0));
}

/// Threshold vs optimum for p <= 3 with fractions alpha (p = 0), beta (p = 2),
/// gamma (p = p_bar).
inline double thresh_uniform_expression_low(double p, double a, double b, double g) {
  return (a * a + 3.0 * b * b + 8.0 * b * g + a * (6.0 * b + 4.0 * g) + g * g * (2.0 + p)) /
         (a * a + 2.0 * a * (b + g) + (b + g) * (b + g) * p);
}

/// Same ratio for p >= 3, where the optimum also tests the p = 2 jobs.
inline double thresh_uniform_expression_high(double p, double a, double b) {
  const double g1 = (-1.0 + a + b) * (-1.0 + a + b);
  return (2.0 - a * a - 2.0 * a * b + (4.0 - 3.0 * b) * b + p * g1) /
         (-a * a + a * (2.0 - 6.0 * b) - 3.0 * (-2.0 + b) * b + p * g1);
}

/// T1: fixpoint of beat_ratio; T2: crossing of beat_ratio and thresh_uniform_ratio.
inline CombinedThresholds solve_thresholds() {
  CombinedThresholds out;
  out.T1 = numerics::bisect([](double x) { return beat_ratio(x) - x; }, 1.8, 2.0);
  out.T2 = numerics::bisect([](double x) { return beat_ratio(x) - thresh_uniform_ratio(x); }, 2.0 + 1e-9, 2.5);
  return out;
}

/// The closed form whose only real root is T1.
inline double t1_polynomial(double p) {
  return 2.0 * p * p * p - 4.0 * p * p + 4.0 * p - 1.0 - std::sqrt((1.0 - 2.0 * p) * (1.0 - 2.0 * p) * (4.0 * p - 3.0));
}

/// Asymptotic ratio of the combined algorithm as a function of the uniform limit.
inline double combined_curve(double p, const CombinedThresholds& th) {
  require_domain(p >= 0.0, "combined_curve needs p_bar >= 0");
  if (p <= 1.0) return 1.0;
  if (p < th.T1) return p;
  if (p <= th.T2) return beat_ratio(p);
  return thresh_uniform_ratio(p);
}

// ---------------------------------------------------------------------------
// UTE.

/// UTE's ratio with beta tuned for limit p (no domain check).
inline double ute_ratio_formula(double p) {
  const double p2 = p * p;
  const double p3 = p2 * p;
  const double disc = -3.0 + 6.0 * p - 3.0 * p2 - 6.0 * p3 + 10.0 * p2 * p2 - 4.0 * p3 * p2 + p3 * p3;
  return (-1.0 - p + 2.0 * p2 - p3 + std::sqrt(disc)) / (2.0 * (p - 1.0));
}

/// UTE's ratio at limit p; valid for rho <= p <= p*(rho).
inline double ute_ratio(double p, double rho) {
  require_domain(rho > 1.0 && p >= rho - 1e-12 && p <= ute_p_star(rho) + 1e-12,
                 "ute_ratio needs rho <= p_bar <= p*(rho)");
  return ute_ratio_formula(p);
}

inline double ute_rho_star() { return (1.0 + std::sqrt(3.0 + 2.0 * std::sqrt(5.0))) / 2.0; }

/// Self-consistent ratio: the p with ute_ratio_formula(p) = p.
inline double ute_rho_fixpoint() {
  return numerics::bisect([](double p) { return ute_ratio_formula(p) - p; }, 1.5, 2.5);
}

// ---------------------------------------------------------------------------
// Makespan.

struct MakespanRatios {
  double deterministic = 0.0;
  double randomized = 0.0;
  double randomized_lower_bound = 0.0;
};

/// Deterministic: fixpoint of (1 + x)/x = x. Randomized: max of x^2/(x^2 - x + 1).
/// Lower bound: value of the single-job game at p_bar = 2, min over the test
/// probability of the worse of the two outcomes.
inline MakespanRatios makespan_ratios() {
  MakespanRatios out;
  out.deterministic = numerics::bisect([](double x) { return (1.0 + x) / x - x; }, 1.0, 2.0);
  out.randomized =
      numerics::golden_max([](double x) { return x * x / (x * x - x + 1.0); }, 1.0, 10.0, 1e-12).value;
  out.randomized_lower_bound =
      numerics::golden_min([](double x) { return std::max(2.0 - x, 1.0 + x / 2.0); }, 0.0, 1.0, 1e-12).value;
  return out;
}

}  // namespace swt

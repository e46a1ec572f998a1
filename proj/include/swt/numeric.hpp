#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace swt {

/// Exact rational time values; used for oracle equality on small instances.
using Rational = mpq_class;

template <class T>
struct NumTraits;

template <>
struct NumTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";

  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  static double from_ratio(std::int64_t num, std::int64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double floor(double x) { return std::floor(x); }
  static double ceil(double x) { return std::ceil(x); }

  // Relative tolerance for recomputed aggregates in float mode.
  static bool nearly_equal(double a, double b) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= 1e-9 * scale;
  }
};

template <>
struct NumTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";

  // mpq_class(double) is exact: every finite double is a dyadic rational.
  static Rational from_double(double x) {
    Rational r(x);
    r.canonicalize();
    return r;
  }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_ratio(std::int64_t num, std::int64_t den) {
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
  }
  static Rational floor(const Rational& x) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(q);
  }
  static Rational ceil(const Rational& x) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(q);
  }
  static bool nearly_equal(const Rational& a, const Rational& b) { return a == b; }
};

template <class T>
concept Numeric = requires(const T& a, const T& b) {
  { NumTraits<T>::exact } -> std::convertible_to<bool>;
  { NumTraits<T>::to_double(a) } -> std::convertible_to<double>;
  { a < b } -> std::convertible_to<bool>;
};

template <Numeric Num>
Num num_from(double x) {
  return NumTraits<Num>::from_double(x);
}

template <Numeric Num>
double to_double(const Num& x) {
  return NumTraits<Num>::to_double(x);
}

template <Numeric Num>
Num num_ratio(std::int64_t num, std::int64_t den) {
  return NumTraits<Num>::from_ratio(num, den);
}

template <Numeric Num>
Num num_min(const Num& a, const Num& b) {
  return b < a ? b : a;
}

template <Numeric Num>
Num num_max(const Num& a, const Num& b) {
  return a < b ? b : a;
}

/// floor(fraction * n) as a count, clamped to [0, n].
///
/// Float fractions such as 0.29 * 100 land a hair below the integer; a 1e-9
/// guard keeps grid fractions from losing a job.
inline std::size_t fraction_count(double fraction, std::size_t n) {
  const double raw = std::floor(fraction * static_cast<double>(n) + 1e-9);
  if (raw <= 0.0) return 0;
  if (raw >= static_cast<double>(n)) return n;
  return static_cast<std::size_t>(raw);
}

template <Numeric Num>
std::string num_to_string(const Num& x) {
  if constexpr (NumTraits<Num>::exact) {
    return x.get_str();
  } else {
    return std::to_string(x);
  }
}

}  // namespace swt

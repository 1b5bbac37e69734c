#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gsq {

// Raised when an internal invariant is violated. CLI maps this to exit code 3.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Raised on malformed user input. CLI maps this to exit code 2.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define GSQ_CHECK(cond, msg)                      \
  do {                                            \
    if (!(cond)) throw ::gsq::invariant_error(msg); \
  } while (0)

// Arithmetic modes. Exact mode computes with arbitrary-precision rationals
// (every event time is the root of a linear equation, hence rational) and is
// the reference for all correctness tests. Float mode trades exactness for
// speed on large instances; kinetic comparisons accept a tolerance eps.
struct ExactMode {
  using Scalar = mpq_class;
  static constexpr bool is_exact = true;
};

struct FloatMode {
  using Scalar = double;
  static constexpr bool is_exact = false;
};

inline int scalar_cmp(const mpq_class& a, const mpq_class& b) { return cmp(a, b); }
inline int scalar_cmp(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }

// Three-way compare with tolerance; used only for kinetic (time-dependent)
// value comparisons in float mode. Structural key comparisons stay exact.
inline int scalar_cmp_eps(const mpq_class& a, const mpq_class& b, double) { return cmp(a, b); }
inline int scalar_cmp_eps(double a, double b, double eps) {
  const double d = a - b;
  if (d > eps) return 1;
  if (d < -eps) return -1;
  return 0;
}

inline double to_double(const mpq_class& v) { return v.get_d(); }
inline double to_double(double v) { return v; }

// Serializes a scalar; exact values as reduced "p/q" fraction strings so that
// output is bit-identical across platforms, floats as shortest round-trip.
inline std::string scalar_to_string(const mpq_class& v) {
  mpq_class c = v;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}
inline std::string scalar_to_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {
inline bool parse_decimal_to_mpq(const std::string& s, mpq_class& out) {
  // Accepts "p/q", integers, and plain decimals ("-1.25" == -5/4).
  if (s.empty()) return false;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    try {
      mpq_class v(s);
      if (v.get_den() == 0) return false;
      v.canonicalize();
      out = v;
      return true;
    } catch (const std::invalid_argument&) {
      return false;
    }
  }
  std::string t = s;
  bool neg = false;
  std::size_t i = 0;
  if (t[i] == '+' || t[i] == '-') {
    neg = t[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_digits = -1;
  bool any = false;
  for (; i < t.size(); ++i) {
    if (t[i] == '.') {
      if (frac_digits >= 0) return false;
      frac_digits = 0;
    } else if (t[i] >= '0' && t[i] <= '9') {
      digits.push_back(t[i]);
      any = true;
      if (frac_digits >= 0) ++frac_digits;
    } else {
      return false;
    }
  }
  if (!any) return false;
  mpz_class num(digits, 10);
  mpz_class den(1);
  for (long k = 0; k < (frac_digits > 0 ? frac_digits : 0); ++k) den *= 10;
  mpq_class v(num, den);
  v.canonicalize();
  out = neg ? mpq_class(-v) : v;
  return true;
}
}  // namespace detail

template <class M>
typename M::Scalar parse_scalar(const std::string& s);

template <>
inline mpq_class parse_scalar<ExactMode>(const std::string& s) {
  mpq_class v;
  if (!detail::parse_decimal_to_mpq(s, v)) throw input_error("cannot parse number: '" + s + "'");
  return v;
}

template <>
inline double parse_scalar<FloatMode>(const std::string& s) {
  // Accept "p/q" in float mode too, so the same inputs work in both modes.
  const auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      if (den == 0) throw input_error("zero denominator: '" + s + "'");
      return num / den;
    }
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw input_error("cannot parse number: '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw input_error("cannot parse number: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw input_error("number out of range: '" + s + "'");
  }
}

// A point in time: a scalar plus a symbolic +infinity that compares greater
// than every finite time.
template <class M>
struct Time {
  typename M::Scalar value{};
  bool infinite = false;

  Time() = default;
  explicit Time(typename M::Scalar v) : value(std::move(v)) {}
  static Time inf() {
    Time t;
    t.infinite = true;
    return t;
  }
  bool is_inf() const { return infinite; }

  friend int time_cmp(const Time& a, const Time& b) {
    if (a.infinite && b.infinite) return 0;
    if (a.infinite) return 1;
    if (b.infinite) return -1;
    return scalar_cmp(a.value, b.value);
  }
  friend bool operator<(const Time& a, const Time& b) { return time_cmp(a, b) < 0; }
  friend bool operator<=(const Time& a, const Time& b) { return time_cmp(a, b) <= 0; }
  friend bool operator==(const Time& a, const Time& b) { return time_cmp(a, b) == 0; }
  friend bool operator!=(const Time& a, const Time& b) { return time_cmp(a, b) != 0; }
  friend bool operator>(const Time& a, const Time& b) { return time_cmp(a, b) > 0; }
  friend bool operator>=(const Time& a, const Time& b) { return time_cmp(a, b) >= 0; }

  std::string to_string() const { return infinite ? "inf" : scalar_to_string(value); }
};

}  // namespace gsq

#pragma once

// Double-double arithmetic: an unevaluated sum of two IEEE doubles giving
// ~31 significant decimal digits. Needed because the scattering-coefficient
// identity checks demand absolute tolerances ~1e-8 on quantities of size
// ~1e18 in the deep tunneling corner of the parameter grid, i.e. ~27 correct
// digits --- out of reach of plain double no matter the algorithm.
//
// The error-free transforms (two_sum / two_prod via FMA) and the operation
// set follow the classic Dekker/Bailey construction.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

namespace semiscat {

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  constexpr dd() = default;
  constexpr dd(double h) : hi(h), lo(0.0) {}
  constexpr dd(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi; }
};

namespace detail {

inline dd quick_two_sum(double a, double b) {
  // requires |a| >= |b| (or a == 0)
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd renorm(double c0, double c1, double c2) {
  dd s = quick_two_sum(c1, c2);
  dd t = quick_two_sum(c0, s.hi);
  return quick_two_sum(t.hi, t.lo + s.lo);
}

} // namespace detail

// ---- addition/subtraction ----

inline dd operator+(dd a, dd b) {
  dd s = detail::two_sum(a.hi, b.hi);
  dd t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator+(dd a, double b) {
  dd s = detail::two_sum(a.hi, b);
  s.lo += a.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator+(double a, dd b) { return b + a; }

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator-(dd a, double b) { return a + (-b); }
inline dd operator-(double a, dd b) { return (-b) + a; }

// ---- multiplication ----

inline dd operator*(dd a, dd b) {
  dd p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, double b) {
  dd p = detail::two_prod(a.hi, b);
  p.lo += a.lo * b;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline dd operator*(double a, dd b) { return b * a; }

// exact scaling by a power of two
inline dd mul_pwr2(dd a, double p2) { return {a.hi * p2, a.lo * p2}; }

inline dd sqr(dd a) {
  dd p = detail::two_prod(a.hi, a.hi);
  p.lo += 2.0 * a.hi * a.lo;
  return detail::quick_two_sum(p.hi, p.lo);
}

// ---- division ----

inline dd operator/(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = a - b * q1;
  double q2 = r.hi / b.hi;
  r = r - b * q2;
  double q3 = r.hi / b.hi;
  return detail::renorm(q1, q2, q3);
}

inline dd operator/(dd a, double b) { return a / dd(b); }
inline dd operator/(double a, dd b) { return dd(a) / b; }

inline dd& operator+=(dd& a, dd b) { a = a + b; return a; }
inline dd& operator+=(dd& a, double b) { a = a + b; return a; }
inline dd& operator-=(dd& a, dd b) { a = a - b; return a; }
inline dd& operator-=(dd& a, double b) { a = a - b; return a; }
inline dd& operator*=(dd& a, dd b) { a = a * b; return a; }
inline dd& operator*=(dd& a, double b) { a = a * b; return a; }
inline dd& operator/=(dd& a, dd b) { a = a / b; return a; }
inline dd& operator/=(dd& a, double b) { a = a / b; return a; }

// ---- comparisons ----

inline bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(dd a, dd b) { return !(a == b); }
inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }
inline bool operator>=(dd a, dd b) { return !(a < b); }
inline bool operator<(dd a, double b) { return a < dd(b); }
inline bool operator>(dd a, double b) { return a > dd(b); }

inline dd fabs(dd a) { return a.hi < 0.0 ? -a : a; }
inline double to_double(dd a) { return a.hi; }

// ---- constants (standard two-double decompositions) ----

namespace ddc {
inline constexpr dd pi      { 3.141592653589793116e+00, 1.224646799147353207e-16 };
inline constexpr dd two_pi  { 6.283185307179586232e+00, 2.449293598294706414e-16 };
inline constexpr dd pi_half { 1.570796326794896558e+00, 6.123233995736766036e-17 };
inline constexpr dd pi_quarter { 7.853981633974482790e-01, 3.061616997868383018e-17 };
inline constexpr dd ln2     { 6.931471805599452862e-01, 2.319046813846299558e-17 };
inline constexpr dd e       { 2.718281828459045091e+00, 1.445646891729250158e-16 };
inline constexpr double eps = 4.93038065763132e-32; // 2^-104
} // namespace ddc

// ---- elementary functions ----

inline dd ldexp(dd a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }

inline dd sqrt(dd a) {
  if (a.hi == 0.0) return dd(0.0);
  if (a.hi < 0.0) return dd(std::numeric_limits<double>::quiet_NaN());
  // one Karp-Markstein correction from a double seed gives full dd accuracy
  double x = 1.0 / std::sqrt(a.hi);
  double ax = a.hi * x;
  dd err = a - sqr(dd(ax));
  return dd(ax) + err * (x * 0.5);
}

inline dd exp(dd a) {
  if (a.hi <= -709.0) return dd(0.0);
  if (a.hi >= 709.0) return dd(std::numeric_limits<double>::infinity());
  double m = std::nearbyint(a.hi / ddc::ln2.hi);
  // r = (a - m ln2) / 512, then exp(r)-1 by series and 9 squarings
  dd r = mul_pwr2(a - ddc::ln2 * m, 1.0 / 512.0);
  dd s(0.0), term = r;
  for (int i = 2; i < 40; ++i) {
    s += term;
    term = term * r / double(i);
    if (std::fabs(term.hi) < ddc::eps) break;
  }
  s += term;
  for (int i = 0; i < 9; ++i) s = mul_pwr2(s, 2.0) + sqr(s);
  s += 1.0;
  return ldexp(s, int(m));
}

inline dd log(dd a) {
  // Newton on exp: x_{k+1} = x_k + a*exp(-x_k) - 1, two corrections
  if (a.hi <= 0.0) return dd(std::numeric_limits<double>::quiet_NaN());
  dd x(std::log(a.hi));
  x = x + a * exp(-x) - 1.0;
  x = x + a * exp(-x) - 1.0;
  return x;
}

namespace detail {

inline dd sin_taylor(dd r) {
  // |r| <= pi/4 + small
  if (r.hi == 0.0) return dd(0.0);
  dd x2 = sqr(r);
  dd s = r, term = r;
  for (int k = 1; k < 24; ++k) {
    term = term * x2 / double((2 * k) * (2 * k + 1));
    term = -term;
    s += term;
    if (std::fabs(term.hi) < ddc::eps * std::fabs(s.hi)) break;
  }
  return s;
}

inline dd cos_taylor(dd r) {
  dd x2 = sqr(r);
  dd s(1.0), term(1.0);
  for (int k = 1; k < 24; ++k) {
    term = term * x2 / double((2 * k - 1) * (2 * k));
    term = -term;
    s += term;
    if (std::fabs(term.hi) < ddc::eps * std::fabs(s.hi)) break;
  }
  return s;
}

} // namespace detail

inline void sincos(dd a, dd& s, dd& c) {
  // reduce modulo pi/2; the two-double pi keeps the absolute reduction error
  // ~ n * 1e-32, ample for |a| up to ~1e6 at our tolerances
  double n = std::nearbyint(to_double(a / ddc::pi_half));
  dd r = a - ddc::pi_half * n;
  long j = long(n) & 3L; // two's-complement & wraps negatives correctly
  dd st = detail::sin_taylor(r);
  dd ct = detail::cos_taylor(r);
  switch (j) {
    case 0: s = st;  c = ct;  break;
    case 1: s = ct;  c = -st; break;
    case 2: s = -st; c = -ct; break;
    default: s = -ct; c = st; break;
  }
}

inline dd sin(dd a) { dd s, c; sincos(a, s, c); return s; }
inline dd cos(dd a) { dd s, c; sincos(a, s, c); return c; }

inline std::ostream& operator<<(std::ostream& os, dd a) {
  return os << a.hi << (a.lo >= 0 ? "+" : "") << a.lo;
}

// ---- complex double-double ----

struct cdd {
  dd re, im;
  constexpr cdd() = default;
  constexpr cdd(dd r) : re(r), im(0.0) {}
  constexpr cdd(double r) : re(r), im(0.0) {}
  constexpr cdd(dd r, dd i) : re(r), im(i) {}
};

inline cdd operator+(cdd a, cdd b) { return {a.re + b.re, a.im + b.im}; }
inline cdd operator-(cdd a, cdd b) { return {a.re - b.re, a.im - b.im}; }
inline cdd operator-(cdd a) { return {-a.re, -a.im}; }
inline cdd operator*(cdd a, cdd b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline cdd operator*(cdd a, dd b) { return {a.re * b, a.im * b}; }
inline cdd operator*(dd a, cdd b) { return b * a; }
inline cdd operator*(cdd a, double b) { return {a.re * b, a.im * b}; }
inline cdd conj(cdd a) { return {a.re, -a.im}; }
inline dd norm2(cdd a) { return sqr(a.re) + sqr(a.im); }
inline dd abs(cdd a) { return sqrt(norm2(a)); }
inline cdd operator/(cdd a, cdd b) {
  dd n = norm2(b);
  cdd p = a * conj(b);
  return {p.re / n, p.im / n};
}
inline cdd operator/(cdd a, dd b) { return {a.re / b, a.im / b}; }
inline cdd operator/(cdd a, double b) { return {a.re / b, a.im / b}; }
inline cdd& operator+=(cdd& a, cdd b) { a = a + b; return a; }
inline cdd& operator-=(cdd& a, cdd b) { a = a - b; return a; }
inline cdd& operator*=(cdd& a, cdd b) { a = a * b; return a; }

// e^{i theta}
inline cdd cis(dd theta) { dd s, c; sincos(theta, s, c); return {c, s}; }
inline cdd exp(cdd z) { return exp(z.re) * cis(z.im); }

inline cdd sqrt(cdd z) {
  if (z.im.hi == 0.0 && z.im.lo == 0.0) {
    if (z.re >= dd(0.0)) return {sqrt(z.re), dd(0.0)};
    return {dd(0.0), sqrt(-z.re)};
  }
  dd r = abs(z);
  if (z.re >= dd(0.0)) {
    dd w = sqrt(mul_pwr2(r + z.re, 0.5));
    return {w, mul_pwr2(z.im / w, 0.5)};
  }
  dd v = sqrt(mul_pwr2(r - z.re, 0.5));
  if (z.im < dd(0.0)) v = -v;
  return {mul_pwr2(z.im / v, 0.5), v};
}

} // namespace semiscat

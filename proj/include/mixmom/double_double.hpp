#pragma once

#include <cmath>

namespace mixmom {

// Unevaluated double-double value hi + lo with |lo| <= ulp(hi)/2, giving
// roughly 106 bits of significand. Only what the extended-precision root
// solve needs: +, -, *, / and comparisons through hi.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}
};

namespace ddetail {

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace ddetail

inline DoubleDouble dd_add(const DoubleDouble& a, const DoubleDouble& b) {
  DoubleDouble s = ddetail::two_sum(a.hi, b.hi);
  const DoubleDouble t = ddetail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = ddetail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return ddetail::quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble dd_neg(const DoubleDouble& a) { return {-a.hi, -a.lo}; }

inline DoubleDouble dd_sub(const DoubleDouble& a, const DoubleDouble& b) {
  return dd_add(a, dd_neg(b));
}

inline DoubleDouble dd_mul(const DoubleDouble& a, const DoubleDouble& b) {
  DoubleDouble p = ddetail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return ddetail::quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble dd_div(const DoubleDouble& a, const DoubleDouble& b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = dd_sub(a, dd_mul(DoubleDouble(q1), b));
  const double q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(DoubleDouble(q2), b));
  const double q3 = r.hi / b.hi;
  const DoubleDouble q = ddetail::quick_two_sum(q1, q2);
  return dd_add(q, DoubleDouble(q3));
}

inline double dd_to_double(const DoubleDouble& a) { return a.hi + a.lo; }

struct ComplexDD {
  DoubleDouble re;
  DoubleDouble im;
};

inline ComplexDD cdd_add(const ComplexDD& a, const ComplexDD& b) {
  return {dd_add(a.re, b.re), dd_add(a.im, b.im)};
}

inline ComplexDD cdd_sub(const ComplexDD& a, const ComplexDD& b) {
  return {dd_sub(a.re, b.re), dd_sub(a.im, b.im)};
}

inline ComplexDD cdd_mul(const ComplexDD& a, const ComplexDD& b) {
  return {dd_sub(dd_mul(a.re, b.re), dd_mul(a.im, b.im)),
          dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))};
}

inline ComplexDD cdd_div(const ComplexDD& a, const ComplexDD& b) {
  const DoubleDouble denom = dd_add(dd_mul(b.re, b.re), dd_mul(b.im, b.im));
  const DoubleDouble re = dd_add(dd_mul(a.re, b.re), dd_mul(a.im, b.im));
  const DoubleDouble im = dd_sub(dd_mul(a.im, b.re), dd_mul(a.re, b.im));
  return {dd_div(re, denom), dd_div(im, denom)};
}

inline double cdd_abs(const ComplexDD& a) {
  return std::hypot(dd_to_double(a.re), dd_to_double(a.im));
}

}  // namespace mixmom

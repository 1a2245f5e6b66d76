#pragma once

#include <cmath>

namespace mixmom {

// Neumaier-compensated accumulator. Tracks the rounding error of every
// addition in a second word, so sums over ~1e8 mixed-magnitude terms stay
// within a few ulp of the exact value.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Compensated Horner scheme: error-free transforms of each product and sum,
// corrections re-injected through a parallel Horner pass. Result matches an
// evaluation in roughly twice the working precision. coeffs are ascending.
inline double horner_compensated(const double* coeffs, int degree, double x) {
  double s = coeffs[degree];
  double c = 0.0;
  for (int i = degree - 1; i >= 0; --i) {
    const double p = s * x;
    const double pi = std::fma(s, x, -p);
    const double t = p + coeffs[i];
    const double z = t - p;
    const double sg = (p - (t - z)) + (coeffs[i] - z);
    s = t;
    c = c * x + (pi + sg);
  }
  return s + c;
}

}  // namespace mixmom

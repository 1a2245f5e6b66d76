#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixmom/constants.hpp"
#include "mixmom/kahan.hpp"

namespace mixmom {

// Uniform spherical mixture: k components at real means, every weight 1/k,
// every component variance 1. Means are sorted on construction and the
// object is immutable afterwards. Duplicate means are legal here (their PCF
// is zero); operations that require a positive PCF reject them explicitly.
class Mixture {
 public:
  explicit Mixture(std::vector<double> means) : means_(std::move(means)) {
    if (means_.empty()) {
      throw std::invalid_argument("Mixture: at least one mean is required");
    }
    if (static_cast<int>(means_.size()) > kMaxComponents) {
      throw std::invalid_argument("Mixture: k exceeds the supported maximum " +
                                  std::to_string(kMaxComponents));
    }
    for (double m : means_) {
      if (!std::isfinite(m)) {
        throw std::invalid_argument("Mixture: means must be finite");
      }
    }
    std::sort(means_.begin(), means_.end());
  }

  int k() const { return static_cast<int>(means_.size()); }
  const std::vector<double>& means() const { return means_; }
  double component_variance() const { return 1.0; }
  double weight() const { return 1.0 / static_cast<double>(k()); }

 private:
  std::vector<double> means_;
};

struct PcfReport {
  std::vector<double> per_mean_pcf;  // product of distances to the other means
  double min_pcf = 0.0;
  double min_gap = 0.0;  // smallest consecutive gap of the sorted means
};

// Pair correlation factor of each mean: prod_{n != m} |mu_m - mu_n|.
// Zero exactly when two means coincide.
inline PcfReport pcf(const Mixture& mixture) {
  const auto& mu = mixture.means();
  const int k = mixture.k();
  PcfReport report;
  report.per_mean_pcf.assign(k, 1.0);
  for (int m = 0; m < k; ++m) {
    for (int n = 0; n < k; ++n) {
      if (n != m) report.per_mean_pcf[m] *= std::abs(mu[m] - mu[n]);
    }
  }
  report.min_pcf =
      *std::min_element(report.per_mean_pcf.begin(), report.per_mean_pcf.end());
  report.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < k; ++i) {
    report.min_gap = std::min(report.min_gap, mu[i + 1] - mu[i]);
  }
  return report;
}

// Variance-aware pair correlation factor (one dimension):
// prod_{j != m} max(|mu_m - mu_j|, |var_m - var_j|^{1/2}).
inline std::vector<double> variance_aware_pcf(const std::vector<double>& means,
                                              const std::vector<double>& variances) {
  if (means.size() != variances.size()) {
    throw std::invalid_argument("variance_aware_pcf: means and variances differ in length");
  }
  if (means.size() < 2) {
    throw std::invalid_argument("variance_aware_pcf: need at least two components");
  }
  for (double v : variances) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("variance_aware_pcf: variances must be nonnegative");
    }
  }
  const int k = static_cast<int>(means.size());
  std::vector<double> out(k, 1.0);
  for (int m = 0; m < k; ++m) {
    for (int j = 0; j < k; ++j) {
      if (j == m) continue;
      const double mean_gap = std::abs(means[m] - means[j]);
      const double var_gap = std::sqrt(std::abs(variances[m] - variances[j]));
      out[m] *= std::max(mean_gap, var_gap);
    }
  }
  return out;
}

// Variance of the whole mixture: 1 + mean((mu - mean(mu))^2). The centered
// two-pass form keeps the result >= 1 exactly, with equality only when all
// means coincide.
inline double mixture_variance(const Mixture& mixture) {
  const auto& mu = mixture.means();
  const double k = static_cast<double>(mixture.k());
  KahanSum sum;
  for (double m : mu) sum.add(m);
  const double mean = sum.value() / k;
  KahanSum sq;
  for (double m : mu) {
    const double d = m - mean;
    sq.add(d * d);
  }
  return 1.0 + sq.value() / k;
}

// Subtract the arithmetic mean; returns (shifted values, shift).
inline std::pair<std::vector<double>, double> center(const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("center: input must be nonempty");
  }
  KahanSum sum;
  for (double v : values) sum.add(v);
  const double shift = sum.value() / static_cast<double>(values.size());
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v - shift);
  return {std::move(out), shift};
}

}  // namespace mixmom

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mixmom/constants.hpp"
#include "mixmom/double_double.hpp"
#include "mixmom/kahan.hpp"
#include "mixmom/mixture.hpp"
#include "mixmom/newton.hpp"

namespace mixmom {

// Bombieri norm on ascending coefficients; the declared degree of the
// ambient space is size - 1 (the leading coefficient may be zero, as it is
// for difference polynomials).
inline double bombieri_norm(const std::vector<double>& coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument("bombieri_norm: empty coefficient vector");
  }
  const int k = static_cast<int>(coeffs.size()) - 1;
  KahanSum sum;
  double binom = 1.0;  // C(k, i), updated multiplicatively
  for (int i = 0; i <= k; ++i) {
    if (i > 0) binom *= static_cast<double>(k - i + 1) / static_cast<double>(i);
    sum.add(coeffs[i] * coeffs[i] / binom);
  }
  return std::sqrt(sum.value());
}

struct BeauzamyResult {
  double bound = 0.0;
  bool precondition_ok = false;
};

// Root-displacement bound under a coefficient perturbation of Bombieri norm
// eps_bombieri: some root y of the perturbed polynomial satisfies
//   |x - y| < k (1 + x^2)^{k/2} / |P'(x)| * eps_bombieri,
// valid once eps_bombieri < |P'(x)| / (k (1 + x^2)^{(k-1)/2}).
inline BeauzamyResult beauzamy_bound(const ParamPolynomial& p_exact, double x,
                                     double eps_bombieri) {
  const auto coeffs = p_exact.coefficients();
  const int k = p_exact.k;
  // x must actually be a root of p_exact
  double scale = 0.0;
  double p = 1.0;
  for (double c : coeffs) {
    scale += std::abs(c) * p;
    p *= std::abs(x);
  }
  const double value = horner_compensated(coeffs.data(), k, x);
  if (std::abs(value) > 1e-9 * std::max(1.0, scale)) {
    throw std::invalid_argument("beauzamy_bound: x is not a root of the polynomial");
  }
  // derivative at x
  std::vector<double> deriv(k);
  for (int i = 1; i <= k; ++i) deriv[i - 1] = coeffs[i] * static_cast<double>(i);
  const double dp = horner_compensated(deriv.data(), k - 1, x);
  if (dp == 0.0) {
    throw std::domain_error("beauzamy_bound: P'(x) = 0, theorem void");
  }
  const double base = 1.0 + x * x;
  BeauzamyResult result;
  result.bound = static_cast<double>(k) * std::pow(base, 0.5 * k) *
                 eps_bombieri / std::abs(dp);
  result.precondition_ok =
      eps_bombieri <
      std::abs(dp) / (static_cast<double>(k) * std::pow(base, 0.5 * (k - 1)));
  return result;
}

// c(sigma, k) = | k^2 (1 + k sigma^2)^{k/2} (2 sigma)^k e^{0.5 (k/sigma)^2} |^2
inline double c_sigma_k(double sigma, int k) {
  const double kd = static_cast<double>(k);
  const double root = kd * kd * std::pow(1.0 + kd * sigma * sigma, 0.5 * kd) *
                      std::pow(2.0 * sigma, kd) *
                      std::exp(0.5 * (kd / sigma) * (kd / sigma));
  return root * root;
}

struct MeanBound {
  double pcf = 0.0;
  double threshold = 0.0;    // largest admissible moment error eps
  double error_coeff = 0.0;  // |mu_hat - mu| < error_coeff * eps
};

struct BoundReport {
  double noise_threshold = 0.0;   // min over means
  double max_error_coeff = 0.0;   // max over means
  double c_sigma_k = 0.0;
  double sigma = 0.0;             // std deviation of the whole mixture
  std::vector<MeanBound> per_mean;  // ordered like the sorted means
};

// Per-mean error coefficients and admissible-noise thresholds:
//   error_coeff = k^2 (1+mu^2)^{k/2}   (2 sigma)^k e^{0.5(k/sigma)^2} / PCF(mu)
//   threshold   = PCF(mu) / (k^2 (1+mu^2)^{(k-1)/2} (2 sigma)^k e^{0.5(k/sigma)^2})
// where sigma^2 is the variance of the whole mixture. Requires a centered
// mixture and strictly positive PCF everywhere.
inline BoundReport mean_error_bounds(const Mixture& mixture) {
  const auto& mu = mixture.means();
  const int k = mixture.k();
  KahanSum mean_sum;
  for (double m : mu) mean_sum.add(m);
  const double mean = mean_sum.value() / static_cast<double>(k);
  if (std::abs(mean) > 1e-9) {
    throw std::invalid_argument(
        "mean_error_bounds: mixture must be centered; subtract the mean of the "
        "means first");
  }
  const auto pcf_report = pcf(mixture);
  if (pcf_report.min_pcf <= 0.0) {
    throw std::invalid_argument(
        "mean_error_bounds: duplicate means give PCF = 0, bounds are void");
  }
  const double sigma = std::sqrt(mixture_variance(mixture));
  const double kd = static_cast<double>(k);
  const double common = kd * kd * std::pow(2.0 * sigma, kd) *
                        std::exp(0.5 * (kd / sigma) * (kd / sigma));
  BoundReport report;
  report.sigma = sigma;
  report.c_sigma_k = c_sigma_k(sigma, k);
  report.per_mean.resize(k);
  report.noise_threshold = std::numeric_limits<double>::infinity();
  report.max_error_coeff = 0.0;
  for (int m = 0; m < k; ++m) {
    const double base = 1.0 + mu[m] * mu[m];
    MeanBound& b = report.per_mean[m];
    b.pcf = pcf_report.per_mean_pcf[m];
    b.error_coeff = common * std::pow(base, 0.5 * kd) / b.pcf;
    b.threshold = b.pcf / (common * std::pow(base, 0.5 * (kd - 1.0)));
    report.noise_threshold = std::min(report.noise_threshold, b.threshold);
    report.max_error_coeff = std::max(report.max_error_coeff, b.error_coeff);
  }
  return report;
}

struct SampleCount {
  std::uint64_t value = 0;
  bool saturated = false;  // true when the formula exceeds the integer range
};

namespace detail {

inline SampleCount to_sample_count(double real_value) {
  SampleCount out;
  if (!std::isfinite(real_value) || real_value >= 1.8446744073709552e19) {
    out.value = UINT64_MAX;
    out.saturated = true;
    return out;
  }
  out.value = static_cast<std::uint64_t>(std::ceil(real_value));
  if (out.value == 0) out.value = 1;
  return out;
}

}  // namespace detail

// Pre-ceiling value of the sample-complexity formula
//   ln(1/delta) * c(sigma,k) / min_pcf^2 * eps^-2.
// The factor order is fixed so that scaling eps or the PCF by a power of two
// rescales the result exactly.
inline double sample_count_pcf_formula(double eps, double delta, double c_value,
                                        double min_pcf) {
  return std::log(1.0 / delta) * c_value * (1.0 / (min_pcf * min_pcf)) *
         (1.0 / (eps * eps));
}

inline double sample_count_pcf_real(double eps, double delta,
                                    const Mixture& mixture) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("sample_count_pcf: eps must be positive");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("sample_count_pcf: delta must lie in (0,1)");
  }
  const auto pcf_report = pcf(mixture);
  if (pcf_report.min_pcf <= 0.0) {
    throw std::invalid_argument("sample_count_pcf: PCF is zero (duplicate means)");
  }
  const double sigma = std::sqrt(mixture_variance(mixture));
  return sample_count_pcf_formula(eps, delta, c_sigma_k(sigma, mixture.k()),
                                  pcf_report.min_pcf);
}

inline SampleCount sample_count_pcf(double eps, double delta, const Mixture& mixture) {
  return detail::to_sample_count(sample_count_pcf_real(eps, delta, mixture));
}

// Pre-ceiling value of the worst-case formula 1e4 * c(sigma,k) * eps^-2k * ln(1/delta).
inline double sample_count_worst_case_real(double eps, double delta, int k,
                                           double sigma) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("sample_count_worst_case: eps must lie in (0,1)");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("sample_count_worst_case: delta must lie in (0,1)");
  }
  if (k < 1) throw std::invalid_argument("sample_count_worst_case: k must be positive");
  double inv_eps_2k = 1.0;
  const double inv_eps_sq = 1.0 / (eps * eps);
  for (int i = 0; i < k; ++i) inv_eps_2k *= inv_eps_sq;
  return 1e4 * c_sigma_k(sigma, k) * inv_eps_2k * std::log(1.0 / delta);
}

// The value here grows astronomically; the operation exists to report the
// bound, so overflow saturates with a flag instead of failing.
inline SampleCount sample_count_worst_case(double eps, double delta, int k,
                                           double sigma) {
  return detail::to_sample_count(
      sample_count_worst_case_real(eps, delta, k, sigma));
}

struct WilkinsonResult {
  double root_before = 0.0;            // largest real root of prod (x - i)
  double root_after = 0.0;             // largest real root after the 2^-23 drop
  std::vector<double> roots_before;    // all unperturbed real roots, ascending
};

namespace detail {

inline ComplexDD cdd_horner(const std::vector<DoubleDouble>& a, const ComplexDD& z) {
  ComplexDD acc{a.back(), DoubleDouble(0.0)};
  for (int i = static_cast<int>(a.size()) - 2; i >= 0; --i) {
    acc = cdd_mul(acc, z);
    acc.re = dd_add(acc.re, a[i]);
  }
  return acc;
}

inline ComplexDD cdd_horner_derivative(const std::vector<DoubleDouble>& a,
                                       const ComplexDD& z) {
  ComplexDD acc{DoubleDouble(0.0), DoubleDouble(0.0)};
  ComplexDD val{a.back(), DoubleDouble(0.0)};
  for (int i = static_cast<int>(a.size()) - 2; i >= 0; --i) {
    acc = cdd_add(cdd_mul(acc, z), val);
    val = cdd_mul(val, z);
    val.re = dd_add(val.re, a[i]);
  }
  return acc;
}

// Aberth iteration in double-double arithmetic. Guesses start just off the
// real axis so conjugate pairs can form.
inline std::vector<std::complex<double>> aberth_dd(
    const std::vector<DoubleDouble>& coeffs,
    const std::vector<std::complex<double>>& guesses) {
  const int k = static_cast<int>(coeffs.size()) - 1;
  std::vector<ComplexDD> z(k);
  for (int j = 0; j < k; ++j) {
    z[j] = ComplexDD{DoubleDouble(guesses[j].real()), DoubleDouble(guesses[j].imag())};
  }
  std::vector<ComplexDD> corrections(k);
  for (int iter = 0; iter < kAberthMaxIterations; ++iter) {
    for (int j = 0; j < k; ++j) {
      const ComplexDD p = cdd_horner(coeffs, z[j]);
      const ComplexDD dp = cdd_horner_derivative(coeffs, z[j]);
      if (cdd_abs(p) == 0.0) {
        corrections[j] = ComplexDD{DoubleDouble(0.0), DoubleDouble(0.0)};
        continue;
      }
      const ComplexDD newton = cdd_div(p, dp);
      ComplexDD repulse{DoubleDouble(0.0), DoubleDouble(0.0)};
      for (int i = 0; i < k; ++i) {
        if (i == j) continue;
        const ComplexDD diff = cdd_sub(z[j], z[i]);
        repulse = cdd_add(repulse,
                          cdd_div(ComplexDD{DoubleDouble(1.0), DoubleDouble(0.0)}, diff));
      }
      ComplexDD denom = cdd_mul(newton, repulse);
      denom.re = dd_sub(DoubleDouble(1.0), denom.re);
      denom.im = dd_neg(denom.im);
      corrections[j] = cdd_div(newton, denom);
    }
    bool all_small = true;
    for (int j = 0; j < k; ++j) {
      z[j] = cdd_sub(z[j], corrections[j]);
      // dd carries ~32 digits; 1e-25 leaves the roots fully converged
      if (cdd_abs(corrections[j]) > 1e-25 * (1.0 + cdd_abs(z[j]))) all_small = false;
    }
    if (all_small) break;
  }
  std::vector<std::complex<double>> out(k);
  for (int j = 0; j < k; ++j) {
    out[j] = std::complex<double>(dd_to_double(z[j].re), dd_to_double(z[j].im));
  }
  return out;
}

}  // namespace detail

// The classic root-sensitivity demonstration: omega(x) = prod_{i=1..20} (x-i)
// with exact integer coefficients, then the x^19 coefficient drops from -210
// by 2^-23. Coefficients reach ~1.4e19 and the perturbation is 2^-23, so the
// whole solve runs in double-double arithmetic; the rest of the library never
// needs this path.
inline WilkinsonResult wilkinson_demo() {
  constexpr int degree = 20;
  // exact expansion in 128-bit integers
  std::vector<__int128> ic(degree + 1, 0);
  ic[0] = 1;
  for (int root = 1; root <= degree; ++root) {
    for (int j = root; j >= 1; --j) {
      ic[j] = ic[j - 1] - static_cast<__int128>(root) * ic[j];
    }
    ic[0] = -static_cast<__int128>(root) * ic[0];
  }
  std::vector<DoubleDouble> coeffs(degree + 1);
  for (int i = 0; i <= degree; ++i) {
    const double hi = static_cast<double>(ic[i]);
    const double lo = static_cast<double>(ic[i] - static_cast<__int128>(hi));
    coeffs[i] = DoubleDouble(hi, lo);
  }

  std::vector<std::complex<double>> guesses(degree);
  for (int j = 0; j < degree; ++j) {
    guesses[j] = std::complex<double>(j + 1.0, 0.5);
  }

  const auto before = detail::aberth_dd(coeffs, guesses);

  std::vector<DoubleDouble> perturbed = coeffs;
  perturbed[19] = dd_sub(perturbed[19], DoubleDouble(0x1p-23));
  const auto after = detail::aberth_dd(perturbed, guesses);

  WilkinsonResult result;
  const auto largest_real = [](const std::vector<std::complex<double>>& roots) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : roots) {
      if (std::abs(z.imag()) <= 1e-6 * (1.0 + std::abs(z.real()))) {
        best = std::max(best, z.real());
      }
    }
    return best;
  };
  for (const auto& z : before) result.roots_before.push_back(z.real());
  std::sort(result.roots_before.begin(), result.roots_before.end());
  result.root_before = largest_real(before);
  result.root_after = largest_real(after);
  return result;
}

}  // namespace mixmom

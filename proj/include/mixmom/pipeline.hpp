#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixmom/analysis.hpp"
#include "mixmom/mixture.hpp"
#include "mixmom/moments.hpp"
#include "mixmom/newton.hpp"
#include "mixmom/sampling.hpp"

namespace mixmom {

struct TrialRecord {
  int trial_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  // max_m |M_hat_m - M_m| / sigma^m over the k moments used (truth known)
  double eps_effective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> per_mean_error;  // ordered like the sorted true means
  double max_error = std::numeric_limits<double>::quiet_NaN();
  double bound_coeff_times_eps = std::numeric_limits<double>::quiet_NaN();
  bool within_bound = false;
  // M_hat_m minus the exact moment of the recovered mixture, m = 1..k
  std::vector<double> moment_residuals;
  int root_flags = 0;  // roots whose imaginary part exceeded the tolerance
  std::vector<double> recovered_means;  // ascending, original coordinates
  bool failed = false;
  std::string failure_reason;
};

// The delta budget is split evenly across the 2k moments the theory uses,
// so each moment estimate runs at delta / (2k).
inline double per_moment_delta(double delta, int k) {
  return delta / (2.0 * static_cast<double>(k));
}

namespace detail {

// Shared tail of the pipeline once a moment vector (empirical or exact, in
// the centered frame) is available. `shift` maps back to original
// coordinates.
inline void finish_pipeline(const Mixture& truth, const MomentVector& moments,
                            double shift, TrialRecord& record) {
  const int k = truth.k();
  const auto power_sums = power_sums_from_moments(moments, k);
  const auto poly = elementary_from_power_sums(power_sums, k);
  const auto roots = find_roots(poly);
  const auto extracted = extract_real_means(roots, k);
  record.root_flags = extracted.flagged;

  record.recovered_means.resize(k);
  for (int i = 0; i < k; ++i) record.recovered_means[i] = extracted.means[i] + shift;

  const auto matches = match_roots(record.recovered_means, truth.means());
  record.per_mean_error.assign(k, 0.0);
  record.max_error = 0.0;
  for (const auto& m : matches) {
    record.per_mean_error[m.truth_index] = m.error;
    record.max_error = std::max(record.max_error, m.error);
  }

  // effective moment error: compare against the exact moments of the truth
  // expressed in the same (shifted) frame the estimates were computed in
  std::vector<double> shifted(truth.means());
  for (double& mu : shifted) mu -= shift;
  const auto exact_shifted = exact_moments(Mixture(shifted), k);
  const double sigma = std::sqrt(mixture_variance(truth));
  record.eps_effective = 0.0;
  double sigma_m = 1.0;
  for (int m = 1; m <= k; ++m) {
    sigma_m *= sigma;
    record.eps_effective = std::max(
        record.eps_effective, std::abs(moments.at(m) - exact_shifted.at(m)) / sigma_m);
  }

  // per-mean bound at the trial's effective eps, from the exactly centered truth
  const auto centered_truth = center(truth.means());
  const auto report = mean_error_bounds(Mixture(centered_truth.first));
  record.within_bound = true;
  record.bound_coeff_times_eps = 0.0;
  for (int i = 0; i < k; ++i) {
    const double allowed = report.per_mean[i].error_coeff * record.eps_effective;
    record.bound_coeff_times_eps = std::max(record.bound_coeff_times_eps, allowed);
    if (record.per_mean_error[i] > allowed) record.within_bound = false;
  }

  // residuals of the recovered model against the moments actually used
  std::vector<double> recovered_centered(extracted.means);
  const auto recovered_moments = exact_moments(Mixture(recovered_centered), k);
  record.moment_residuals.resize(k);
  for (int m = 1; m <= k; ++m) {
    record.moment_residuals[m - 1] = moments.at(m) - recovered_moments.at(m);
  }
}

}  // namespace detail

// One estimation trial: sample, center, median-of-means moments of order
// 1..k, invert to power sums, Newton's identities, root extraction, sorted
// matching against the truth. A failing trial reports its reason instead of
// throwing.
inline TrialRecord run_pipeline(const Mixture& mixture, std::uint64_t n,
                                double delta, std::uint64_t seed) {
  TrialRecord record;
  record.seed = seed;
  record.n = n;
  try {
    const int k = mixture.k();
    auto [centered, shift] = center_samples(sample(mixture, n, seed));
    const auto moments =
        empirical_moments(centered, k, per_moment_delta(delta, k));
    detail::finish_pipeline(mixture, moments, shift, record);
  } catch (const std::exception& e) {
    record.failed = true;
    record.failure_reason = e.what();
  }
  return record;
}

// Noiseless variant: exact moments take the place of the empirical ones.
// Recovers the means to root-finder accuracy; the uniqueness witness.
inline TrialRecord run_pipeline_exact(const Mixture& mixture) {
  TrialRecord record;
  record.n = 0;
  try {
    const auto moments = exact_moments(mixture, mixture.k());
    detail::finish_pipeline(mixture, moments, 0.0, record);
  } catch (const std::exception& e) {
    record.failed = true;
    record.failure_reason = e.what();
  }
  return record;
}

struct EstimateResult {
  std::vector<double> means;  // ascending, original coordinates
  int root_flags = 0;
  double shift = 0.0;
};

// Estimator on external data with no ground truth: recovered means only.
inline EstimateResult estimate_from_samples(SampleSet samples, int k, double delta) {
  if (k < 2 || k > kMaxComponents) {
    throw std::invalid_argument("estimate_from_samples: k must lie in [2, " +
                                std::to_string(kMaxComponents) + "]");
  }
  auto [centered, shift] = center_samples(std::move(samples));
  const auto moments = empirical_moments(centered, k, per_moment_delta(delta, k));
  const auto power_sums = power_sums_from_moments(moments, k);
  const auto poly = elementary_from_power_sums(power_sums, k);
  const auto roots = find_roots(poly);
  const auto extracted = extract_real_means(roots, k);
  EstimateResult result;
  result.shift = shift;
  result.root_flags = extracted.flagged;
  result.means = extracted.means;
  for (double& m : result.means) m += shift;
  return result;
}

}  // namespace mixmom

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mixmom/constants.hpp"
#include "mixmom/kahan.hpp"
#include "mixmom/moments.hpp"

namespace mixmom {

// Monic degree-k polynomial prod (x - mu_i) stored through its elementary
// symmetric values: coefficient of x^{k-n} is (-1)^n e_n.
struct ParamPolynomial {
  int k = 0;
  std::vector<double> e;  // e[n-1] = e_n; e_0 == 1 implicit
  Kind kind = Kind::exact;

  // Ascending coefficients a_0..a_k of the monic polynomial.
  std::vector<double> coefficients() const {
    std::vector<double> a(k + 1);
    a[k] = 1.0;
    double sign = 1.0;
    for (int n = 1; n <= k; ++n) {
      sign = -sign;
      a[k - n] = sign * e[n - 1];
    }
    return a;
  }
};

struct RootSet {
  std::vector<std::complex<double>> roots;
  std::vector<bool> converged;
  double residual = 0.0;  // max over roots of |P(z)| / max(1, sum |a_i| |z|^i)
};

// Newton's identities: n e_n = sum_{j=1}^{n} (-1)^{j-1} e_{n-j} P_j, e_0 = 1.
inline ParamPolynomial elementary_from_power_sums(const PowerSums& power_sums, int k) {
  if (k < 1) {
    throw std::invalid_argument("elementary_from_power_sums: k must be positive");
  }
  if (power_sums.order < k) {
    throw std::invalid_argument(
        "elementary_from_power_sums: need power sums through order k");
  }
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (int n = 1; n <= k; ++n) {
    KahanSum sum;
    double sign = 1.0;
    for (int j = 1; j <= n; ++j) {
      sum.add(sign * e[n - j] * power_sums.at(j));
      sign = -sign;
    }
    e[n] = sum.value() / static_cast<double>(n);
  }
  ParamPolynomial poly;
  poly.k = k;
  poly.kind = power_sums.kind;
  poly.e.assign(e.begin() + 1, e.end());
  return poly;
}

namespace detail {

inline std::complex<double> horner(const std::vector<double>& a,
                                   std::complex<double> z) {
  std::complex<double> acc(a.back(), 0.0);
  for (int i = static_cast<int>(a.size()) - 2; i >= 0; --i) {
    acc = acc * z + a[i];
  }
  return acc;
}

inline std::complex<double> horner_derivative(const std::vector<double>& a,
                                              std::complex<double> z) {
  std::complex<double> acc(0.0, 0.0);
  std::complex<double> val(a.back(), 0.0);
  for (int i = static_cast<int>(a.size()) - 2; i >= 0; --i) {
    acc = acc * z + val;
    val = val * z + a[i];
  }
  return acc;
}

inline double scaled_residual(const std::vector<double>& a,
                              std::complex<double> z) {
  const double az = std::abs(z);
  double scale = 0.0;
  double p = 1.0;
  for (double c : a) {
    scale += std::abs(c) * p;
    p *= az;
  }
  return std::abs(horner(a, z)) / std::max(1.0, scale);
}

// After convergence, force conjugate symmetry: pair each root of positive
// imaginary part with the nearest conjugate candidate and replace the pair
// by (c, conj(c)). Only genuine near-conjugates are paired; two distinct
// real roots carrying opposite imaginary dust must stay apart.
inline void symmetrize_conjugates(std::vector<std::complex<double>>& roots) {
  constexpr double pair_tol = 1e-8;
  std::vector<int> pos, neg;
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    if (roots[i].imag() > 0.0) pos.push_back(i);
    if (roots[i].imag() < 0.0) neg.push_back(i);
  }
  std::vector<bool> used(roots.size(), false);
  for (int i : pos) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j : neg) {
      if (used[j]) continue;
      const double d = std::abs(std::conj(roots[i]) - roots[j]);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best < 0 || best_dist > pair_tol * (1.0 + std::abs(roots[i]))) continue;
    used[best] = true;
    const std::complex<double> c =
        0.5 * (roots[i] + std::conj(roots[best]));
    roots[i] = c;
    roots[best] = std::conj(c);
  }
}

}  // namespace detail

namespace detail {

// One Aberth-Ehrlich run from guesses on a circle of the given radius with
// angles (2 pi j + 0.25 + angle_offset) / k. Updates are Gauss-Seidel (each
// corrected root is seen by the later ones in the same sweep), which keeps
// two iterates from collapsing onto each other and stalling the repulsion
// term. Convergence needs every correction below
// kAberthCorrectionTol * (1 + |root|).
inline void aberth_sweeps(const std::vector<double>& coeffs, double radius,
                          double angle_offset,
                          std::vector<std::complex<double>>& z,
                          std::vector<bool>& converged) {
  const int k = static_cast<int>(coeffs.size()) - 1;
  for (int j = 0; j < k; ++j) {
    const double angle = (2.0 * std::numbers::pi * j + 0.25 + angle_offset) / k;
    z[j] = std::polar(radius, angle);
  }
  std::vector<double> correction_size(k, std::numeric_limits<double>::infinity());
  for (int iter = 0; iter < kAberthMaxIterations; ++iter) {
    bool all_small = true;
    for (int j = 0; j < k; ++j) {
      const std::complex<double> p = horner(coeffs, z[j]);
      const std::complex<double> dp = horner_derivative(coeffs, z[j]);
      std::complex<double> correction;
      if (p == 0.0) {
        correction = 0.0;
      } else if (dp == 0.0) {
        // stationary point; nudge off it
        correction = std::complex<double>(-1e-8 * (1.0 + std::abs(z[j])), -1e-8);
      } else {
        const std::complex<double> newton = p / dp;
        std::complex<double> repulse(0.0, 0.0);
        for (int i = 0; i < k; ++i) {
          if (i == j) continue;
          std::complex<double> diff = z[j] - z[i];
          const double floor = 1e-14 * (1.0 + std::abs(z[j]));
          if (std::abs(diff) < floor) {
            diff = std::complex<double>(floor, floor);
          }
          repulse += 1.0 / diff;
        }
        correction = newton / (1.0 - newton * repulse);
      }
      z[j] -= correction;
      correction_size[j] = std::abs(correction);
      if (correction_size[j] > kAberthCorrectionTol * (1.0 + std::abs(z[j]))) {
        all_small = false;
      }
    }
    if (all_small) break;
  }
  for (int j = 0; j < k; ++j) {
    converged[j] =
        correction_size[j] <= kAberthCorrectionTol * (1.0 + std::abs(z[j]));
  }
}

}  // namespace detail

// Aberth-Ehrlich root finding on ascending real coefficients. Initial
// guesses sit on a circle of radius 1 + max |a_i|; the 0.25 angular offset
// breaks symmetric configurations. If the converged set leaves a large
// coefficient-scaled residual, the solve restarts once from rotated guesses;
// a still-bad result is reported through the flags, never silently.
inline RootSet aberth_roots(std::vector<double> coeffs) {
  if (coeffs.size() < 2) {
    throw std::invalid_argument("aberth_roots: polynomial must have degree >= 1");
  }
  if (coeffs.back() == 0.0) {
    throw std::invalid_argument("aberth_roots: leading coefficient is zero");
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("aberth_roots: coefficients must be finite");
    }
  }
  const int k = static_cast<int>(coeffs.size()) - 1;
  if (coeffs.back() != 1.0) {
    const double lead = coeffs.back();
    for (double& c : coeffs) c /= lead;
    coeffs.back() = 1.0;
  }

  double max_coeff = 0.0;
  for (int i = 0; i < k; ++i) max_coeff = std::max(max_coeff, std::abs(coeffs[i]));

  std::vector<std::complex<double>> z(k);
  std::vector<bool> converged(k, false);
  double residual = std::numeric_limits<double>::infinity();
  constexpr int kRestarts = 3;
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    const double radius = (1.0 + max_coeff) * std::pow(1.25, attempt);
    detail::aberth_sweeps(coeffs, radius, 0.7 * attempt, z, converged);
    residual = 0.0;
    for (const auto& root : z) {
      residual = std::max(residual, detail::scaled_residual(coeffs, root));
    }
    if (residual <= kRootResidualTol) break;
  }

  detail::symmetrize_conjugates(z);

  RootSet rs;
  rs.roots = std::move(z);
  rs.residual = residual;
  rs.converged.resize(k);
  for (int j = 0; j < k; ++j) {
    rs.converged[j] =
        converged[j] &&
        detail::scaled_residual(coeffs, rs.roots[j]) <= kRootResidualTol;
  }
  return rs;
}

inline RootSet find_roots(const ParamPolynomial& poly) {
  if (poly.k < 1) {
    throw std::invalid_argument("find_roots: degree must be >= 1");
  }
  return aberth_roots(poly.coefficients());
}

struct RealExtraction {
  std::vector<double> means;  // ascending, exactly k values
  int flagged = 0;            // roots whose imaginary part exceeded the tolerance
};

// Project a root set to exactly k real values. Roots within the imaginary
// tolerance are truncated to their real part; a conjugate pair beyond it
// collapses to the shared real part, contributing one value per root.
inline RealExtraction extract_real_means(const RootSet& root_set, int k,
                                         double im_tol = kDefaultImagTol) {
  if (static_cast<int>(root_set.roots.size()) != k) {
    throw std::invalid_argument("extract_real_means: root count differs from k");
  }
  RealExtraction out;
  out.means.reserve(k);
  std::vector<bool> visited(k, false);
  for (int i = 0; i < k; ++i) {
    if (visited[i]) continue;
    const auto& z = root_set.roots[i];
    if (std::abs(z.imag()) <= im_tol * (1.0 + std::abs(z.real()))) {
      visited[i] = true;
      out.means.push_back(z.real());
      continue;
    }
    // genuinely complex: find its conjugate partner
    visited[i] = true;
    ++out.flagged;
    int partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      if (visited[j]) continue;
      const double d = std::abs(std::conj(z) - root_set.roots[j]);
      if (d < best) {
        best = d;
        partner = j;
      }
    }
    if (partner >= 0) {
      visited[partner] = true;
      ++out.flagged;
      const double shared = 0.5 * (z.real() + root_set.roots[partner].real());
      out.means.push_back(shared);
      out.means.push_back(shared);
    } else {
      out.means.push_back(z.real());
    }
  }
  std::sort(out.means.begin(), out.means.end());
  return out;
}

struct RootMatch {
  int estimated_index = 0;  // index into the original estimated list
  int truth_index = 0;      // index into the original truth list
  double error = 0.0;
};

// Sort both lists ascending and pair in order; for 1-D point sets this
// minimizes both the maximum and the total absolute matching error.
inline std::vector<RootMatch> match_roots(const std::vector<double>& estimated,
                                          const std::vector<double>& truth) {
  if (estimated.size() != truth.size()) {
    throw std::invalid_argument("match_roots: lists differ in length");
  }
  const int k = static_cast<int>(estimated.size());
  std::vector<int> order_est(k), order_truth(k);
  std::iota(order_est.begin(), order_est.end(), 0);
  std::iota(order_truth.begin(), order_truth.end(), 0);
  std::sort(order_est.begin(), order_est.end(),
            [&](int a, int b) { return estimated[a] < estimated[b]; });
  std::sort(order_truth.begin(), order_truth.end(),
            [&](int a, int b) { return truth[a] < truth[b]; });
  std::vector<RootMatch> matches(k);
  for (int i = 0; i < k; ++i) {
    matches[i].estimated_index = order_est[i];
    matches[i].truth_index = order_truth[i];
    matches[i].error = std::abs(estimated[order_est[i]] - truth[order_truth[i]]);
  }
  return matches;
}

// Constructive witness of the moment-uniqueness statement: the noiseless
// pipeline (exact moments -> power sums -> elementary values -> roots) must
// reproduce the means to 1e-7 each.
inline bool uniqueness_check(const Mixture& mixture) {
  const int k = mixture.k();
  try {
    const auto moments = exact_moments(mixture, k);
    const auto power_sums = power_sums_from_moments(moments, k);
    const auto poly = elementary_from_power_sums(power_sums, k);
    const auto roots = find_roots(poly);
    const auto extracted = extract_real_means(roots, k);
    for (int i = 0; i < k; ++i) {
      if (std::abs(extracted.means[i] - mixture.means()[i]) > 1e-7) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace mixmom

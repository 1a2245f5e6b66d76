#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixmom/constants.hpp"
#include "mixmom/kahan.hpp"
#include "mixmom/mixture.hpp"
#include "mixmom/sampling.hpp"

namespace mixmom {

enum class Kind { exact, empirical };

// Exact integer table c[m][j] = C(m, 2j) * (2j-1)!!; these are the monomial
// coefficients of the m-th raw moment of Normal(mu, 1):
//   E X^m = mu^m + sum_{j>=1} c[m][j] mu^{m-2j}
struct HermiteCoeffTable {
  int max_order = 0;
  std::vector<std::vector<std::uint64_t>> c;  // c[m-1][j], 0 <= j <= m/2

  std::uint64_t at(int m, int j) const { return c.at(m - 1).at(j); }
};

inline HermiteCoeffTable hermite_coeffs(int m_max) {
  if (m_max < 1 || m_max > 2 * kMaxComponents) {
    throw std::invalid_argument("hermite_coeffs: order must lie in [1, " +
                                std::to_string(2 * kMaxComponents) + "]");
  }
  // Pascal triangle rows up to m_max, checked for overflow.
  std::vector<std::vector<std::uint64_t>> binom(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    binom[m].assign(m + 1, 1);
    for (int i = 1; i < m; ++i) {
      if (binom[m - 1][i - 1] > UINT64_MAX - binom[m - 1][i]) {
        throw std::overflow_error("hermite_coeffs: binomial overflow");
      }
      binom[m][i] = binom[m - 1][i - 1] + binom[m - 1][i];
    }
  }
  HermiteCoeffTable table;
  table.max_order = m_max;
  table.c.resize(m_max);
  for (int m = 1; m <= m_max; ++m) {
    const int jmax = m / 2;
    table.c[m - 1].resize(jmax + 1);
    std::uint64_t dfact = 1;  // (2j-1)!!, with (-1)!! = 1
    for (int j = 0; j <= jmax; ++j) {
      if (j > 0) {
        const std::uint64_t odd = static_cast<std::uint64_t>(2 * j - 1);
        if (dfact > UINT64_MAX / odd) {
          throw std::overflow_error("hermite_coeffs: double factorial overflow");
        }
        dfact *= odd;
      }
      const std::uint64_t b = binom[m][2 * j];
      if (b != 0 && dfact > UINT64_MAX / b) {
        throw std::overflow_error("hermite_coeffs: coefficient overflow");
      }
      table.c[m - 1][j] = b * dfact;
    }
  }
  return table;
}

// Raw moments M_1..M_order of the mixture; M_0 == 1 is implicit.
struct MomentVector {
  int order = 0;
  std::vector<double> values;  // values[m-1] = M_m
  Kind kind = Kind::exact;

  double at(int m) const { return m == 0 ? 1.0 : values.at(m - 1); }
};

// Power sums P_m = mu_1^m + ... + mu_k^m; P_0 == k is implicit.
struct PowerSums {
  int order = 0;
  std::vector<double> values;  // values[m-1] = P_m
  Kind kind = Kind::exact;

  double at(int m) const { return values.at(m - 1); }
};

namespace detail {

// P_m = sum_i mu_i^m by the iterated power ladder, compensated.
inline std::vector<double> direct_power_sums(const std::vector<double>& means,
                                             int order) {
  std::vector<KahanSum> acc(order);
  for (double mu : means) {
    double p = 1.0;
    for (int m = 1; m <= order; ++m) {
      p *= mu;
      acc[m - 1].add(p);
    }
  }
  std::vector<double> out(order);
  for (int m = 1; m <= order; ++m) out[m - 1] = acc[m - 1].value();
  return out;
}

}  // namespace detail

// Exact mixture moments through the Hermite expansion:
//   k M_m = P_m + sum_{i=1}^{m/2} c_{m,i} P_{m-2i},  P_0 = k.
inline MomentVector exact_moments(const Mixture& mixture, int m_max) {
  if (m_max < 1 || m_max > 2 * kMaxComponents) {
    throw std::invalid_argument("exact_moments: order must lie in [1, " +
                                std::to_string(2 * kMaxComponents) + "]");
  }
  const auto table = hermite_coeffs(m_max);
  const auto p = detail::direct_power_sums(mixture.means(), m_max);
  const double k = static_cast<double>(mixture.k());
  MomentVector mv;
  mv.order = m_max;
  mv.kind = Kind::exact;
  mv.values.resize(m_max);
  for (int m = 1; m <= m_max; ++m) {
    KahanSum sum;
    sum.add(p[m - 1]);
    for (int i = 1; i <= m / 2; ++i) {
      const double pm2i = (m - 2 * i == 0) ? k : p[m - 2 * i - 1];
      sum.add(static_cast<double>(table.at(m, i)) * pm2i);
    }
    mv.values[m - 1] = sum.value() / k;
  }
  return mv;
}

// Group count for the median-of-means estimator: max(1, ceil(8 ln(1/delta)))
// contiguous groups gives per-moment failure probability delta.
inline int moment_group_count(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("moment_group_count: delta must lie in (0,1)");
  }
  const double g = std::ceil(8.0 * std::log(1.0 / delta));
  return std::max(1, static_cast<int>(g));
}

// Median-of-means raw moments: the samples are split into g contiguous
// groups, each group contributes its average of x^m, and the estimate is the
// median of the g group values (mean of the two middle values when g is
// even). Powers are accumulated with compensated sums.
inline MomentVector empirical_moments(const SampleSet& samples, int m_max,
                                      double delta) {
  if (m_max < 1 || m_max > 2 * kMaxComponents) {
    throw std::invalid_argument("empirical_moments: order must lie in [1, " +
                                std::to_string(2 * kMaxComponents) + "]");
  }
  const int g = moment_group_count(delta);
  const std::size_t n = samples.values.size();
  if (n < static_cast<std::size_t>(g)) {
    throw std::invalid_argument(
        "empirical_moments: need at least " + std::to_string(g) +
        " samples for delta=" + std::to_string(delta) + ", got " +
        std::to_string(n));
  }
  // groups[m-1][j] = group-j average of x^m
  std::vector<std::vector<double>> groups(m_max, std::vector<double>(g));
  const std::size_t base = n / static_cast<std::size_t>(g);
  const std::size_t extra = n % static_cast<std::size_t>(g);
  std::size_t start = 0;
  for (int j = 0; j < g; ++j) {
    const std::size_t size = base + (static_cast<std::size_t>(j) < extra ? 1 : 0);
    std::vector<KahanSum> acc(m_max);
    for (std::size_t i = start; i < start + size; ++i) {
      const double x = samples.values[i];
      double p = 1.0;
      for (int m = 1; m <= m_max; ++m) {
        p *= x;
        acc[m - 1].add(p);
      }
    }
    for (int m = 1; m <= m_max; ++m) {
      groups[m - 1][j] = acc[m - 1].value() / static_cast<double>(size);
    }
    start += size;
  }
  MomentVector mv;
  mv.order = m_max;
  mv.kind = Kind::empirical;
  mv.values.resize(m_max);
  for (int m = 1; m <= m_max; ++m) {
    auto& v = groups[m - 1];
    std::sort(v.begin(), v.end());
    const int mid = g / 2;
    mv.values[m - 1] = (g % 2 == 1) ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  }
  return mv;
}

// Inversion from moments to power sums:
//   P_m = k M_m + k sum_{i=1}^{m/2} (-1)^i C(m,2i) (2i-1)!! M_{m-2i},
// with M_0 = 1. Linear in the moment vector; kind is propagated.
inline PowerSums power_sums_from_moments(const MomentVector& moments, int k) {
  if (moments.order < 1) {
    throw std::invalid_argument("power_sums_from_moments: empty moment vector");
  }
  const int order = moments.order;
  const auto table = hermite_coeffs(order);
  const double kd = static_cast<double>(k);
  PowerSums ps;
  ps.order = order;
  ps.kind = moments.kind;
  ps.values.resize(order);
  for (int m = 1; m <= order; ++m) {
    KahanSum sum;
    sum.add(moments.at(m));
    double sign = 1.0;
    for (int i = 1; i <= m / 2; ++i) {
      sign = -sign;
      sum.add(sign * static_cast<double>(table.at(m, i)) * moments.at(m - 2 * i));
    }
    ps.values[m - 1] = kd * sum.value();
  }
  return ps;
}

}  // namespace mixmom

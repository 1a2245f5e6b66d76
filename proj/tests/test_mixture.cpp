#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixmom/mixture.hpp"
#include "mixmom/rng.hpp"
#include "oracles.hpp"

using namespace mixmom;

TEST_CASE("mixture construction sorts and validates", "[mixture]") {
  Mixture mix({2.0, -1.0, 0.5});
  REQUIRE(mix.k() == 3);
  REQUIRE(mix.means() == std::vector<double>{-1.0, 0.5, 2.0});
  REQUIRE(mix.weight() == Catch::Approx(1.0 / 3.0));
  REQUIRE(mix.component_variance() == 1.0);

  REQUIRE_THROWS_AS(Mixture(std::vector<double>{}), std::invalid_argument);
  REQUIRE_THROWS_AS(Mixture(std::vector<double>(13, 0.0)), std::invalid_argument);
  REQUIRE_THROWS_AS(Mixture({0.0, std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
  REQUIRE_NOTHROW(Mixture({1.0, 1.0}));  // duplicates allowed at construction
}

TEST_CASE("pcf on worked examples", "[mixture]") {
  SECTION("means 0,1,2") {
    auto rep = pcf(Mixture({0.0, 1.0, 2.0}));
    REQUIRE(rep.per_mean_pcf == std::vector<double>{2.0, 1.0, 2.0});
    REQUIRE(rep.min_pcf == 1.0);
    REQUIRE(rep.min_gap == 1.0);
  }
  SECTION("symmetric triple -eps,0,eps") {
    const double eps = 0.1;
    auto rep = pcf(Mixture({-eps, 0.0, eps}));
    REQUIRE(rep.per_mean_pcf[0] == Catch::Approx(0.02).epsilon(1e-12));
    REQUIRE(rep.per_mean_pcf[1] == Catch::Approx(0.01).epsilon(1e-12));
    REQUIRE(rep.per_mean_pcf[2] == Catch::Approx(0.02).epsilon(1e-12));
    REQUIRE(rep.min_gap == Catch::Approx(0.1).epsilon(1e-12));
  }
  SECTION("seven-component cluster mixture") {
    // gaps eps,eps,eps,eps,1,eps with eps = 0.1; the tightest mean is the
    // third one and its PCF is 4 eps^4 (1+2eps)(1+3eps) = 6.24e-4
    const double eps = 0.1;
    std::vector<double> means{0.0};
    for (double g : {eps, eps, eps, eps, 1.0, eps}) means.push_back(means.back() + g);
    auto rep = pcf(Mixture(means));
    const auto brute = oracles::pcf(means);
    for (int m = 0; m < 7; ++m) {
      REQUIRE(rep.per_mean_pcf[m] == Catch::Approx(brute[m]).epsilon(1e-12));
    }
    REQUIRE(rep.min_pcf == Catch::Approx(6.24e-4).epsilon(1e-12));
    REQUIRE(std::min_element(rep.per_mean_pcf.begin(), rep.per_mean_pcf.end()) -
                rep.per_mean_pcf.begin() == 2);
  }
  SECTION("duplicate means give exactly zero") {
    auto rep = pcf(Mixture({1.0, 1.0, 3.0}));
    REQUIRE(rep.min_pcf == 0.0);
    REQUIRE(rep.min_gap == 0.0);
  }
}

TEST_CASE("pcf invariances", "[mixture]") {
  oracles::MixtureSuite suite(91, 2, 8, -2.0, 2.0, 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto means = suite.next();
    const int k = static_cast<int>(means.size());
    auto rep = pcf(Mixture(means));

    // translation invariance
    const double shift = -3.0 + 6.0 * suite.uniform();
    auto shifted = means;
    for (double& m : shifted) m += shift;
    auto rep_shifted = pcf(Mixture(shifted));
    for (int m = 0; m < k; ++m) {
      REQUIRE(rep_shifted.per_mean_pcf[m] ==
              Catch::Approx(rep.per_mean_pcf[m]).epsilon(1e-10).margin(1e-14));
    }

    // scaling: pcf(c * means)_m = |c|^{k-1} pcf(means)_m
    const double c = -2.0 + 4.0 * suite.uniform();
    if (std::abs(c) > 0.01) {
      auto scaled = means;
      for (double& m : scaled) m *= c;
      auto rep_scaled = pcf(Mixture(scaled));
      const double factor = std::pow(std::abs(c), k - 1);
      // scaling can reverse the order; compare per sorted position
      std::vector<double> expect = rep.per_mean_pcf;
      if (c < 0.0) std::reverse(expect.begin(), expect.end());
      for (int m = 0; m < k; ++m) {
        REQUIRE(rep_scaled.per_mean_pcf[m] ==
                Catch::Approx(factor * expect[m]).epsilon(1e-10).margin(1e-300));
      }
    }

    // permutation invariance: the constructor sorts, so any input order
    // produces the same report
    auto shuffled = means;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1],
                shuffled[static_cast<std::size_t>(suite.uniform() * i)]);
    }
    auto rep_shuffled = pcf(Mixture(shuffled));
    REQUIRE(rep_shuffled.min_pcf == rep.min_pcf);
    REQUIRE(rep_shuffled.per_mean_pcf == rep.per_mean_pcf);

    // upper bound by the span
    const double span = means.back() - means.front();
    for (int m = 0; m < k; ++m) {
      REQUIRE(rep.per_mean_pcf[m] <=
              std::pow(span, k - 1) * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("variance-aware pcf", "[mixture]") {
  SECTION("variance gap dominates") {
    auto p = variance_aware_pcf({0.0, 0.0}, {1.0, 4.0});
    REQUIRE(p[0] == Catch::Approx(std::sqrt(3.0)).epsilon(1e-14));
    REQUIRE(p[1] == Catch::Approx(std::sqrt(3.0)).epsilon(1e-14));
  }
  SECTION("mean gap dominates") {
    auto p = variance_aware_pcf({0.0, 5.0}, {1.0, 1.0});
    REQUIRE(p == std::vector<double>{5.0, 5.0});
  }
  SECTION("mixed three-component case") {
    auto p = variance_aware_pcf({0.0, 0.1, 3.0}, {1.0, 1.09, 1.0});
    REQUIRE(p[0] == Catch::Approx(0.9).epsilon(1e-12));
  }
  SECTION("argument errors") {
    REQUIRE_THROWS_AS(variance_aware_pcf({0.0, 1.0}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(variance_aware_pcf({0.0}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(variance_aware_pcf({0.0, 1.0}, {1.0, -0.5}),
                      std::invalid_argument);
  }
}

TEST_CASE("mixture variance", "[mixture]") {
  REQUIRE(mixture_variance(Mixture({0.0, 0.0})) == 1.0);
  REQUIRE(mixture_variance(Mixture({-1.0, 1.0})) == Catch::Approx(2.0).epsilon(1e-15));
  REQUIRE(mixture_variance(Mixture({-1.0, 0.0, 1.0})) ==
          Catch::Approx(1.0 + 2.0 / 3.0).epsilon(1e-15));

  oracles::MixtureSuite suite(92, 2, 8, -2.0, 2.0, 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto means = suite.next();
    const double var = mixture_variance(Mixture(means));
    REQUIRE(var >= 1.0);
    const bool all_equal =
        std::all_of(means.begin(), means.end(),
                    [&](double m) { return m == means.front(); });
    if (all_equal) {
      REQUIRE(var == 1.0);
    }
  }
}

TEST_CASE("centering means", "[mixture]") {
  SECTION("two points") {
    auto [shifted, shift] = center({1.0, 3.0});
    REQUIRE(shifted == std::vector<double>{-1.0, 1.0});
    REQUIRE(shift == 2.0);
  }
  SECTION("already centered") {
    auto [shifted, shift] = center({0.0, 0.0, 0.0});
    REQUIRE(shifted == std::vector<double>{0.0, 0.0, 0.0});
    REQUIRE(shift == 0.0);
  }
  SECTION("arithmetic progression") {
    const double eps = 0.3;
    auto [shifted, shift] = center({0.0, eps, 2 * eps});
    REQUIRE(shift == Catch::Approx(0.3).epsilon(1e-14));
    REQUIRE(shifted[0] == Catch::Approx(-0.3).epsilon(1e-14));
    REQUIRE(shifted[1] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(shifted[2] == Catch::Approx(0.3).epsilon(1e-14));
  }
  SECTION("zero mean and exact gap preservation") {
    oracles::MixtureSuite suite(93, 2, 8, -5.0, 5.0, 0.0);
    for (int trial = 0; trial < 100; ++trial) {
      auto means = suite.next();
      auto [shifted, shift] = center(means);
      double max_abs = 0.0, sum = 0.0;
      for (double m : means) max_abs = std::max(max_abs, std::abs(m));
      for (double m : shifted) sum += m;
      REQUIRE(std::abs(sum) <= 1e-12 * means.size() * std::max(1.0, max_abs));
      for (std::size_t i = 0; i + 1 < means.size(); ++i) {
        // subtracting the common shift rounds each value once, so gaps are
        // preserved to one ulp, not bit-exactly
        const double gap = means[i + 1] - means[i];
        REQUIRE(shifted[i + 1] - shifted[i] ==
                Catch::Approx(gap).margin(4e-16 * std::max(1.0, max_abs)));
      }
      REQUIRE_THROWS_AS(center({}), std::invalid_argument);
    }
  }
}

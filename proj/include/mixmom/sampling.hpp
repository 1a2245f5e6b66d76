#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixmom/kahan.hpp"
#include "mixmom/mixture.hpp"
#include "mixmom/rng.hpp"

namespace mixmom {

struct SampleSet {
  std::vector<double> values;
  std::uint64_t seed = 0;
  int source_k = 0;  // 0 when loaded from a file
};

// Value of sample `index` under (mixture, seed). Counters 2*index and
// 2*index + 1 feed the component pick and the normal variate, so any
// subrange of the stream can be generated independently.
inline double sample_value_at(const Mixture& mixture, std::uint64_t seed,
                              std::uint64_t index) {
  const CounterRng rng(seed);
  const int k = mixture.k();
  const double u = rng.uniform01(2 * index);
  int component = static_cast<int>(u * static_cast<double>(k));
  if (component >= k) component = k - 1;
  const double z = inverse_normal_cdf(rng.uniform01(2 * index + 1));
  return mixture.means()[component] + z;
}

// n i.i.d. draws: component uniform over {1..k}, then Normal(mu_i, 1).
// Deterministic in (mixture, n, seed).
inline SampleSet sample(const Mixture& mixture, std::uint64_t n, std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("sample: n must be positive");
  }
  SampleSet set;
  set.seed = seed;
  set.source_k = mixture.k();
  set.values.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    set.values[i] = sample_value_at(mixture, seed, i);
  }
  return set;
}

// Shift all samples by minus their empirical mean; returns the shifted set
// and the shift. Pairwise differences are preserved exactly.
inline std::pair<SampleSet, double> center_samples(SampleSet set) {
  if (set.values.empty()) {
    throw std::invalid_argument("center_samples: sample set is empty");
  }
  KahanSum sum;
  for (double v : set.values) sum.add(v);
  const double shift = sum.value() / static_cast<double>(set.values.size());
  for (double& v : set.values) v -= shift;
  return {std::move(set), shift};
}

// Plain-text sample format: one decimal value per line, '#' lines ignored.
inline SampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_samples: cannot open " + path.string());
  }
  SampleSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::size_t consumed = 0;
    double value;
    try {
      value = std::stod(line.substr(pos), &consumed);
    } catch (const std::exception&) {
      throw std::runtime_error("load_samples: bad value at line " +
                               std::to_string(lineno) + " of " + path.string());
    }
    if (!std::isfinite(value)) {
      throw std::runtime_error("load_samples: non-finite value at line " +
                               std::to_string(lineno) + " of " + path.string());
    }
    set.values.push_back(value);
  }
  if (set.values.empty()) {
    throw std::runtime_error("load_samples: no samples in " + path.string());
  }
  return set;
}

inline void save_samples(const std::filesystem::path& path, const SampleSet& set) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_samples: cannot open " + path.string());
  }
  out.precision(17);
  for (double v : set.values) out << v << '\n';
}

}  // namespace mixmom

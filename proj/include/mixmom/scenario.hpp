#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "mixmom/analysis.hpp"
#include "mixmom/pipeline.hpp"

namespace mixmom {

// A reproducible trial battery. Gaps define the means up to translation
// (the mixture is centered); "eps" / "eps2" tokens in the gap list resolve
// to epsilon and epsilon^2 at load time.
struct Scenario {
  std::string name;
  std::vector<double> gaps;
  double epsilon = 0.0;
  double delta = 0.0;
  std::optional<std::uint64_t> n_override;
  int trials = 0;
  std::uint64_t base_seed = 0;

  int k() const { return static_cast<int>(gaps.size()) + 1; }

  Mixture build_mixture() const {
    std::vector<double> means(gaps.size() + 1, 0.0);
    for (std::size_t i = 0; i < gaps.size(); ++i) means[i + 1] = means[i] + gaps[i];
    return Mixture(center(means).first);
  }

  std::uint64_t sample_count() const {
    if (n_override) return *n_override;
    const auto count = sample_count_pcf(epsilon, delta, build_mixture());
    if (count.saturated) {
      throw std::runtime_error(
          "scenario '" + name +
          "': required sample count overflows; set n explicitly");
    }
    return count.value;
  }
};

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.name = j.at("name").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("scenario: missing or invalid field 'name'");
  }
  if (!j.contains("epsilon") || !j["epsilon"].is_number()) {
    throw std::runtime_error("scenario: missing or invalid field 'epsilon'");
  }
  s.epsilon = j["epsilon"].get<double>();
  if (!(s.epsilon > 0.0)) {
    throw std::runtime_error("scenario: field 'epsilon' must be positive");
  }
  if (!j.contains("gaps") || !j["gaps"].is_array()) {
    throw std::runtime_error("scenario: missing or invalid field 'gaps'");
  }
  for (const auto& g : j["gaps"]) {
    double value;
    if (g.is_number()) {
      value = g.get<double>();
    } else if (g.is_string()) {
      const std::string token = g.get<std::string>();
      if (token == "eps") {
        value = s.epsilon;
      } else if (token == "eps2") {
        value = s.epsilon * s.epsilon;
      } else {
        throw std::runtime_error("scenario: field 'gaps' has unknown token '" +
                                 token + "' (expected \"eps\" or \"eps2\")");
      }
    } else {
      throw std::runtime_error(
          "scenario: field 'gaps' entries must be numbers or tokens");
    }
    if (!(value > 0.0)) {
      throw std::runtime_error("scenario: field 'gaps' must be strictly positive");
    }
    s.gaps.push_back(value);
  }
  if (s.gaps.empty()) {
    throw std::runtime_error("scenario: field 'gaps' must be nonempty");
  }
  if (s.k() > kMaxComponents) {
    throw std::runtime_error("scenario: field 'gaps' implies k = " +
                             std::to_string(s.k()) + " > " +
                             std::to_string(kMaxComponents));
  }
  if (!j.contains("delta") || !j["delta"].is_number()) {
    throw std::runtime_error("scenario: missing or invalid field 'delta'");
  }
  s.delta = j["delta"].get<double>();
  if (!(s.delta > 0.0) || !(s.delta < 1.0)) {
    throw std::runtime_error("scenario: field 'delta' must lie in (0,1)");
  }
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<std::int64_t>() < 1) {
      throw std::runtime_error("scenario: field 'n' must be a positive integer");
    }
    s.n_override = j["n"].get<std::uint64_t>();
  }
  if (!j.contains("trials") || !j["trials"].is_number_integer() ||
      j["trials"].get<int>() < 1) {
    throw std::runtime_error("scenario: missing or invalid field 'trials'");
  }
  s.trials = j["trials"].get<int>();
  if (!j.contains("base_seed") || !j["base_seed"].is_number_integer() ||
      (!j["base_seed"].is_number_unsigned() &&
       j["base_seed"].get<std::int64_t>() < 0)) {
    throw std::runtime_error("scenario: missing or invalid field 'base_seed'");
  }
  s.base_seed = j["base_seed"].get<std::uint64_t>();
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_scenario: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_scenario: " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

// Trial t uses seed base_seed + t. Trials may run on several threads;
// records are stored by trial index, so the output is schedule-independent.
inline std::vector<TrialRecord> run_scenario(const Scenario& scenario,
                                             int threads = 1) {
  const Mixture mixture = scenario.build_mixture();
  const std::uint64_t n = scenario.sample_count();
  std::vector<TrialRecord> records(scenario.trials);
  const int workers = std::max(1, std::min(threads, scenario.trials));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= scenario.trials) return;
      records[t] = run_pipeline(mixture, n, scenario.delta,
                                scenario.base_seed + static_cast<std::uint64_t>(t));
      records[t].trial_index = t;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return records;
}

// Shortest representation that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return (v.size() % 2 == 1) ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace detail

struct ScenarioSummary {
  double mean_max_error = 0.0;
  double median_max_error = 0.0;
  double q90_max_error = 0.0;
  double median_eps_effective = 0.0;
  double within_bound_fraction = 0.0;
  int failed_trials = 0;
};

inline ScenarioSummary summarize(const std::vector<TrialRecord>& records) {
  ScenarioSummary s;
  std::vector<double> max_errors;
  std::vector<double> eps_eff;
  int within = 0;
  int ok = 0;
  for (const auto& r : records) {
    if (r.failed) {
      ++s.failed_trials;
      continue;
    }
    ++ok;
    max_errors.push_back(r.max_error);
    eps_eff.push_back(r.eps_effective);
    if (r.within_bound) ++within;
  }
  if (ok > 0) {
    KahanSum sum;
    for (double e : max_errors) sum.add(e);
    s.mean_max_error = sum.value() / ok;
    s.median_max_error = detail::median_of(max_errors);
    std::vector<double> sorted = max_errors;
    std::sort(sorted.begin(), sorted.end());
    s.q90_max_error = sorted[static_cast<std::size_t>(
        std::min<double>(sorted.size() - 1.0, std::ceil(0.9 * sorted.size()) - 1.0))];
    s.median_eps_effective = detail::median_of(eps_eff);
  }
  s.within_bound_fraction =
      records.empty() ? 0.0 : static_cast<double>(within) / records.size();
  return s;
}

// CSV contract: header, one row per trial, one summary row. Column order is
// fixed: trial_index, seed, n, eps_effective, max_error, within_bound,
// per_mean_error_1..k, moment_residual_1..k. Doubles use the shortest
// round-trip form; within_bound is 0/1 per trial and the exact fraction in
// the summary row. The summary row carries the median of each numeric
// column under trial_index "summary".
inline void write_trials_csv(std::ostream& out, const Scenario& scenario,
                             const std::vector<TrialRecord>& records) {
  const int k = scenario.k();
  out << "trial_index,seed,n,eps_effective,max_error,within_bound";
  for (int i = 1; i <= k; ++i) out << ",per_mean_error_" << i;
  for (int i = 1; i <= k; ++i) out << ",moment_residual_" << i;
  out << '\n';
  for (const auto& r : records) {
    out << r.trial_index << ',' << r.seed << ',' << r.n << ','
        << format_double(r.eps_effective) << ',' << format_double(r.max_error)
        << ',' << (r.within_bound ? 1 : 0);
    for (int i = 0; i < k; ++i) {
      out << ','
          << (r.failed ? "nan" : format_double(r.per_mean_error[i]));
    }
    for (int i = 0; i < k; ++i) {
      out << ','
          << (r.failed ? "nan" : format_double(r.moment_residuals[i]));
    }
    out << '\n';
  }
  const auto summary = summarize(records);
  std::vector<double> per_mean_median(k), residual_median(k);
  for (int i = 0; i < k; ++i) {
    std::vector<double> col1, col2;
    for (const auto& r : records) {
      if (r.failed) continue;
      col1.push_back(r.per_mean_error[i]);
      col2.push_back(r.moment_residuals[i]);
    }
    per_mean_median[i] = detail::median_of(col1);
    residual_median[i] = detail::median_of(col2);
  }
  const std::uint64_t n = records.empty() ? 0 : records.front().n;
  out << "summary," << scenario.base_seed << ',' << n << ','
      << format_double(summary.median_eps_effective) << ','
      << format_double(summary.median_max_error) << ','
      << format_double(summary.within_bound_fraction);
  for (int i = 0; i < k; ++i) out << ',' << format_double(per_mean_median[i]);
  for (int i = 0; i < k; ++i) out << ',' << format_double(residual_median[i]);
  out << '\n';
}

}  // namespace mixmom

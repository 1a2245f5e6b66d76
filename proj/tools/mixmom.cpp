// Command-line front end: PCF reports, error bounds, scenario batteries,
// estimation from sample files, and the root-sensitivity demo.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "mixmom/mixmom.hpp"

namespace {

std::vector<double> parse_comma_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != token.size()) {
      throw CLI::ValidationError("expected a comma-separated list of numbers, got '" +
                                 text + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw CLI::ValidationError("expected a comma-separated list of numbers");
  }
  return values;
}

void print_pcf(const std::vector<double>& means, const std::vector<double>& variances) {
  mixmom::Mixture mix(means);
  const auto report = mixmom::pcf(mix);
  std::printf("k: %d\n", mix.k());
  std::printf("per-mean pcf:");
  for (double p : report.per_mean_pcf) std::printf(" %s", mixmom::format_double(p).c_str());
  std::printf("\nmin_pcf: %s\n", mixmom::format_double(report.min_pcf).c_str());
  std::printf("min_gap: %s\n", mixmom::format_double(report.min_gap).c_str());
  std::printf("mixture_variance: %s\n",
              mixmom::format_double(mixmom::mixture_variance(mix)).c_str());
  if (!variances.empty()) {
    const auto vap = mixmom::variance_aware_pcf(means, variances);
    std::printf("variance-aware pcf:");
    for (double p : vap) std::printf(" %s", mixmom::format_double(p).c_str());
    std::printf("\n");
  }
}

void print_bounds(const std::vector<double>& means, double delta, double eps) {
  mixmom::Mixture mix(means);
  const auto report = mixmom::mean_error_bounds(mix);
  std::printf("sigma: %s\n", mixmom::format_double(report.sigma).c_str());
  std::printf("c(sigma,k): %s\n", mixmom::format_double(report.c_sigma_k).c_str());
  std::printf("%-14s %-14s %-14s %-14s\n", "mean", "pcf", "threshold", "error_coeff");
  for (std::size_t i = 0; i < report.per_mean.size(); ++i) {
    const auto& b = report.per_mean[i];
    std::printf("%-14g %-14g %-14g %-14g\n", mix.means()[i], b.pcf, b.threshold,
                b.error_coeff);
  }
  std::printf("admissible moment-error threshold (min over means): %s\n",
              mixmom::format_double(report.noise_threshold).c_str());
  std::printf("eps %s %s the threshold\n", mixmom::format_double(eps).c_str(),
              eps < report.noise_threshold ? "satisfies" : "violates");
  const auto n1 = mixmom::sample_count_pcf(eps, delta, mix);
  std::printf("pcf-aware sample count: %llu%s\n",
              static_cast<unsigned long long>(n1.value),
              n1.saturated ? " (saturated)" : "");
  const auto n2 = mixmom::sample_count_worst_case(eps, delta, mix.k(), report.sigma);
  std::printf("worst-case sample count: %llu%s\n",
              static_cast<unsigned long long>(n2.value),
              n2.saturated ? " (saturated)" : "");
}

void run_simulate(const std::string& scenario_path, const std::string& out_path,
                  int threads) {
  const auto scenario = mixmom::load_scenario(scenario_path);
  std::fprintf(stderr, "scenario '%s': k=%d, n=%llu, trials=%d\n",
               scenario.name.c_str(), scenario.k(),
               static_cast<unsigned long long>(scenario.sample_count()),
               scenario.trials);
  const auto records = mixmom::run_scenario(scenario, threads);
  for (const auto& r : records) {
    if (r.failed) {
      std::fprintf(stderr, "trial %d failed: %s\n", r.trial_index,
                   r.failure_reason.c_str());
    }
  }
  const auto summary = mixmom::summarize(records);
  std::fprintf(stderr,
               "max_error: mean %g, median %g, q90 %g; within-bound fraction %g\n",
               summary.mean_max_error, summary.median_max_error,
               summary.q90_max_error, summary.within_bound_fraction);
  if (out_path.empty()) {
    mixmom::write_trials_csv(std::cout, scenario, records);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    mixmom::write_trials_csv(out, scenario, records);
  }
}

void run_estimate(const std::string& input, int k, double delta) {
  auto samples = mixmom::load_samples(input);
  const auto result = mixmom::estimate_from_samples(std::move(samples), k, delta);
  std::printf("recovered means:\n");
  for (double m : result.means) std::printf("%s\n", mixmom::format_double(m).c_str());
  if (result.root_flags > 0) {
    std::fprintf(stderr, "note: %d roots exceeded the imaginary tolerance\n",
                 result.root_flags);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uniform spherical Gaussian mixtures: method-of-moments mean "
               "recovery and hardness diagnostics"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::string means_text, variances_text;
  auto* cmd_pcf = app.add_subcommand("pcf", "pair correlation factor report");
  cmd_pcf->add_option("--means", means_text, "comma-separated means")->required();
  cmd_pcf->add_option("--variances", variances_text,
                      "comma-separated variances (adds the variance-aware PCF)");

  double delta = 0.05, eps = 1e-3;
  auto* cmd_bounds = app.add_subcommand("bounds", "per-mean error bounds and "
                                                  "sample complexities");
  cmd_bounds->add_option("--means", means_text, "comma-separated means")->required();
  cmd_bounds->add_option("--delta", delta, "confidence parameter in (0,1)")->required();
  cmd_bounds->add_option("--eps", eps, "target moment accuracy")->required();

  std::string scenario_path, out_path;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  auto* cmd_sim = app.add_subcommand("simulate", "run a scenario battery to CSV");
  cmd_sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  cmd_sim->add_option("--out", out_path, "output CSV path (default: stdout)");
  cmd_sim->add_option("--threads", threads, "worker threads");

  std::string input_path;
  int k = 2;
  auto* cmd_est = app.add_subcommand("estimate", "estimate means from a sample file");
  cmd_est->add_option("--input", input_path, "sample file, one value per line")
      ->required();
  cmd_est->add_option("--k", k, "number of components")->required();
  cmd_est->add_option("--delta", delta, "confidence parameter in (0,1)");

  std::string demo_name;
  auto* cmd_demo = app.add_subcommand("demo", "built-in demonstrations");
  cmd_demo->add_option("name", demo_name, "demo name: wilkinson")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (cmd_pcf->parsed()) {
      print_pcf(parse_comma_list(means_text),
                variances_text.empty() ? std::vector<double>{}
                                       : parse_comma_list(variances_text));
    } else if (cmd_bounds->parsed()) {
      print_bounds(parse_comma_list(means_text), delta, eps);
    } else if (cmd_sim->parsed()) {
      run_simulate(scenario_path, out_path, threads);
    } else if (cmd_est->parsed()) {
      run_estimate(input_path, k, delta);
    } else if (cmd_demo->parsed()) {
      if (demo_name != "wilkinson") {
        std::fprintf(stderr, "unknown demo '%s'\n", demo_name.c_str());
        return 1;
      }
      const auto result = mixmom::wilkinson_demo();
      std::printf("omega(x) = (x-1)(x-2)...(x-20)\n");
      std::printf("largest real root, exact coefficients:      %.9f\n",
                  result.root_before);
      std::printf("largest real root, x^19 dropped by 2^-23:   %.9f\n",
                  result.root_after);
    }
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

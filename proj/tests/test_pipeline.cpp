#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixmom/pipeline.hpp"
#include "mixmom/scenario.hpp"
#include "oracles.hpp"

using namespace mixmom;

TEST_CASE("pipeline recovers a well-separated pair", "[pipeline]") {
  Mixture mix({-1.0, 1.0});
  auto record = run_pipeline(mix, 1000000, 0.05, 555);
  REQUIRE_FALSE(record.failed);
  // threshold pinned from a pilot battery of ten seeds (worst 0.0074)
  REQUIRE(record.max_error <= 0.05);
  REQUIRE(record.per_mean_error.size() == 2);
  REQUIRE(record.max_error ==
          std::max(record.per_mean_error[0], record.per_mean_error[1]));
  REQUIRE(record.recovered_means.size() == 2);
  REQUIRE(std::isfinite(record.eps_effective));
}

TEST_CASE("pipeline failure is a structured record", "[pipeline]") {
  Mixture mix({-1.0, 1.0});
  auto record = run_pipeline(mix, 3, 0.05, 1);  // below the group minimum
  REQUIRE(record.failed);
  REQUIRE_FALSE(record.failure_reason.empty());
}

TEST_CASE("exact-moment injection recovers means to 1e-8", "[pipeline]") {
  oracles::MixtureSuite suite(11, 2, 8, -2.0, 2.0, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    Mixture mix(suite.next());
    auto record = run_pipeline_exact(mix);
    REQUIRE_FALSE(record.failed);
    REQUIRE(record.max_error <= 1e-8);
    REQUIRE(record.eps_effective <= 1e-12);
  }
}

TEST_CASE("estimate mode without ground truth", "[pipeline]") {
  Mixture mix({-2.0, 2.0});
  auto samples = sample(mix, 500000, 8088);
  auto result = estimate_from_samples(samples, 2, 0.05);
  REQUIRE(result.means.size() == 2);
  REQUIRE(result.means[0] == Catch::Approx(-2.0).margin(0.05));
  REQUIRE(result.means[1] == Catch::Approx(2.0).margin(0.05));
  REQUIRE_THROWS_AS(estimate_from_samples(samples, 1, 0.05), std::invalid_argument);
  REQUIRE_THROWS_AS(estimate_from_samples(samples, 42, 0.05), std::invalid_argument);
}

TEST_CASE("scenario json loading", "[pipeline]") {
  SECTION("shipped scenario files encode the two cluster geometries") {
    auto a = load_scenario(std::filesystem::path(MIXMOM_SCENARIO_DIR) /
                           "mixtureA.json");
    REQUIRE(a.k() == 7);
    REQUIRE(a.epsilon == 0.1);
    REQUIRE(a.gaps == std::vector<double>{0.1, 0.1, 0.1, 0.1, 1.0, 0.1});
    auto b = load_scenario(std::filesystem::path(MIXMOM_SCENARIO_DIR) /
                           "mixtureB.json");
    REQUIRE(b.k() == 7);
    REQUIRE(b.gaps ==
            std::vector<double>{0.1, 0.1, 0.1, 1.0, 0.1, 0.1 * 0.1});
    // both shipped batteries use the same n and trial count
    REQUIRE(a.n_override == b.n_override);
    REQUIRE(a.trials == b.trials);
  }
  SECTION("gap tokens resolve against epsilon") {
    nlohmann::json j = {{"name", "t"},     {"gaps", {"eps", 1.0, "eps2"}},
                        {"epsilon", 0.2},  {"delta", 0.05},
                        {"trials", 1},     {"base_seed", 7}};
    auto s = scenario_from_json(j);
    REQUIRE(s.gaps[0] == 0.2);
    REQUIRE(s.gaps[2] == Catch::Approx(0.04).epsilon(1e-15));
    REQUIRE_FALSE(s.n_override.has_value());
  }
  SECTION("invalid fields are named in the error") {
    nlohmann::json base = {{"name", "t"},    {"gaps", {1.0}},
                           {"epsilon", 0.1}, {"delta", 0.05},
                           {"trials", 1},    {"base_seed", 7}};
    auto bad_gap = base;
    bad_gap["gaps"] = {-1.0};
    REQUIRE_THROWS_WITH(scenario_from_json(bad_gap),
                        Catch::Matchers::ContainsSubstring("gaps"));
    auto too_many = base;
    too_many["gaps"] = nlohmann::json::array();
    for (int i = 0; i < 12; ++i) too_many["gaps"].push_back(0.5);
    REQUIRE_THROWS_WITH(scenario_from_json(too_many),
                        Catch::Matchers::ContainsSubstring("gaps"));
    auto bad_delta = base;
    bad_delta["delta"] = 1.5;
    REQUIRE_THROWS_WITH(scenario_from_json(bad_delta),
                        Catch::Matchers::ContainsSubstring("delta"));
    auto bad_token = base;
    bad_token["gaps"] = {"eps3"};
    REQUIRE_THROWS_WITH(scenario_from_json(bad_token),
                        Catch::Matchers::ContainsSubstring("eps3"));
  }
}

TEST_CASE("scenario battery determinism and csv shape", "[pipeline]") {
  Scenario s;
  s.name = "tiny";
  s.gaps = {2.0};
  s.epsilon = 0.1;
  s.delta = 0.05;
  s.n_override = 50000;
  s.trials = 3;
  s.base_seed = 31;

  auto records = run_scenario(s, 1);
  REQUIRE(records.size() == 3);
  for (int t = 0; t < 3; ++t) {
    REQUIRE(records[t].trial_index == t);
    REQUIRE(records[t].seed == s.base_seed + t);
    REQUIRE_FALSE(records[t].failed);
  }

  // identical bytes across repeated runs and across thread counts
  std::ostringstream csv1, csv2, csv3;
  write_trials_csv(csv1, s, records);
  write_trials_csv(csv2, s, run_scenario(s, 1));
  write_trials_csv(csv3, s, run_scenario(s, 2));
  REQUIRE(csv1.str() == csv2.str());
  REQUIRE(csv1.str() == csv3.str());

  // header + trials + summary
  std::istringstream lines(csv1.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    if (count == 1) {
      REQUIRE(line ==
              "trial_index,seed,n,eps_effective,max_error,within_bound,"
              "per_mean_error_1,per_mean_error_2,moment_residual_1,"
              "moment_residual_2");
    }
  }
  REQUIRE(count == 1 + 3 + 1);

  // summary within-bound fraction is the exact count ratio
  const auto summary = summarize(records);
  int within = 0;
  for (const auto& r : records) within += r.within_bound ? 1 : 0;
  REQUIRE(summary.within_bound_fraction == within / 3.0);
}

TEST_CASE("csv doubles use shortest round-trip formatting", "[pipeline]") {
  REQUIRE(format_double(0.1) == "0.1");
  REQUIRE(format_double(1.0 / 3.0) == "0.3333333333333333");
  REQUIRE(format_double(1e-5) == "1e-05");
  const double value = 0.12345678901234567;
  REQUIRE(std::stod(format_double(value)) == value);
}

TEST_CASE("cli binary end-to-end", "[pipeline]") {
  namespace fs = std::filesystem;
  const std::string cli = MIXMOM_CLI_PATH;
  if (!fs::exists(cli)) {
    SKIP("CLI binary not built");
  }
  auto run = [&](const std::string& args) {
    const std::string out_path =
        (fs::temp_directory_path() / "mixmom_cli_out.txt").string();
    const int rc = std::system((cli + " " + args + " > " + out_path + " 2>&1").c_str());
    std::ifstream in(out_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    fs::remove(out_path);
    return std::make_pair(rc == 0 ? 0 : 1, buffer.str());
  };

  auto [rc_pcf, out_pcf] = run("pcf --means -1,0,1");
  REQUIRE(rc_pcf == 0);
  REQUIRE(out_pcf.find("min_gap") != std::string::npos);
  REQUIRE(out_pcf.find("2") != std::string::npos);

  auto [rc_bounds, out_bounds] = run("bounds --means -1,0,1 --delta 0.05 --eps 1e-3");
  REQUIRE(rc_bounds == 0);
  REQUIRE(out_bounds.find("c(sigma,k)") != std::string::npos);

  auto [rc_demo, out_demo] = run("demo wilkinson");
  REQUIRE(rc_demo == 0);
  REQUIRE(out_demo.find("20.8") != std::string::npos);

  auto [rc_bad, out_bad] = run("frobnicate");
  REQUIRE(rc_bad != 0);

  // estimate on a generated sample file
  Mixture mix({-2.0, 2.0});
  const fs::path sample_path = fs::temp_directory_path() / "mixmom_cli_samples.txt";
  save_samples(sample_path, sample(mix, 200000, 99));
  auto [rc_est, out_est] =
      run("estimate --input " + sample_path.string() + " --k 2 --delta 0.05");
  REQUIRE(rc_est == 0);
  REQUIRE(out_est.find("-2.") != std::string::npos);
  fs::remove(sample_path);

  // simulate a tiny scenario to a csv
  const fs::path scen_path = fs::temp_directory_path() / "mixmom_cli_scen.json";
  {
    std::ofstream out(scen_path);
    out << R"({"name":"t","gaps":[2.0],"epsilon":0.1,"delta":0.05,)"
        << R"("n":50000,"trials":2,"base_seed":5})";
  }
  const fs::path csv_path = fs::temp_directory_path() / "mixmom_cli_out.csv";
  auto [rc_sim, out_sim] = run("simulate --scenario " + scen_path.string() +
                               " --out " + csv_path.string());
  REQUIRE(rc_sim == 0);
  std::ifstream csv(csv_path);
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  REQUIRE(rows == 1 + 2 + 1);
  fs::remove(scen_path);
  fs::remove(csv_path);
}

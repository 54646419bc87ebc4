// Config parsing and normalization, number formatting, CSV and JSON report
// shapes, and the config fingerprint.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "pzf/cli_io.hpp"

using namespace pzf;

TEST_CASE("empty config text yields the full default run") {
  const RunConfig c = parse_config("");
  CHECK(c.raw.m1 == 0.6);
  CHECK(c.raw.gz == 0.75);
  CHECK(c.raw.su == 8.23);
  CHECK(c.raw.sd == 12.30);
  CHECK(c.mode == DilutionMode::Downstream);
  // baseline pins the fish loss rate; components alone would give 0.1915
  REQUIRE(c.raw.m3_override.has_value());
  CHECK(*c.raw.m3_override == 0.324);
  CHECK_FALSE(c.raw.gs_override.has_value());
  CHECK_FALSE(c.raw.m2_override.has_value());
  CHECK(c.analysis.integrator.dt == 0.01);
  CHECK(c.analysis.integrator.t_end == 1000.0);
  CHECK(c.analysis.transient == 500.0);
  CHECK(c.analysis.integrator.method == Method::Rk4Fixed);

  CHECK(c.fingerprint.size() == 16);
  for (const char ch : c.fingerprint) {
    CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
  }
  CHECK(c.fingerprint == config_fingerprint(c));
}

TEST_CASE("keys, comments, and last-wins duplicates") {
  const RunConfig c = parse_config(
      "# calibration override\n"
      "m1 = 0.7\n"
      "\n"
      "su = 5.0\n"
      "su = 6.0   # duplicate wins\n"
      "delta_mode = magnitude\n"
      "method = rk45\n"
      "rel_tol = 1e-6\n"
      "m3_override = 0.2\n"
      "sample_every = 5\n");
  CHECK(c.raw.m1 == 0.7);
  CHECK(c.raw.su == 6.0);
  CHECK(c.mode == DilutionMode::Magnitude);
  CHECK(c.analysis.integrator.method == Method::Rk45Adaptive);
  CHECK(c.analysis.integrator.rel_tol == 1e-6);
  CHECK(c.raw.m3_override == 0.2);
  CHECK(c.analysis.integrator.sample_every == 5);
}

TEST_CASE("config rejections carry key and line information") {
  CHECK_THROWS_WITH_AS(parse_config("banana = 1\n"), doctest::Contains("banana"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("m1 = 0.6\nm1 0.7\n"),
                       doctest::Contains("malformed line"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("m1 = brown\n"), doctest::Contains("invalid value"),
                       ConfigError);
  CHECK_THROWS_AS(parse_config("m1 = -0.5\n"), ConfigError);   // sign validation
  CHECK_THROWS_AS(parse_config("dt = 0\n"), ConfigError);      // integrator validation
  CHECK_THROWS_AS(parse_config("method = euler\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("delta_mode = sideways\n"), ConfigError);
}

TEST_CASE("normalization round-trips and fingerprints configs") {
  RunConfig c = parse_config("m1 = 0.61\nsu = 7.9\nmethod = rk45\n");
  const std::string canon = normalize_config(c);
  CHECK(canon.find("m3_override = 0.324\n") != std::string::npos);

  const RunConfig back = parse_config(canon);
  CHECK(normalize_config(back) == canon);
  CHECK(back.fingerprint == c.fingerprint);

  RunConfig other = parse_config("m1 = 0.62\nsu = 7.9\nmethod = rk45\n");
  CHECK(other.fingerprint != c.fingerprint);
}

TEST_CASE("shortest round-trip double formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
  CHECK(format_double(0.0) == "0");

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 19) - 9);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("time series csv layout") {
  Trajectory traj;
  traj.times = {0.0, 1.0};
  traj.states = {State{1.0, 1.0, 1.0}, State{0.5, 2.0, 3.0}};
  CHECK(timeseries_csv(traj) == "t,P,Z,F\n0,1,1,1\n1,0.5,2,3\n");
}

TEST_CASE("scan csv layout, including error rows and escaping") {
  ScanResult scan;
  scan.param = "su";

  ScanRow ok;
  ok.value = 8.0;
  AttractorSummary sum;
  sum.kind = AttractorKind::FixedPoint;
  sum.lambda1 = -0.003;
  sum.lambda1_converged = true;
  sum.peak_values = {1.5, 2.5};
  ok.summary = sum;

  ScanRow failed;
  failed.value = 9.0;
  failed.error = "boom, with comma";

  scan.rows = {ok, failed};
  CHECK(scan_csv(scan) ==
        "value,kind,collapsed,lambda1,lambda1_converged,levels,period_days,peaks,error\n"
        "8,fixed_point,,-0.003,1,,,1.5;2.5,\n"
        "9,error,,,,,,,\"boom, with comma\"\n");
}

TEST_CASE("equilibria report carries the reference comparison") {
  const RunConfig c = parse_config("");
  const auto j = equilibria_report(c);
  CHECK(j["fingerprint"] == c.fingerprint);
  REQUIRE(j.contains("equilibria"));
  CHECK(j["equilibria"].size() == 4);
  CHECK(j["equilibria"][0]["kind"] == "null");
  CHECK(j["equilibria"][3]["kind"] == "interior");
  CHECK(j["equilibria"][3]["residual"].get<double>() < 1e-10);

  REQUIRE(j.contains("paper_reference"));
  const auto& ref = j["paper_reference"];
  CHECK(ref["F_discrepancy"] == true);
  CHECK(ref["Z_rel_diff"].get<double>() < 0.01);
  CHECK(ref["P_rel_diff"].get<double>() < 0.01);
  CHECK(ref["F_rel_diff"].get<double>() > 0.05);
}

TEST_CASE("stability report classifies all rest points") {
  const auto j = stability_report(parse_config(""));
  REQUIRE(j.contains("reports"));
  REQUIRE(j["reports"].size() == 4);
  for (const auto& rep : j["reports"]) {
    const std::string kind = rep["kind"];
    const std::string cls = rep["classification"];
    if (kind == "interior") {
      CHECK(cls == "stable");
    } else {
      CHECK(cls == "unstable");
    }
  }
}

TEST_CASE("effective parameter report records provenance") {
  const auto j = effective_json(parse_config(""));
  CHECK(j["m3"] == 0.324);
  CHECK(j["gs"].get<double>() == doctest::Approx(2.2665847665847667).epsilon(1e-14));
  const std::string m3_note = j["provenance"][2];
  CHECK(m3_note.find("override") != std::string::npos);
  const std::string m2_note = j["provenance"][1];
  CHECK(m2_note.find("excluded") != std::string::npos);
}

TEST_CASE("text files are written verbatim") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pzf_io_test";
  fs::create_directories(dir);
  const fs::path p = dir / "out.csv";
  write_text_file(p, "a,b\n1,2\n");
  std::ifstream in(p, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "a,b\n1,2\n");
  fs::remove_all(dir);

  CHECK_THROWS_AS(write_text_file("/nonexistent_dir_pzf/x.txt", "y"), Error);
}

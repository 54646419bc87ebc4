// Peak detection, period estimation, Lyapunov estimates, attractor
// classification, parameter scans, and the margin-crossing locator.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pzf/attractor_analysis.hpp"
#include "pzf/cli_io.hpp"
#include "pzf/model_core.hpp"

using namespace pzf;

namespace {

RawParameters baseline_raw() {
  RawParameters raw;
  raw.m3_override = 0.324;
  return raw;
}

EffectiveParameters baseline() {
  return derive_effective(baseline_raw(), DilutionMode::Downstream);
}

// limit-cycle calibration: weak fish coupling, fast zooplankton saturation
RawParameters cycling_raw() {
  RawParameters raw;
  raw.gs_override = 1.5;
  raw.m2_override = 0.3;
  raw.m3_override = 0.3;
  raw.gf = 0.01;
  raw.kz = 3.0;
  raw.kf = 10.0;
  return raw;
}

std::vector<Peak> synthetic_peaks(const std::vector<double>& cycle_values,
                                  const std::vector<double>& cycle_gaps, int count) {
  std::vector<Peak> out;
  double t = 0.0;
  for (int i = 0; i < count; ++i) {
    out.push_back({t, cycle_values[i % cycle_values.size()]});
    t += cycle_gaps[i % cycle_gaps.size()];
  }
  return out;
}

}  // namespace

TEST_CASE("peaks of a sampled sine are found and refined") {
  std::vector<double> times, values;
  for (int i = 0; i <= 200; ++i) {
    times.push_back(0.1 * i);
    values.push_back(std::sin(0.1 * i));
  }
  const auto peaks = detect_peaks(times, values);
  REQUIRE(peaks.size() == 3);
  const double half_pi = std::acos(0.0);
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    CHECK(std::abs(peaks[k].time - (half_pi + 2.0 * std::numbers::pi * k)) < 5e-3);
    CHECK(std::abs(peaks[k].value - 1.0) < 1e-4);
  }
}

TEST_CASE("peak detection edge cases") {
  const std::vector<double> t3{0.0, 1.0, 2.0};
  CHECK(detect_peaks(t3, std::vector<double>{1.0, 2.0, 3.0}).empty());  // monotone
  CHECK(detect_peaks(t3, std::vector<double>{2.0, 2.0, 2.0}).empty());  // flat
  CHECK(detect_peaks(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}).empty());

  // plateaus are not strict maxima
  const std::vector<double> t4{0.0, 1.0, 2.0, 3.0};
  CHECK(detect_peaks(t4, std::vector<double>{0.0, 1.0, 1.0, 0.0}).empty());

  const auto one = detect_peaks(t3, std::vector<double>{0.0, 1.0, 0.0});
  REQUIRE(one.size() == 1);
  CHECK(one[0].time == 1.0);
  CHECK(one[0].value == doctest::Approx(1.0));
}

TEST_CASE("period estimation recovers level counts") {
  // one level, even spacing
  auto p1 = estimate_period(synthetic_peaks({1.0}, {10.0}, 12));
  REQUIRE(p1.has_value());
  CHECK(p1->levels == 1);
  CHECK(p1->period_days == doctest::Approx(10.0).epsilon(1e-12));

  // two alternating levels
  auto p2 = estimate_period(synthetic_peaks({1.0, 0.6}, {10.0}, 12));
  REQUIRE(p2.has_value());
  CHECK(p2->levels == 2);
  CHECK(p2->period_days == doctest::Approx(20.0).epsilon(1e-12));
  REQUIRE(p2->level_values.size() == 2);
  CHECK(p2->level_values[0] == doctest::Approx(0.6));
  CHECK(p2->level_values[1] == doctest::Approx(1.0));

  // three levels, uneven gaps summing to a 30-day cycle
  auto p3 = estimate_period(synthetic_peaks({1.0, 0.7, 0.4}, {7.0, 11.0, 12.0}, 12));
  REQUIRE(p3.has_value());
  CHECK(p3->levels == 3);
  CHECK(p3->period_days == doctest::Approx(30.0).epsilon(1e-12));

  // tiny level jitter is absorbed by the relative tolerance
  auto peaks = synthetic_peaks({1.0, 0.6}, {10.0}, 16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(-1e-5, 1e-5);
  for (auto& pk : peaks) pk.value += jitter(rng);
  auto pj = estimate_period(peaks);
  REQUIRE(pj.has_value());
  CHECK(pj->levels == 2);
}

TEST_CASE("period estimation rejects what it should") {
  CHECK_THROWS_WITH_AS(estimate_period(synthetic_peaks({1.0}, {10.0}, 7)),
                       doctest::Contains("insufficient peaks"), PreconditionError);

  // a value continuum produces either too many clusters or a fat one
  std::vector<Peak> noisy;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int i = 0; i < 24; ++i) noisy.push_back({10.0 * i, u(rng)});
  CHECK_FALSE(estimate_period(noisy).has_value());

  // five levels need ten peaks for two full cycles; nine are not enough
  CHECK_FALSE(estimate_period(synthetic_peaks({1.0, 0.9, 0.8, 0.7, 0.6}, {10.0}, 9)).has_value());
  auto p5 = estimate_period(synthetic_peaks({1.0, 0.9, 0.8, 0.7, 0.6}, {10.0}, 10));
  REQUIRE(p5.has_value());
  CHECK(p5->levels == 5);
}

TEST_CASE("lyapunov estimate of the settling baseline is negative") {
  AnalysisConfig cfg;
  cfg.integrator.t_end = 2000.0;
  cfg.transient = 500.0;
  const auto est = largest_lyapunov(baseline(), State{1.0, 1.0, 1.0}, cfg);
  // leading decay rate of the stable spiral, about -0.0034 per day
  CHECK(est.lambda1 < -0.0005);
  CHECK(est.lambda1 > -0.01);
  CHECK(est.converged);

  cfg.integrator.t_end = 900.0;  // below twice the transient
  CHECK_THROWS_AS(largest_lyapunov(baseline(), State{1.0, 1.0, 1.0}, cfg),
                  PreconditionError);
}

TEST_CASE("classifier finds the baseline fixed point") {
  AnalysisConfig cfg;
  cfg.integrator.t_end = 4000.0;
  cfg.transient = 2000.0;
  const auto sum = classify_attractor(baseline(), State{1.0, 1.0, 1.0}, cfg);
  CHECK(sum.kind == AttractorKind::FixedPoint);
  REQUIRE(sum.fixed_point.has_value());
  CHECK(sum.fixed_point->p == doctest::Approx(1.7994770722052351).epsilon(1e-3));
  CHECK(sum.fixed_point->z == doctest::Approx(8.955665024630543).epsilon(1e-3));
  CHECK(sum.fixed_point->f == doctest::Approx(0.3367866253197779).epsilon(1e-3));
  CHECK(sum.lambda1 < 0.0);
}

TEST_CASE("classifier reports fish collapse at high upstream salinity") {
  auto raw = baseline_raw();
  raw.su = 8.51;
  AnalysisConfig cfg;
  cfg.integrator.t_end = 1000.0;
  cfg.transient = 400.0;
  const auto sum = classify_attractor(derive_effective(raw, DilutionMode::Downstream),
                                      State{1.0, 1.0, 1.0}, cfg);
  CHECK(sum.kind == AttractorKind::Collapse);
  REQUIRE(sum.collapsed_component.has_value());
  CHECK(*sum.collapsed_component == 'F');
  CHECK(sum.final_state.f < 1e-3);
}

TEST_CASE("classifier finds a single-level limit cycle") {
  AnalysisConfig cfg;
  cfg.integrator.t_end = 2500.0;
  cfg.transient = 500.0;
  const auto sum = classify_attractor(derive_effective(cycling_raw(), DilutionMode::Downstream),
                                      State{1.0, 1.0, 0.0}, cfg);
  CHECK(sum.kind == AttractorKind::Periodic);
  REQUIRE(sum.periodicity.has_value());
  CHECK(sum.periodicity->levels == 1);
  // frozen reference run: one zooplankton peak every 38.02 days
  CHECK(sum.periodicity->period_days == doctest::Approx(38.02).epsilon(0.01));
  CHECK_FALSE(sum.peak_values.empty());
}

TEST_CASE("classifier admits defeat on a truncated settling run") {
  // too short for the 1e-6 rest gate, too dead for peaks: honest unresolved
  AnalysisConfig cfg;
  cfg.integrator.t_end = 1800.0;
  cfg.transient = 800.0;
  const auto sum = classify_attractor(baseline(), State{1.0, 1.0, 1.0}, cfg);
  CHECK(sum.kind == AttractorKind::Unresolved);
  CHECK(sum.diagnostics.find("trailing |rhs|=") != std::string::npos);
}

TEST_CASE("attractor kind names") {
  CHECK(std::string(to_string(AttractorKind::FixedPoint)) == "fixed_point");
  CHECK(std::string(to_string(AttractorKind::Periodic)) == "periodic");
  CHECK(std::string(to_string(AttractorKind::Chaotic)) == "chaotic");
  CHECK(std::string(to_string(AttractorKind::Collapse)) == "collapse");
  CHECK(std::string(to_string(AttractorKind::Unresolved)) == "unresolved");
}

TEST_CASE("scan grids hit both endpoints and stay sorted") {
  AnalysisConfig cfg;
  cfg.integrator.t_end = 100.0;
  cfg.transient = 40.0;
  ScanOptions opt{"su", 8.0, 8.5, 6, 1};
  const auto scan = bifurcation_scan(baseline_raw(), DilutionMode::Downstream,
                                     State{1.0, 1.0, 1.0}, opt, cfg);
  REQUIRE(scan.rows.size() == 6);
  CHECK(scan.param == "su");
  CHECK(scan.rows.front().value == 8.0);
  CHECK(scan.rows.back().value == 8.5);
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    CHECK(scan.rows[i].value > scan.rows[i - 1].value);
  }
  for (const auto& row : scan.rows) {
    CHECK(row.error.empty());
    CHECK(row.summary.has_value());
  }
}

TEST_CASE("serial and parallel scans produce identical tables") {
  AnalysisConfig cfg;
  cfg.integrator.t_end = 200.0;
  cfg.transient = 80.0;
  ScanOptions parallel{"su", 8.0, 8.5, 6, 0};
  ScanOptions serial = parallel;
  serial.jobs = 1;
  const auto a = bifurcation_scan(baseline_raw(), DilutionMode::Downstream,
                                  State{1.0, 1.0, 1.0}, parallel, cfg);
  const auto b = bifurcation_scan_serial(baseline_raw(), DilutionMode::Downstream,
                                         State{1.0, 1.0, 1.0}, serial, cfg);
  CHECK(scan_csv(a) == scan_csv(b));
  // jobs=1 must route through the reference path and match as well
  const auto c = bifurcation_scan(baseline_raw(), DilutionMode::Downstream,
                                  State{1.0, 1.0, 1.0}, serial, cfg);
  CHECK(scan_csv(a) == scan_csv(c));
}

TEST_CASE("grid points that cannot run are reported in place") {
  // crossing su = sd makes the middle point degenerate
  AnalysisConfig cfg;
  cfg.integrator.t_end = 50.0;
  cfg.transient = 20.0;
  ScanOptions opt{"su", 12.25, 12.35, 3, 1};
  const auto scan = bifurcation_scan(baseline_raw(), DilutionMode::Downstream,
                                     State{1.0, 1.0, 1.0}, opt, cfg);
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.rows[0].error.empty());
  CHECK(scan.rows[0].summary.has_value());
  CHECK_FALSE(scan.rows[1].error.empty());
  CHECK_FALSE(scan.rows[1].summary.has_value());
  CHECK_FALSE(scan.rows[2].error.empty());
}

TEST_CASE("scan parameter plumbing") {
  const auto raw = baseline_raw();
  CHECK(apply_scan_param(raw, "su", 9.0).su == 9.0);
  CHECK(apply_scan_param(raw, "kp", 20.0).kp == 20.0);
  CHECK(apply_scan_param(raw, "gs", 1.5).gs_override == 1.5);
  CHECK(apply_scan_param(raw, "m3", 0.2).m3_override == 0.2);
  CHECK_THROWS_WITH_AS(apply_scan_param(raw, "banana", 1.0),
                       doctest::Contains("unknown"), ConfigError);

  AnalysisConfig cfg;
  cfg.integrator.t_end = 50.0;
  cfg.transient = 20.0;
  ScanOptions bad{"su", 8.0, 8.5, 1, 0};
  CHECK_THROWS_AS(bifurcation_scan(raw, DilutionMode::Downstream, State{1, 1, 1}, bad, cfg),
                  ConfigError);
  bad = ScanOptions{"su", 8.5, 8.0, 4, 0};
  CHECK_THROWS_AS(bifurcation_scan(raw, DilutionMode::Downstream, State{1, 1, 1}, bad, cfg),
                  ConfigError);
  bad = ScanOptions{"banana", 8.0, 8.5, 4, 0};
  CHECK_THROWS_AS(bifurcation_scan(raw, DilutionMode::Downstream, State{1, 1, 1}, bad, cfg),
                  ConfigError);
}

TEST_CASE("margin crossing located along the fish saturation axis") {
  // independent bisection of the closed-form margin puts the crossing at
  // kf = 5.026301312200161 with a genuine sign change across [4, 6]
  const auto h = hopf_locate(baseline_raw(), DilutionMode::Downstream, "kf", 4.0, 6.0, 1e-8);
  CHECK(h.critical_value == doctest::Approx(5.026301312200161).epsilon(1e-6));
  CHECK(h.margin_lo < 0.0);
  CHECK(h.margin_hi > 0.0);
  CHECK(h.iterations > 10);
}

TEST_CASE("margin locator refuses sign-definite and equilibrium-free brackets") {
  CHECK_THROWS_WITH_AS(
      hopf_locate(baseline_raw(), DilutionMode::Downstream, "su", 5.0, 8.23, 1e-6),
      doctest::Contains("no sign change"), PreconditionError);

  // gf below the fish loss rate wipes out the coexistence state
  CHECK_THROWS_WITH_AS(
      hopf_locate(baseline_raw(), DilutionMode::Downstream, "gf", 0.25, 0.30, 1e-6),
      doctest::Contains("interior"), PreconditionError);
}

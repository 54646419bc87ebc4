#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pzf/integrator.hpp"
#include "pzf/model_core.hpp"

namespace pzf {

struct Peak {
  double time;
  double value;
};

// Strict interior local maxima, refined by fitting a parabola through the
// three samples around each one. Fewer than 3 samples yields no peaks.
std::vector<Peak> detect_peaks(std::span<const double> times,
                               std::span<const double> values);

struct Periodicity {
  int levels;          // distinct peak levels per cycle
  double period_days;  // mean duration of one full cycle
  std::vector<double> level_values;
};

// Clusters peak values (single linkage, gap and diameter both bounded by
// rel_tol relative to the largest peak) and checks that the level sequence
// repeats cyclically over at least two full cycles. Requires >= 8 peaks
// (PreconditionError); returns nullopt when no clean period exists.
std::optional<Periodicity> estimate_period(std::span<const Peak> peaks,
                                           double rel_tol = 1e-3);

struct AnalysisConfig {
  IntegratorConfig integrator;
  double transient = 500.0;       // discarded before averaging / peak analysis
  double renorm_interval = 1.0;   // tangent-frame renormalization cadence, days
  double extinction_tol = 1e-3;   // component below this counts as collapsed
  double chaos_tol = 1e-3;        // lambda1 above this counts as chaotic
  double peak_rel_tol = 1e-3;     // clustering tolerance for estimate_period
  double fixed_point_tol = 1e-6;  // trailing |rhs| gate

  void validate() const;
};

struct LyapunovEstimate {
  double lambda1;  // per day
  bool converged;  // last-quarter vs last-half estimates within 20%
};

// Benettin estimate of the largest Lyapunov exponent from the leading
// tangent-frame stretch rates, transient discarded.
// Requires t_end >= 2 * transient (PreconditionError).
LyapunovEstimate largest_lyapunov(const EffectiveParameters& p, const State& s0,
                                  const AnalysisConfig& cfg);

enum class AttractorKind { FixedPoint, Periodic, Chaotic, Collapse, Unresolved };

const char* to_string(AttractorKind k);

struct AttractorSummary {
  AttractorKind kind;
  State final_state;
  std::optional<State> fixed_point;
  std::optional<Periodicity> periodicity;
  std::optional<char> collapsed_component;  // 'P', 'Z' or 'F'
  double lambda1;
  bool lambda1_converged;
  // Post-transient zooplankton maxima: cluster levels when periodic,
  // otherwise the raw refined peak values (bifurcation-diagram fodder).
  std::vector<double> peak_values;
  std::string diagnostics;
};

// One tangent-coupled run from s0, then classification in fixed order:
// collapse, fixed point, periodic, chaotic, unresolved.
AttractorSummary classify_attractor(const EffectiveParameters& p, const State& s0,
                                    const AnalysisConfig& cfg);

// Parameter sweep. param names the raw field to vary; "gs", "m2" and "m3"
// vary the corresponding overrides.
struct ScanOptions {
  std::string param;
  double from, to;
  int steps;  // >= 2, endpoints included
  int jobs = 0;  // 0 = OpenMP default team, 1 = serial reference path
};

struct ScanRow {
  double value;
  std::optional<AttractorSummary> summary;
  std::string error;  // nonempty when this grid point failed
};

struct ScanResult {
  std::string param;
  std::vector<ScanRow> rows;
};

// Grid points are independent; rows are written by index so serial and
// parallel execution produce identical results.
ScanResult bifurcation_scan(const RawParameters& base, DilutionMode mode,
                            const State& s0, const ScanOptions& opt,
                            const AnalysisConfig& cfg);

// Serial reference implementation, kept for testing the parallel kernel.
ScanResult bifurcation_scan_serial(const RawParameters& base, DilutionMode mode,
                                   const State& s0, const ScanOptions& opt,
                                   const AnalysisConfig& cfg);

// Applies one scan value to a copy of base. Throws ConfigError on unknown names.
RawParameters apply_scan_param(const RawParameters& base, const std::string& param,
                               double value);

// Locates a Hopf-type crossing of the Routh-Hurwitz margin d1*d2 - d3 along
// a raw-parameter axis by bisection. Requires an interior equilibrium with
// d1 > 0, d3 > 0 across the bracket and a sign change of the margin.
struct HopfResult {
  double critical_value;
  double margin_lo, margin_hi;
  int iterations;
};

HopfResult hopf_locate(const RawParameters& base, DilutionMode mode,
                       const std::string& param, double lo, double hi,
                       double tol = 1e-6);

}  // namespace pzf

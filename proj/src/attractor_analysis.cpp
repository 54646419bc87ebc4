#include "pzf/attractor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pzf/equilibria.hpp"
#include "pzf/local_stability.hpp"

#ifdef PZF_HAVE_OPENMP
#include <omp.h>
#endif

namespace pzf {

const char* to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::FixedPoint: return "fixed_point";
    case AttractorKind::Periodic: return "periodic";
    case AttractorKind::Chaotic: return "chaotic";
    case AttractorKind::Collapse: return "collapse";
    case AttractorKind::Unresolved: return "unresolved";
  }
  return "?";
}

void AnalysisConfig::validate() const {
  integrator.validate();
  if (!(transient >= 0.0) || !std::isfinite(transient)) {
    throw ConfigError("transient must be >= 0");
  }
  if (!(renorm_interval > 0.0)) throw ConfigError("renorm_interval must be positive");
  if (!(extinction_tol > 0.0)) throw ConfigError("extinction_tol must be positive");
  if (!(chaos_tol > 0.0)) throw ConfigError("chaos_tol must be positive");
  if (!(peak_rel_tol > 0.0)) throw ConfigError("peak_rel_tol must be positive");
  if (!(fixed_point_tol > 0.0)) throw ConfigError("fixed_point_tol must be positive");
}

std::vector<Peak> detect_peaks(std::span<const double> times,
                               std::span<const double> values) {
  std::vector<Peak> peaks;
  if (times.size() != values.size() || times.size() < 3) return peaks;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (!(values[i] > values[i - 1] && values[i] > values[i + 1])) continue;
    // Quadratic through the three points (Newton form); vertex refines the peak.
    const double t0 = times[i - 1], t1 = times[i], t2 = times[i + 1];
    const double d01 = (values[i] - values[i - 1]) / (t1 - t0);
    const double d12 = (values[i + 1] - values[i]) / (t2 - t1);
    const double c2 = (d12 - d01) / (t2 - t0);
    double pt = t1, pv = values[i];
    if (c2 < 0.0) {
      const double vertex = (t0 + t1) / 2.0 - d01 / (2.0 * c2);
      if (vertex >= t0 && vertex <= t2) {
        pt = vertex;
        pv = values[i - 1] + d01 * (vertex - t0) + c2 * (vertex - t0) * (vertex - t1);
      }
    }
    peaks.push_back({pt, pv});
  }
  return peaks;
}

std::optional<Periodicity> estimate_period(std::span<const Peak> peaks, double rel_tol) {
  const std::size_t m = peaks.size();
  if (m < 8) {
    std::ostringstream os;
    os << "insufficient peaks for period estimation: " << m << " < 8";
    throw PreconditionError(os.str());
  }

  double scale = 0.0;
  for (const Peak& p : peaks) scale = std::max(scale, std::abs(p.value));
  const double gap_tol = rel_tol * scale;

  // Single-linkage clustering of peak values.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return peaks[a].value < peaks[b].value;
  });
  std::vector<int> cluster_of(m, -1);
  std::vector<double> cluster_min, cluster_max, cluster_sum;
  std::vector<std::size_t> cluster_count;
  for (std::size_t j = 0; j < m; ++j) {
    const double v = peaks[order[j]].value;
    if (j == 0 || v - peaks[order[j - 1]].value > gap_tol) {
      cluster_min.push_back(v);
      cluster_max.push_back(v);
      cluster_sum.push_back(0.0);
      cluster_count.push_back(0);
    }
    const int c = static_cast<int>(cluster_min.size()) - 1;
    cluster_of[order[j]] = c;
    cluster_max[c] = v;
    cluster_sum[c] += v;
    ++cluster_count[c];
  }
  // A chained cluster wider than the tolerance is a continuum, not a level.
  for (std::size_t c = 0; c < cluster_min.size(); ++c) {
    if (cluster_max[c] - cluster_min[c] > 2.0 * gap_tol) return std::nullopt;
  }

  const std::size_t n = cluster_min.size();
  if (2 * n > m) return std::nullopt;  // need at least two full cycles
  for (std::size_t i = 0; i + n < m; ++i) {
    if (cluster_of[i] != cluster_of[i + n]) return std::nullopt;
  }

  Periodicity out;
  out.levels = static_cast<int>(n);
  double span_sum = 0.0;
  for (std::size_t i = 0; i + n < m; ++i) span_sum += peaks[i + n].time - peaks[i].time;
  out.period_days = span_sum / static_cast<double>(m - n);
  out.level_values.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    out.level_values.push_back(cluster_sum[c] / static_cast<double>(cluster_count[c]));
  }
  return out;
}

namespace {

// Time-weighted leading-direction rate over stretch windows ending after
// t_from. Exact when t_from lands on a window boundary (the usual case).
double rate_after(const std::vector<StretchEvent>& events, double t_from) {
  double sum = 0.0;
  double t_last = t_from;
  for (const StretchEvent& e : events) {
    if (e.time > t_from) {
      sum += e.log_stretch[0];
      t_last = e.time;
    }
  }
  const double span = t_last - t_from;
  return span > 0.0 ? sum / span : 0.0;
}

LyapunovEstimate lyapunov_from(const std::vector<StretchEvent>& events,
                               double transient, double t_end) {
  if (events.empty()) {
    throw PreconditionError("no tangent stretch windows recorded");
  }
  LyapunovEstimate est;
  est.lambda1 = rate_after(events, transient);
  const double window = t_end - transient;
  const double half = rate_after(events, t_end - window / 2.0);
  const double quarter = rate_after(events, t_end - window / 4.0);
  est.converged = std::abs(quarter - half) <= 0.2 * std::max(std::abs(half), 1e-3);
  return est;
}

}  // namespace

LyapunovEstimate largest_lyapunov(const EffectiveParameters& p, const State& s0,
                                  const AnalysisConfig& cfg) {
  cfg.validate();
  if (!(cfg.integrator.t_end >= 2.0 * cfg.transient)) {
    throw PreconditionError("Lyapunov estimation requires t_end >= 2 * transient");
  }
  TangentRun run = integrate_with_tangent(p, s0, Matrix3::identity(),
                                          cfg.integrator, cfg.renorm_interval);
  return lyapunov_from(run.stretches, cfg.transient, cfg.integrator.t_end);
}

AttractorSummary classify_attractor(const EffectiveParameters& p, const State& s0,
                                    const AnalysisConfig& cfg) {
  cfg.validate();
  if (!(cfg.integrator.t_end >= 2.0 * cfg.transient)) {
    throw PreconditionError("classification requires t_end >= 2 * transient");
  }
  TangentRun run = integrate_with_tangent(p, s0, Matrix3::identity(),
                                          cfg.integrator, cfg.renorm_interval);
  const Trajectory& traj = run.trajectory;
  const LyapunovEstimate lyap =
      lyapunov_from(run.stretches, cfg.transient, cfg.integrator.t_end);

  AttractorSummary out;
  out.final_state = traj.states.back();
  out.lambda1 = lyap.lambda1;
  out.lambda1_converged = lyap.converged;

  // Post-transient zooplankton peaks (reported for every kind).
  std::vector<double> pt_times, pt_z;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] >= cfg.transient) {
      pt_times.push_back(traj.times[i]);
      pt_z.push_back(traj.states[i].z);
    }
  }
  const std::vector<Peak> peaks = detect_peaks(pt_times, pt_z);
  out.peak_values.reserve(peaks.size());
  for (const Peak& pk : peaks) out.peak_values.push_back(pk.value);

  const double trailing_rhs = max_abs(rhs(p, traj.states.back()));
  std::ostringstream diag;
  diag << "trailing |rhs|=" << trailing_rhs << ", peaks=" << peaks.size()
       << ", lambda1=" << lyap.lambda1 << (lyap.converged ? "" : " (unconverged)");
  out.diagnostics = diag.str();

  // (1) Collapse: a component that started above extinction_tol ends the last
  // 20% of the run entirely below it. Checked bottom-up (P, then Z, then F).
  const double tail_start = 0.8 * cfg.integrator.t_end;
  for (int comp = 0; comp < 3; ++comp) {
    if (!(s0[comp] > cfg.extinction_tol)) continue;
    double tail_max = -1.0;
    bool has_tail = false;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      if (traj.times[i] >= tail_start) {
        tail_max = std::max(tail_max, traj.states[i][comp]);
        has_tail = true;
      }
    }
    if (has_tail && tail_max < cfg.extinction_tol) {
      out.kind = AttractorKind::Collapse;
      out.collapsed_component = comp == 0 ? 'P' : (comp == 1 ? 'Z' : 'F');
      return out;
    }
  }

  // (2) Fixed point: the trailing state already satisfies the equations.
  if (trailing_rhs < cfg.fixed_point_tol) {
    out.kind = AttractorKind::FixedPoint;
    out.fixed_point = traj.states.back();
    return out;
  }

  // (3) Periodic: zooplankton peak levels repeat cyclically.
  if (peaks.size() >= 8) {
    if (auto period = estimate_period(peaks, cfg.peak_rel_tol)) {
      out.kind = AttractorKind::Periodic;
      out.periodicity = period;
      out.peak_values = period->level_values;
      return out;
    }
  }

  // (4) Chaotic: positive leading exponent.
  if (lyap.lambda1 > cfg.chaos_tol) {
    out.kind = AttractorKind::Chaotic;
    return out;
  }

  out.kind = AttractorKind::Unresolved;
  return out;
}

RawParameters apply_scan_param(const RawParameters& base, const std::string& param,
                               double value) {
  RawParameters raw = base;
  if (param == "m1") raw.m1 = value;
  else if (param == "gz") raw.gz = value;
  else if (param == "ezo") raw.ezo = value;
  else if (param == "rzo") raw.rzo = value;
  else if (param == "rfp") raw.rfp = value;
  else if (param == "mz") raw.mz = value;
  else if (param == "ef") raw.ef = value;
  else if (param == "mf") raw.mf = value;
  else if (param == "rf") raw.rf = value;
  else if (param == "hf") raw.hf = value;
  else if (param == "gf") raw.gf = value;
  else if (param == "kp") raw.kp = value;
  else if (param == "kz") raw.kz = value;
  else if (param == "kf") raw.kf = value;
  else if (param == "a") raw.a = value;
  else if (param == "su") raw.su = value;
  else if (param == "sd") raw.sd = value;
  else if (param == "gs") raw.gs_override = value;
  else if (param == "m2") raw.m2_override = value;
  else if (param == "m3") raw.m3_override = value;
  else throw ConfigError("unknown scan parameter '" + param + "'");
  return raw;
}

namespace {

double grid_value(const ScanOptions& opt, int i) {
  if (i == opt.steps - 1) return opt.to;
  return opt.from + (opt.to - opt.from) * static_cast<double>(i) /
                        static_cast<double>(opt.steps - 1);
}

ScanRow scan_point(const RawParameters& base, DilutionMode mode, const State& s0,
                   const std::string& param, double value, const AnalysisConfig& cfg) {
  ScanRow row;
  row.value = value;
  try {
    const RawParameters raw = apply_scan_param(base, param, value);
    const EffectiveParameters eff = derive_effective(raw, mode);
    row.summary = classify_attractor(eff, s0, cfg);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

void validate_scan(const ScanOptions& opt) {
  if (opt.steps < 2) throw ConfigError("scan requires steps >= 2");
  if (!(opt.from < opt.to)) throw ConfigError("scan requires from < to");
  if (opt.jobs < 0) throw ConfigError("scan jobs must be >= 0");
}

}  // namespace

ScanResult bifurcation_scan_serial(const RawParameters& base, DilutionMode mode,
                                   const State& s0, const ScanOptions& opt,
                                   const AnalysisConfig& cfg) {
  validate_scan(opt);
  apply_scan_param(base, opt.param, opt.from);  // reject unknown names up front
  ScanResult result;
  result.param = opt.param;
  result.rows.resize(opt.steps);
  for (int i = 0; i < opt.steps; ++i) {
    result.rows[i] = scan_point(base, mode, s0, opt.param, grid_value(opt, i), cfg);
  }
  return result;
}

ScanResult bifurcation_scan(const RawParameters& base, DilutionMode mode,
                            const State& s0, const ScanOptions& opt,
                            const AnalysisConfig& cfg) {
  validate_scan(opt);
  if (opt.jobs == 1) {
    return bifurcation_scan_serial(base, mode, s0, opt, cfg);
  }
#ifdef PZF_HAVE_OPENMP
  apply_scan_param(base, opt.param, opt.from);
  ScanResult result;
  result.param = opt.param;
  result.rows.resize(opt.steps);
  const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
  // Grid points are independent; each writes only its own row, so the result
  // is identical to the serial path regardless of scheduling.
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < opt.steps; ++i) {
    result.rows[i] = scan_point(base, mode, s0, opt.param, grid_value(opt, i), cfg);
  }
  return result;
#else
  return bifurcation_scan_serial(base, mode, s0, opt, cfg);
#endif
}

HopfResult hopf_locate(const RawParameters& base, DilutionMode mode,
                       const std::string& param, double lo, double hi, double tol) {
  apply_scan_param(base, param, lo);  // reject unknown names before bisection
  auto margin_at = [&](double value) {
    const RawParameters raw = apply_scan_param(base, param, value);
    const EffectiveParameters eff = derive_effective(raw, mode);
    const InteriorResult interior = interior_equilibrium(eff);
    if (!interior.equilibrium) {
      std::ostringstream os;
      os << "no interior equilibrium at " << param << "=" << value << " ("
         << to_string(*interior.absence) << ")";
      throw PreconditionError(os.str());
    }
    const Matrix3 j = jacobian(eff, interior.equilibrium->state);
    const CharCoeffs c = characteristic_coefficients(j);
    if (!(c.d1 > 0.0) || !(c.d3 > 0.0)) {
      std::ostringstream os;
      os << "Hopf margin undefined at " << param << "=" << value
         << ": D1=" << c.d1 << ", D3=" << c.d3 << " (need both positive)";
      throw PreconditionError(os.str());
    }
    return c.d1 * c.d2 - c.d3;
  };
  const BisectionResult b = bisect_sign_change(margin_at, lo, hi, tol);
  return {b.root, b.margin_lo, b.margin_hi, b.iterations};
}

}  // namespace pzf

#include "pzf/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pzf/fmt.hpp"
#include "pzf/hash.hpp"

namespace pzf {

namespace {

std::string_view trim(std::string_view s) {
  const auto notspace = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !notspace(s.front())) s.remove_prefix(1);
  while (!s.empty() && !notspace(s.back())) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view key, std::string_view text) {
  double out = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("invalid value for key '" + std::string(key) + "': '" +
                      std::string(text) + "'");
  }
  return out;
}

int parse_int(std::string_view key, std::string_view text) {
  int out = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("invalid value for key '" + std::string(key) + "': '" +
                      std::string(text) + "'");
  }
  return out;
}

DilutionMode parse_mode(std::string_view key, std::string_view text) {
  if (text == "paper") return DilutionMode::Paper;
  if (text == "magnitude") return DilutionMode::Magnitude;
  if (text == "downstream") return DilutionMode::Downstream;
  throw ConfigError("invalid value for key '" + std::string(key) + "': '" +
                    std::string(text) + "' (expected paper|magnitude|downstream)");
}

Method parse_method(std::string_view key, std::string_view text) {
  if (text == "rk4") return Method::Rk4Fixed;
  if (text == "rk45") return Method::Rk45Adaptive;
  throw ConfigError("invalid value for key '" + std::string(key) + "': '" +
                    std::string(text) + "' (expected rk4|rk45)");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("malformed line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("malformed line " + std::to_string(lineno) +
                        ": empty key or value");
    }

    RawParameters& r = c.raw;
    IntegratorConfig& ic = c.analysis.integrator;
    if (key == "m1") r.m1 = parse_number(key, value);
    else if (key == "gz") r.gz = parse_number(key, value);
    else if (key == "ezo") r.ezo = parse_number(key, value);
    else if (key == "rzo") r.rzo = parse_number(key, value);
    else if (key == "rfp") r.rfp = parse_number(key, value);
    else if (key == "mz") r.mz = parse_number(key, value);
    else if (key == "ef") r.ef = parse_number(key, value);
    else if (key == "mf") r.mf = parse_number(key, value);
    else if (key == "rf") r.rf = parse_number(key, value);
    else if (key == "hf") r.hf = parse_number(key, value);
    else if (key == "gf") r.gf = parse_number(key, value);
    else if (key == "kp") r.kp = parse_number(key, value);
    else if (key == "kz") r.kz = parse_number(key, value);
    else if (key == "kf") r.kf = parse_number(key, value);
    else if (key == "a") r.a = parse_number(key, value);
    else if (key == "su") r.su = parse_number(key, value);
    else if (key == "sd") r.sd = parse_number(key, value);
    else if (key == "gs_override") r.gs_override = parse_number(key, value);
    else if (key == "m2_override") r.m2_override = parse_number(key, value);
    else if (key == "m3_override") r.m3_override = parse_number(key, value);
    else if (key == "delta_mode") c.mode = parse_mode(key, value);
    else if (key == "dt") ic.dt = parse_number(key, value);
    else if (key == "t_end") ic.t_end = parse_number(key, value);
    else if (key == "transient") c.analysis.transient = parse_number(key, value);
    else if (key == "method") ic.method = parse_method(key, value);
    else if (key == "rel_tol") ic.rel_tol = parse_number(key, value);
    else if (key == "abs_tol") ic.abs_tol = parse_number(key, value);
    else if (key == "sample_every") ic.sample_every = parse_int(key, value);
    else throw ConfigError("unknown key '" + std::string(key) + "' at line " +
                           std::to_string(lineno));
  }

  c.raw.validate();
  c.analysis.validate();
  c.fingerprint = config_fingerprint(c);
  return c;
}

std::string normalize_config(const RunConfig& c) {
  std::ostringstream os;
  const RawParameters& r = c.raw;
  const IntegratorConfig& ic = c.analysis.integrator;
  const auto put = [&os](std::string_view key, double v) {
    os << key << " = " << format_shortest(v) << "\n";
  };
  put("m1", r.m1);
  put("gz", r.gz);
  put("ezo", r.ezo);
  put("rzo", r.rzo);
  put("rfp", r.rfp);
  put("mz", r.mz);
  put("ef", r.ef);
  put("mf", r.mf);
  put("rf", r.rf);
  put("hf", r.hf);
  put("gf", r.gf);
  put("kp", r.kp);
  put("kz", r.kz);
  put("kf", r.kf);
  put("a", r.a);
  put("su", r.su);
  put("sd", r.sd);
  if (r.gs_override) put("gs_override", *r.gs_override);
  if (r.m2_override) put("m2_override", *r.m2_override);
  if (r.m3_override) put("m3_override", *r.m3_override);
  os << "delta_mode = " << to_string(c.mode) << "\n";
  put("dt", ic.dt);
  put("t_end", ic.t_end);
  put("transient", c.analysis.transient);
  os << "method = " << to_string(ic.method) << "\n";
  put("rel_tol", ic.rel_tol);
  put("abs_tol", ic.abs_tol);
  os << "sample_every = " << ic.sample_every << "\n";
  return os.str();
}

std::string config_fingerprint(const RunConfig& c) {
  return hex16(fnv1a64(normalize_config(c)));
}

std::string format_double(double v) { return format_shortest(v); }

std::string timeseries_csv(const Trajectory& traj) {
  std::string out = "t,P,Z,F\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_shortest(traj.times[i]);
    out += ',';
    out += format_shortest(traj.states[i].p);
    out += ',';
    out += format_shortest(traj.states[i].z);
    out += ',';
    out += format_shortest(traj.states[i].f);
    out += '\n';
  }
  return out;
}

namespace {

// Minimal RFC-4180 escaping; only error messages ever need it.
std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string joined_peaks(const std::vector<double>& peaks) {
  std::string out;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (i) out += ';';
    out += format_shortest(peaks[i]);
  }
  return out;
}

}  // namespace

std::string scan_csv(const ScanResult& scan) {
  std::string out = "value,kind,collapsed,lambda1,lambda1_converged,levels,period_days,peaks,error\n";
  for (const ScanRow& row : scan.rows) {
    out += format_shortest(row.value);
    out += ',';
    if (row.summary) {
      const AttractorSummary& s = *row.summary;
      out += to_string(s.kind);
      out += ',';
      if (s.collapsed_component) out += *s.collapsed_component;
      out += ',';
      out += format_shortest(s.lambda1);
      out += ',';
      out += s.lambda1_converged ? "1" : "0";
      out += ',';
      if (s.periodicity) out += std::to_string(s.periodicity->levels);
      out += ',';
      if (s.periodicity) out += format_shortest(s.periodicity->period_days);
      out += ',';
      out += joined_peaks(s.peak_values);
      out += ',';
    } else {
      out += "error,,,,,,,";
    }
    out += csv_escape(row.error);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) {
    throw Error("write failed for '" + path.string() + "'");
  }
}

namespace {

nlohmann::json state_json(const State& s) {
  return {{"P", s.p}, {"Z", s.z}, {"F", s.f}};
}

nlohmann::json equilibrium_json(const Equilibrium& eq) {
  nlohmann::json j{
      {"kind", to_string(eq.kind)},
      {"state", state_json(eq.state)},
      {"feasible", eq.feasible},
      {"residual", eq.residual},
  };
  if (!eq.notes.empty()) j["notes"] = eq.notes;
  return j;
}

}  // namespace

nlohmann::json effective_json(const RunConfig& c) {
  const EffectiveParameters p = derive_effective(c.raw, c.mode);
  return {
      {"m1", p.m1}, {"gs", p.gs}, {"m2", p.m2},  {"gf", p.gf}, {"m3", p.m3},
      {"kp", p.kp}, {"kz", p.kz}, {"kf", p.kf},  {"a", p.a},
      {"provenance", {p.provenance[0], p.provenance[1], p.provenance[2]}},
  };
}

nlohmann::json equilibria_report(const RunConfig& c) {
  const EffectiveParameters p = derive_effective(c.raw, c.mode);
  nlohmann::json j;
  j["fingerprint"] = c.fingerprint;
  j["delta_mode"] = to_string(c.mode);
  j["effective"] = effective_json(c);
  j["equilibria"] = nlohmann::json::array();
  for (const Equilibrium& eq : all_equilibria(p)) {
    j["equilibria"].push_back(equilibrium_json(eq));
  }
  const InteriorResult interior = interior_equilibrium(p);
  if (interior.absence) {
    j["interior_absent_reason"] = to_string(*interior.absence);
  }
  // Published comparison values; annotations only, never pass/fail.
  nlohmann::json ref{{"P", 1.809}, {"Z", 8.964}, {"F", 3.112}};
  if (interior.equilibrium) {
    const State& s = interior.equilibrium->state;
    ref["P_rel_diff"] = std::abs(s.p - 1.809) / 1.809;
    ref["Z_rel_diff"] = std::abs(s.z - 8.964) / 8.964;
    ref["F_rel_diff"] = std::abs(s.f - 3.112) / 3.112;
    ref["F_discrepancy"] = std::abs(s.f - 3.112) / 3.112 > 0.05;
    ref["note"] =
        "reference values for comparison only; the reference F is not a root "
        "of the model equations (see the model-consistent interior state)";
  }
  j["paper_reference"] = ref;
  return j;
}

nlohmann::json stability_report(const RunConfig& c) {
  const EffectiveParameters p = derive_effective(c.raw, c.mode);
  nlohmann::json j;
  j["fingerprint"] = c.fingerprint;
  j["delta_mode"] = to_string(c.mode);
  j["effective"] = effective_json(c);
  j["reports"] = nlohmann::json::array();
  for (const Equilibrium& eq : all_equilibria(p)) {
    nlohmann::json entry = equilibrium_json(eq);
    if (eq.residual < 1e-8) {
      const StabilityReport r = classify_equilibrium(p, eq);
      entry["d1"] = r.coeffs.d1;
      entry["d2"] = r.coeffs.d2;
      entry["d3"] = r.coeffs.d3;
      entry["margin"] = r.margin;
      entry["routh_hurwitz"] = r.routh_hurwitz_ok;
      entry["classification"] = to_string(r.classification);
      entry["max_real_part"] = r.max_real_part;
      entry["eigenvalues"] = nlohmann::json::array();
      for (const auto& ev : r.eigenvalues) {
        entry["eigenvalues"].push_back({{"re", ev.real()}, {"im", ev.imag()}});
      }
    } else {
      entry["skipped"] = "residual too large for stability analysis";
    }
    j["reports"].push_back(entry);
  }
  const InteriorResult interior = interior_equilibrium(p);
  if (interior.absence) {
    j["interior_absent_reason"] = to_string(*interior.absence);
  }
  return j;
}

nlohmann::json lyapunov_report(const RunConfig& c, const State& s0) {
  const EffectiveParameters p = derive_effective(c.raw, c.mode);
  const LyapunovEstimate est = largest_lyapunov(p, s0, c.analysis);
  return {
      {"fingerprint", c.fingerprint},
      {"start", state_json(s0)},
      {"lambda1", est.lambda1},
      {"converged", est.converged},
      {"t_end", c.analysis.integrator.t_end},
      {"transient", c.analysis.transient},
      {"renorm_interval", c.analysis.renorm_interval},
  };
}

nlohmann::json global_check_report(const RunConfig& c, const State& s0,
                                   std::optional<double> rho_override) {
  const EffectiveParameters p = derive_effective(c.raw, c.mode);
  const AbsorbingBound paper = absorbing_bound(p, BoundMode::Paper);
  const AbsorbingBound corrected = absorbing_bound(p, BoundMode::Corrected);
  const double rho_used = rho_override.value_or(corrected.rho);
  const GlobalCertificate cert = mu_certificate(p, rho_used);
  const Trajectory traj = integrate(p, s0, c.analysis.integrator);
  return {
      {"fingerprint", c.fingerprint},
      {"start", state_json(s0)},
      {"v", corrected.v},
      {"rho_paper", paper.rho},
      {"rho_corrected", corrected.rho},
      {"rho_used", rho_used},
      {"mu", cert.mu},
      {"holds", cert.holds},
      {"notes", cert.notes},
      {"lozinskii_average", lozinskii_average(p, traj)},
      {"chart_window_fraction", chart_window_fraction(p, traj)},
      {"t_end", c.analysis.integrator.t_end},
  };
}

nlohmann::json attractor_json(const AttractorSummary& s) {
  nlohmann::json j{
      {"kind", to_string(s.kind)},
      {"final_state", state_json(s.final_state)},
      {"lambda1", s.lambda1},
      {"lambda1_converged", s.lambda1_converged},
      {"peak_values", s.peak_values},
      {"diagnostics", s.diagnostics},
  };
  if (s.fixed_point) j["fixed_point"] = state_json(*s.fixed_point);
  if (s.collapsed_component) j["collapsed_component"] = std::string(1, *s.collapsed_component);
  if (s.periodicity) {
    j["period_levels"] = s.periodicity->levels;
    j["period_days"] = s.periodicity->period_days;
    j["level_values"] = s.periodicity->level_values;
  }
  return j;
}

nlohmann::json scan_report(const RunConfig& c, const ScanResult& scan) {
  nlohmann::json j;
  j["fingerprint"] = c.fingerprint;
  j["param"] = scan.param;
  j["rows"] = nlohmann::json::array();
  for (const ScanRow& row : scan.rows) {
    nlohmann::json entry{{"value", row.value}};
    if (row.summary) {
      entry["summary"] = attractor_json(*row.summary);
    } else {
      entry["error"] = row.error;
    }
    j["rows"].push_back(entry);
  }
  return j;
}

nlohmann::json hopf_report(const RunConfig& c, const HopfResult& h,
                           const std::string& param, double lo, double hi) {
  return {
      {"fingerprint", c.fingerprint},
      {"param", param},
      {"lo", lo},
      {"hi", hi},
      {"critical_value", h.critical_value},
      {"margin_lo", h.margin_lo},
      {"margin_hi", h.margin_hi},
      {"iterations", h.iterations},
  };
}

}  // namespace pzf

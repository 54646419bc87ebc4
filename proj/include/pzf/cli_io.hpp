#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pzf/attractor_analysis.hpp"
#include "pzf/equilibria.hpp"
#include "pzf/global_stability.hpp"
#include "pzf/integrator.hpp"
#include "pzf/local_stability.hpp"
#include "pzf/model_core.hpp"

namespace pzf {

// Everything a run needs: raw parameters, dilution mode, integration and
// analysis settings, plus a fingerprint of the normalized config text.
struct RunConfig {
  RawParameters raw;
  DilutionMode mode = DilutionMode::Downstream;
  AnalysisConfig analysis;
  std::string fingerprint;  // 16 hex chars, FNV-1a 64 of normalize_config()

  // The published baseline pins m3 = 0.324 even though the fish loss
  // components sum to 0.1915, so the default config carries the override.
  // An explicit m3_override key still wins; the composed path stays
  // reachable through derive_effective on a bare RawParameters.
  RunConfig() { raw.m3_override = 0.324; }
};

// Parses flat "key = value" text ('#' comments, blank lines allowed).
// Unknown keys, malformed lines and unparseable values are ConfigErrors.
// Semantic validation (signs, ranges) happens here too.
RunConfig parse_config(std::string_view text);

// Canonical serialization: fixed key order, shortest round-trip numbers.
// parse_config(normalize_config(c)) reproduces c exactly.
std::string normalize_config(const RunConfig& c);

std::string config_fingerprint(const RunConfig& c);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

// Time series CSV: header "t,P,Z,F", LF line endings, one trailing LF.
std::string timeseries_csv(const Trajectory& traj);

// Scan CSV: one row per grid point, first column strictly increasing.
std::string scan_csv(const ScanResult& scan);

void write_text_file(const std::filesystem::path& path, std::string_view text);

// JSON report builders. All carry the config fingerprint and the effective
// parameters with their provenance notes.
nlohmann::json effective_json(const RunConfig& c);
nlohmann::json equilibria_report(const RunConfig& c);
nlohmann::json stability_report(const RunConfig& c);
nlohmann::json lyapunov_report(const RunConfig& c, const State& s0);
nlohmann::json global_check_report(const RunConfig& c, const State& s0,
                                   std::optional<double> rho_override);
nlohmann::json attractor_json(const AttractorSummary& s);
nlohmann::json scan_report(const RunConfig& c, const ScanResult& scan);
nlohmann::json hopf_report(const RunConfig& c, const HopfResult& h,
                           const std::string& param, double lo, double hi);

}  // namespace pzf

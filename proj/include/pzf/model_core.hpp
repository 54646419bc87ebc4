#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "pzf/errors.hpp"

namespace pzf {

// How the salinity pair (su, sd) is turned into the dilution factor that
// scales zooplankton grazing.
//   Paper:      delta = su / (su - sd)   (negative whenever sd > su)
//   Magnitude:  |su / (su - sd)|
//   Downstream: delta = sd / (sd - su)   (positive and > 1 for sd > su > 0)
enum class DilutionMode { Paper, Magnitude, Downstream };

const char* to_string(DilutionMode mode);

// Raw inputs: estuary salinities, loss-rate components, and the grazing /
// growth constants. Defaults are the baseline Hooghly-Matla calibration.
struct RawParameters {
  double m1 = 0.6;      // phytoplankton intrinsic growth, 1/day
  double gz = 0.75;     // zooplankton grazing before dilution scaling
  double ezo = 0.04;    // zooplankton exudation
  double rzo = 0.0153;  // zooplankton respiration
  double rfp = 0.2;     // zooplankton loss to fish predation (not summed; see derive_effective)
  double mz = 0.0145;   // zooplankton mortality
  double ef = 0.049;    // fish exudation
  double mf = 0.021;    // fish mortality
  double rf = 0.0125;   // fish respiration
  double hf = 0.1090;   // fish harvesting
  double gf = 0.6894;   // fish grazing on zooplankton
  double kp = 12.0;     // phytoplankton carrying capacity
  double kz = 38.0;     // half-saturation, zooplankton grazing
  double kf = 10.1;     // half-saturation, fish grazing
  double a = 0.8;       // assimilation fraction, grazing into zooplankton growth
  double su = 8.23;     // upstream salinity, ppt
  double sd = 12.30;    // downstream salinity, ppt

  std::optional<double> gs_override;  // bypasses delta * gz
  std::optional<double> m2_override;  // bypasses ezo + rzo + mz
  std::optional<double> m3_override;  // bypasses ef + mf + rf + hf

  // Throws ConfigError on non-finite or sign-invalid entries.
  void validate() const;
};

// The seven-constant reduced model actually integrated and analyzed.
struct EffectiveParameters {
  double m1, gs, m2, gf, m3, kp, kz, kf, a;
  // Human-readable derivation notes for gs / m2 / m3 (override vs composed).
  std::array<std::string, 3> provenance;

  void validate() const;
};

struct State {
  double p = 0.0;  // phytoplankton
  double z = 0.0;  // zooplankton
  double f = 0.0;  // fish

  double operator[](std::size_t i) const { return i == 0 ? p : (i == 1 ? z : f); }
  bool operator==(const State&) const = default;
};

// Row-major 3x3 matrix; just enough linear algebra for Jacobian work.
class Matrix3 {
public:
  Matrix3() : e_{} {}
  static Matrix3 identity();

  double& operator()(int r, int c) { return e_[r * 3 + c]; }
  double operator()(int r, int c) const { return e_[r * 3 + c]; }

  double trace() const;
  double det() const;
  // Sum of the three principal 2x2 minors.
  double minor_sum() const;

  std::array<double, 3> column(int c) const;
  void set_column(int c, const std::array<double, 3>& v);

  friend Matrix3 operator*(const Matrix3& a, const Matrix3& b);
  std::array<double, 3> operator*(const std::array<double, 3>& v) const;
  bool operator==(const Matrix3&) const = default;

private:
  double e_[9];
};

double dilution_factor(double su, double sd, DilutionMode mode);

// Applies the dilution mode and loss-rate composition, honoring overrides.
// Throws ConfigError (via validate / dilution checks) on invalid inputs.
EffectiveParameters derive_effective(const RawParameters& raw, DilutionMode mode);

// Right-hand side of the food-chain ODE at state s. Requires s >= 0 componentwise.
State rhs(const EffectiveParameters& p, const State& s);

// Analytic Jacobian of rhs at s.
Matrix3 jacobian(const EffectiveParameters& p, const State& s);

double max_abs(const State& s);

}  // namespace pzf

#include "pzf/model_core.hpp"

#include <cmath>
#include <sstream>

namespace pzf {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw ConfigError(std::string("parameter ") + name + " is not finite");
  }
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (v <= 0.0) {
    std::ostringstream os;
    os << "parameter " << name << " must be positive, got " << v;
    throw ConfigError(os.str());
  }
}

void require_nonnegative(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0) {
    std::ostringstream os;
    os << "parameter " << name << " must be nonnegative, got " << v;
    throw ConfigError(os.str());
  }
}

}  // namespace

const char* to_string(DilutionMode mode) {
  switch (mode) {
    case DilutionMode::Paper: return "paper";
    case DilutionMode::Magnitude: return "magnitude";
    case DilutionMode::Downstream: return "downstream";
  }
  return "?";
}

void RawParameters::validate() const {
  require_positive(m1, "m1");
  require_positive(gz, "gz");
  require_nonnegative(ezo, "ezo");
  require_nonnegative(rzo, "rzo");
  require_nonnegative(rfp, "rfp");
  require_nonnegative(mz, "mz");
  require_nonnegative(ef, "ef");
  require_nonnegative(mf, "mf");
  require_nonnegative(rf, "rf");
  require_nonnegative(hf, "hf");
  require_positive(gf, "gf");
  require_positive(kp, "kp");
  require_positive(kz, "kz");
  require_positive(kf, "kf");
  require_positive(a, "a");
  if (a > 1.0) {
    throw ConfigError("parameter a must lie in (0, 1]");
  }
  require_positive(su, "su");
  require_positive(sd, "sd");
  if (gs_override) require_finite(*gs_override, "gs_override");
  if (m2_override) require_finite(*m2_override, "m2_override");
  if (m3_override) require_finite(*m3_override, "m3_override");
}

void EffectiveParameters::validate() const {
  require_positive(m1, "m1");
  require_positive(gf, "gf");
  require_positive(kp, "kp");
  require_positive(kz, "kz");
  require_positive(kf, "kf");
  require_positive(a, "a");
  if (a > 1.0) {
    throw ConfigError("parameter a must lie in (0, 1]");
  }
  for (auto [v, name] : {std::pair{gs, "gs"}, {m2, "m2"}, {m3, "m3"}}) {
    require_finite(v, name);
    if (v <= 0.0) {
      std::ostringstream os;
      os << "effective rate " << name << " is non-positive (" << v << ")";
      throw ConfigError(os.str());
    }
  }
}

double dilution_factor(double su, double sd, DilutionMode mode) {
  require_positive(su, "su");
  require_positive(sd, "sd");
  if (su == sd) {
    throw ConfigError("salinities are equal (su == sd); dilution factor undefined");
  }
  double delta = 0.0;
  switch (mode) {
    case DilutionMode::Paper:
      delta = su / (su - sd);
      break;
    case DilutionMode::Magnitude:
      delta = std::abs(su / (su - sd));
      break;
    case DilutionMode::Downstream:
      delta = sd / (sd - su);
      break;
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    std::ostringstream os;
    os << "dilution factor " << delta << " (mode " << to_string(mode)
       << ", su=" << su << ", sd=" << sd << ") is not positive";
    throw ConfigError(os.str());
  }
  return delta;
}

EffectiveParameters derive_effective(const RawParameters& raw, DilutionMode mode) {
  raw.validate();
  EffectiveParameters p{};
  p.m1 = raw.m1;
  p.gf = raw.gf;
  p.kp = raw.kp;
  p.kz = raw.kz;
  p.kf = raw.kf;
  p.a = raw.a;

  std::ostringstream note;
  if (raw.gs_override) {
    p.gs = *raw.gs_override;
    note << "gs: override " << p.gs;
  } else {
    double delta = dilution_factor(raw.su, raw.sd, mode);
    p.gs = delta * raw.gz;
    note << "gs: delta(" << to_string(mode) << ") " << delta << " * gz " << raw.gz;
  }
  p.provenance[0] = note.str();

  note.str("");
  if (raw.m2_override) {
    p.m2 = *raw.m2_override;
    note << "m2: override " << p.m2;
  } else {
    p.m2 = raw.ezo + raw.rzo + raw.mz;
    note << "m2: ezo + rzo + mz (predation loss rfp excluded)";
  }
  p.provenance[1] = note.str();

  note.str("");
  if (raw.m3_override) {
    p.m3 = *raw.m3_override;
    note << "m3: override " << p.m3;
  } else {
    p.m3 = raw.ef + raw.mf + raw.rf + raw.hf;
    note << "m3: ef + mf + rf + hf";
  }
  p.provenance[2] = note.str();

  p.validate();
  return p;
}

State rhs(const EffectiveParameters& p, const State& s) {
  const double graze_z = p.gs * s.p / (s.p + p.kz);   // per-zooplankton intake
  const double graze_f = p.gf * s.z / (s.z + p.kf);   // per-fish intake
  return State{
      p.m1 * s.p * (1.0 - s.p / p.kp) - graze_z * s.z,
      p.a * graze_z * s.z - graze_f * s.f - p.m2 * s.z,
      graze_f * s.f - p.m3 * s.f,
  };
}

Matrix3 jacobian(const EffectiveParameters& p, const State& s) {
  const double dp = s.p + p.kz;
  const double df = s.z + p.kf;
  const double sat_z = p.gs * s.p / dp;            // d(dZ)/dZ feeding part
  const double sat_z_p = p.gs * p.kz * s.z / (dp * dp);
  const double sat_f = p.gf * s.z / df;
  const double sat_f_z = p.gf * p.kf * s.f / (df * df);

  Matrix3 j;
  j(0, 0) = p.m1 * (1.0 - 2.0 * s.p / p.kp) - sat_z_p;
  j(0, 1) = -sat_z;
  j(0, 2) = 0.0;
  j(1, 0) = p.a * sat_z_p;
  j(1, 1) = p.a * sat_z - sat_f_z - p.m2;
  j(1, 2) = -sat_f;
  j(2, 0) = 0.0;
  j(2, 1) = sat_f_z;
  j(2, 2) = sat_f - p.m3;
  return j;
}

double max_abs(const State& s) {
  return std::max({std::abs(s.p), std::abs(s.z), std::abs(s.f)});
}

Matrix3 Matrix3::identity() {
  Matrix3 m;
  m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
  return m;
}

double Matrix3::trace() const { return e_[0] + e_[4] + e_[8]; }

double Matrix3::det() const {
  return e_[0] * (e_[4] * e_[8] - e_[5] * e_[7]) -
         e_[1] * (e_[3] * e_[8] - e_[5] * e_[6]) +
         e_[2] * (e_[3] * e_[7] - e_[4] * e_[6]);
}

double Matrix3::minor_sum() const {
  const double m00 = e_[4] * e_[8] - e_[5] * e_[7];
  const double m11 = e_[0] * e_[8] - e_[2] * e_[6];
  const double m22 = e_[0] * e_[4] - e_[1] * e_[3];
  return m00 + m11 + m22;
}

std::array<double, 3> Matrix3::column(int c) const {
  return {e_[c], e_[3 + c], e_[6 + c]};
}

void Matrix3::set_column(int c, const std::array<double, 3>& v) {
  e_[c] = v[0];
  e_[3 + c] = v[1];
  e_[6 + c] = v[2];
}

Matrix3 operator*(const Matrix3& a, const Matrix3& b) {
  Matrix3 r;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += a(i, j) * b(j, k);
      r(i, k) = s;
    }
  }
  return r;
}

std::array<double, 3> Matrix3::operator*(const std::array<double, 3>& v) const {
  return {e_[0] * v[0] + e_[1] * v[1] + e_[2] * v[2],
          e_[3] * v[0] + e_[4] * v[1] + e_[5] * v[2],
          e_[6] * v[0] + e_[7] * v[1] + e_[8] * v[2]};
}

}  // namespace pzf

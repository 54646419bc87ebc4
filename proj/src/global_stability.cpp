#include "pzf/global_stability.hpp"

#include <cmath>
#include <sstream>

namespace pzf {

AbsorbingBound absorbing_bound(const EffectiveParameters& p, BoundMode mode) {
  const double v = std::min(p.m2, p.m3);
  const double s = p.m1 + v;
  const double rho = mode == BoundMode::Paper
                         ? p.a * s * s * p.kp / 4.0
                         : p.a * s * s * p.kp / (4.0 * p.m1 * v);
  return {v, rho, mode};
}

GlobalCertificate mu_certificate(const EffectiveParameters& p, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw PreconditionError("mu certificate requires rho > 0");
  }
  GlobalCertificate cert;
  cert.mu = 2.0 * p.gs / (rho + p.kf) - (p.gs / p.kz + p.gf / p.kf) * rho -
            (p.m1 + p.m3);
  cert.rho_used = rho;
  cert.holds = cert.mu > 0.0;
  cert.notes = cert.holds
                   ? "mu > 0: contraction certificate for the coexistence state"
                   : "mu <= 0: certificate inconclusive (not an instability proof)";
  return cert;
}

TransformedState transform_state(const State& s) {
  if (s.p == 0.0) {
    throw PreconditionError("transform undefined at P = 0");
  }
  return {1.0 / s.p, s.z, s.f};
}

State untransform_state(const TransformedState& t) {
  return {1.0 / t.x, t.y, t.z};
}

TransformedState transformed_rhs(const EffectiveParameters& p, const TransformedState& t) {
  if (!(t.x > 0.0)) {
    throw PreconditionError("transformed state requires x > 0");
  }
  const State s = untransform_state(t);
  const State d = rhs(p, s);
  // Pushforward of x = 1/P: dx/dt = -x^2 * dP/dt.
  return {-t.x * t.x * d.p, d.z, d.f};
}

LozinskiiTerms lozinskii_measure(const EffectiveParameters& p, const State& s) {
  if (!(s.p > 0.0) || !(s.z > 0.0) || !(s.f > 0.0)) {
    std::ostringstream os;
    os << "Lozinskii measure requires a strictly positive state, got (" << s.p
       << ", " << s.z << ", " << s.f << ")";
    throw PreconditionError(os.str());
  }
  const double x = 1.0 / s.p;
  const double y = s.z;
  const double z = s.f;
  const double xkz = 1.0 + x * p.kz;
  const double ykf = y + p.kf;

  const State d = rhs(p, s);
  const double ydot_over_y = d.z / y;
  const double zdot_over_z = d.f / z;

  LozinskiiTerms t;
  t.l1 = x * p.gs * y * (2.0 + x * p.kz) / (xkz * xkz) - p.m1 +
         p.gf * y * z / (ykf * ykf) + p.gf * y / ykf;
  t.l2 = ydot_over_y - zdot_over_z - 2.0 * p.m1 * (1.0 - 1.0 / (x * p.kp)) +
         p.gs * y * x / xkz + p.gf * y * p.kf / (ykf * ykf);
  t.gamma = std::max(t.l1, t.l2);
  return t;
}

double lozinskii_average(const EffectiveParameters& p, const Trajectory& traj) {
  if (traj.times.size() < 2) {
    throw PreconditionError(
        "Lozinskii average needs at least 2 samples (insufficient samples)");
  }
  double acc = 0.0;
  double prev_gamma = lozinskii_measure(p, traj.states[0]).gamma;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double gamma = lozinskii_measure(p, traj.states[i]).gamma;
    acc += 0.5 * (gamma + prev_gamma) * (traj.times[i] - traj.times[i - 1]);
    prev_gamma = gamma;
  }
  return acc / (traj.times.back() - traj.times.front());
}

double chart_window_fraction(const EffectiveParameters& p, const Trajectory& traj) {
  if (traj.times.empty()) {
    throw PreconditionError("chart window fraction needs a nonempty trajectory");
  }
  std::size_t inside = 0;
  for (const State& s : traj.states) {
    if (s.p > 0.0) {
      const double xkp = p.kp / s.p;
      if (xkp > 1.0 && xkp < 2.0) ++inside;
    }
  }
  return static_cast<double>(inside) / static_cast<double>(traj.states.size());
}

}  // namespace pzf

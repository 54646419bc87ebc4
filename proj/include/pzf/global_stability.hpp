#pragma once

#include <string>

#include "pzf/integrator.hpp"
#include "pzf/model_core.hpp"

namespace pzf {

// Absorbing bound for X = a*P + Z + F:  limsup X <= rho.
//   Paper:     rho = a*(m1+v)^2 * kp / 4          (as printed; too small in practice)
//   Corrected: rho = a*(m1+v)^2 * kp / (4*m1*v)   (completed-square derivation)
// with v = min(m2, m3).
enum class BoundMode { Paper, Corrected };

struct AbsorbingBound {
  double v;
  double rho;
  BoundMode mode;
};

AbsorbingBound absorbing_bound(const EffectiveParameters& p, BoundMode mode);

// Li-Muldowney style certificate: global stability of the coexistence state
// is implied by
//   mu = 2*gs/(rho+kf) - (gs/kz + gf/kf)*rho - (m1 + m3) > 0.
struct GlobalCertificate {
  double mu;
  double rho_used;
  bool holds;  // mu > 0
  std::string notes;
};

GlobalCertificate mu_certificate(const EffectiveParameters& p, double rho);

// Coordinate change (x, y, z) = (1/P, Z, F) used by the contraction analysis.
struct TransformedState {
  double x, y, z;
};

// Throws PreconditionError when s.p == 0.
TransformedState transform_state(const State& s);
State untransform_state(const TransformedState& t);

// Pushforward of rhs under the coordinate change: dx/dt = -x^2 * dP/dt,
// dy, dz unchanged. Requires t.x > 0.
TransformedState transformed_rhs(const EffectiveParameters& p, const TransformedState& t);

// Per-state Lozinskii bound Gamma = max(l1, l2) of the second-additive-
// compound Jacobian in the transformed coordinates. Requires a strictly
// positive state (PreconditionError otherwise).
struct LozinskiiTerms {
  double l1, l2, gamma;
};

LozinskiiTerms lozinskii_measure(const EffectiveParameters& p, const State& s);

// Trapezoid time-average of Gamma along a sampled trajectory; negative values
// are Bendixson-style evidence against periodic orbits in the sampled region.
// Requires >= 2 samples and strictly positive states throughout.
double lozinskii_average(const EffectiveParameters& p, const Trajectory& traj);

// Fraction of samples satisfying the contraction chart condition 1 < kp/P < 2.
// Reported as a flag, never enforced: baseline orbits mostly live outside it.
double chart_window_fraction(const EffectiveParameters& p, const Trajectory& traj);

}  // namespace pzf

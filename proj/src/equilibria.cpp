#include "pzf/equilibria.hpp"

#include <cmath>
#include <limits>

namespace pzf {

namespace {

double residual_at(const EffectiveParameters& p, const State& s) {
  if (!std::isfinite(s.p) || !std::isfinite(s.z) || !std::isfinite(s.f)) {
    return std::numeric_limits<double>::infinity();
  }
  return max_abs(rhs(p, s));
}

}  // namespace

const char* to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Null: return "null";
    case EquilibriumKind::Axial: return "axial";
    case EquilibriumKind::Boundary: return "boundary";
    case EquilibriumKind::Interior: return "interior";
  }
  return "?";
}

const char* to_string(InteriorAbsence reason) {
  switch (reason) {
    case InteriorAbsence::FishGrowthTooLow: return "FishGrowthTooLow";
    case InteriorAbsence::NoPositiveRoot: return "NoPositiveRoot";
    case InteriorAbsence::NegativeFishDensity: return "NegativeFishDensity";
  }
  return "?";
}

Equilibrium null_equilibrium(const EffectiveParameters& p) {
  State s{0.0, 0.0, 0.0};
  return {EquilibriumKind::Null, s, true, residual_at(p, s), {}};
}

Equilibrium axial_equilibrium(const EffectiveParameters& p) {
  State s{p.kp, 0.0, 0.0};
  return {EquilibriumKind::Axial, s, true, residual_at(p, s), {}};
}

Equilibrium boundary_equilibrium(const EffectiveParameters& p) {
  const double denom = p.a * p.gs - p.m2;
  // Z2 numerator sign doubles as the feasibility test for Z2 > 0.
  const double z_num = p.a * p.kp * p.gs - p.kp * p.m2 - p.m2 * p.kz;
  Equilibrium eq;
  eq.kind = EquilibriumKind::Boundary;
  eq.feasible = denom > 0.0 && z_num > 0.0;
  eq.state = State{
      p.m2 * p.kz / denom,
      p.a * p.m1 * p.kz * z_num / (denom * denom * p.kp),
      0.0,
  };
  eq.residual = residual_at(p, eq.state);
  if (denom == 0.0) {
    eq.notes.push_back("degenerate: a*gs == m2, closed form divides by zero");
  } else if (!eq.feasible) {
    eq.notes.push_back(denom < 0.0 ? "infeasible: a*gs <= m2"
                                   : "infeasible: implied Z2 <= 0");
  }
  return eq;
}

InteriorResult interior_equilibrium(const EffectiveParameters& p) {
  if (p.gf <= p.m3) {
    return {std::nullopt, InteriorAbsence::FishGrowthTooLow};
  }
  const double z_star = p.m3 * p.kf / (p.gf - p.m3);

  // P* is the positive root of P^2 + b*P + c = 0.
  const double b = -(p.kp - p.kz);
  const double c = -(p.kp * p.kz - p.gs * z_star * p.kp / p.m1);
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) {
    return {std::nullopt, InteriorAbsence::NoPositiveRoot};
  }
  double p_star = (-b + std::sqrt(disc)) / 2.0;
  if (!(p_star > 0.0)) {
    return {std::nullopt, InteriorAbsence::NoPositiveRoot};
  }
  // One Newton step tightens the root against the quadratic's rounding.
  const double dq = 2.0 * p_star + b;
  if (dq != 0.0) {
    p_star -= (p_star * p_star + b * p_star + c) / dq;
  }

  const double f_star =
      (z_star + p.kf) * (p.a * p.gs * p_star / (p_star + p.kz) - p.m2) / p.gf;
  if (!(f_star > 0.0)) {
    return {std::nullopt, InteriorAbsence::NegativeFishDensity};
  }

  Equilibrium eq;
  eq.kind = EquilibriumKind::Interior;
  eq.state = State{p_star, z_star, f_star};
  eq.feasible = true;
  eq.residual = residual_at(p, eq.state);
  return {eq, std::nullopt};
}

std::vector<Equilibrium> all_equilibria(const EffectiveParameters& p) {
  std::vector<Equilibrium> out;
  out.push_back(null_equilibrium(p));
  out.push_back(axial_equilibrium(p));
  out.push_back(boundary_equilibrium(p));
  if (auto interior = interior_equilibrium(p); interior.equilibrium) {
    out.push_back(*interior.equilibrium);
  }
  return out;
}

}  // namespace pzf

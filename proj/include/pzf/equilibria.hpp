#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pzf/model_core.hpp"

namespace pzf {

enum class EquilibriumKind { Null, Axial, Boundary, Interior };

const char* to_string(EquilibriumKind kind);

// Why the interior (coexistence) equilibrium does not exist.
enum class InteriorAbsence {
  FishGrowthTooLow,     // gf <= m3: fish cannot ever balance its losses
  NoPositiveRoot,       // phytoplankton quadratic has no positive real root
  NegativeFishDensity,  // P*, Z* > 0 but the implied F* <= 0
};

const char* to_string(InteriorAbsence reason);

struct Equilibrium {
  EquilibriumKind kind;
  State state;
  bool feasible;    // existence / positivity conditions for this kind all hold
  double residual;  // max-norm of rhs at state, a self-check on the algebra
  std::vector<std::string> notes;
};

struct InteriorResult {
  std::optional<Equilibrium> equilibrium;
  std::optional<InteriorAbsence> absence;
};

Equilibrium null_equilibrium(const EffectiveParameters& p);
Equilibrium axial_equilibrium(const EffectiveParameters& p);

// Fish-free coexistence (P2, Z2, 0). Infeasible (with the analytic point still
// reported) when a*gs <= m2 or the resulting P2 >= kp leaves Z2 <= 0.
Equilibrium boundary_equilibrium(const EffectiveParameters& p);

// Coexistence equilibrium: Z* from the fish balance, P* as the positive root
// of the phytoplankton quadratic, F* back-solved from the zooplankton balance.
InteriorResult interior_equilibrium(const EffectiveParameters& p);

// Null, axial, boundary, and interior when present, in that order.
std::vector<Equilibrium> all_equilibria(const EffectiveParameters& p);

}  // namespace pzf

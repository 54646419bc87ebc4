#pragma once

#include <array>
#include <complex>
#include <functional>

#include "pzf/equilibria.hpp"
#include "pzf/model_core.hpp"

namespace pzf {

// Coefficients of det(lambda*I - J) = lambda^3 + d1*lambda^2 + d2*lambda + d3.
struct CharCoeffs {
  double d1, d2, d3;
};

CharCoeffs characteristic_coefficients(const Matrix3& j);

// Routh-Hurwitz for a cubic: all roots in the open left half-plane
// iff d1 > 0, d3 > 0 and d1*d2 > d3.
bool routh_hurwitz(const CharCoeffs& c);

// Eigenvalues of a real 3x3 matrix via the depressed characteristic cubic
// (trigonometric branch for three real roots, Cardano otherwise), Newton
// polished. Ordered by descending real part, then descending imaginary part.
// Residual contract: |p(lambda)| < 1e-8 * max(1, |lambda|^3) for each root.
std::array<std::complex<double>, 3> eigenvalues_3x3(const Matrix3& j);

enum class StabilityClass { Stable, Marginal, Unstable };

const char* to_string(StabilityClass c);

struct StabilityReport {
  CharCoeffs coeffs;
  std::array<std::complex<double>, 3> eigenvalues;
  double max_real_part;
  bool routh_hurwitz_ok;
  // Hopf margin d1*d2 - d3; sign changes exactly where a conjugate pair
  // crosses the imaginary axis (given d1 > 0, d3 > 0).
  double margin;
  StabilityClass classification;
};

// Requires eq.residual < 1e-8; throws PreconditionError otherwise.
// Marginal when max |Re lambda| < 1e-9.
StabilityReport classify_equilibrium(const EffectiveParameters& p, const Equilibrium& eq);

// Bisection on a continuous margin function. Requires margin(lo)*margin(hi) < 0
// (PreconditionError "no sign change" otherwise); shrinks the bracket below tol.
struct BisectionResult {
  double root;
  double margin_lo, margin_hi;  // margins at the original bracket ends
  int iterations;
};

BisectionResult bisect_sign_change(const std::function<double(double)>& margin,
                                   double lo, double hi, double tol);

}  // namespace pzf

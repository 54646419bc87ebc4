#include "pzf/local_stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pzf {

namespace {

using cplx = std::complex<double>;

cplx poly_eval(const CharCoeffs& c, cplx x) {
  return ((x + c.d1) * x + c.d2) * x + c.d3;
}

cplx poly_deriv(const CharCoeffs& c, cplx x) {
  return (3.0 * x + 2.0 * c.d1) * x + c.d2;
}

// A few Newton iterations; keeps the best iterate by residual so a wobble
// near a multiple root cannot make things worse.
cplx polish(const CharCoeffs& c, cplx x) {
  cplx best = x;
  double best_res = std::abs(poly_eval(c, x));
  for (int it = 0; it < 8; ++it) {
    cplx d = poly_deriv(c, x);
    if (std::abs(d) == 0.0) break;
    x -= poly_eval(c, x) / d;
    double res = std::abs(poly_eval(c, x));
    if (res < best_res) {
      best = x;
      best_res = res;
    }
  }
  return best;
}

}  // namespace

CharCoeffs characteristic_coefficients(const Matrix3& j) {
  return {-j.trace(), j.minor_sum(), -j.det()};
}

bool routh_hurwitz(const CharCoeffs& c) {
  return c.d1 > 0.0 && c.d3 > 0.0 && c.d1 * c.d2 > c.d3;
}

std::array<cplx, 3> eigenvalues_3x3(const Matrix3& j) {
  const CharCoeffs c = characteristic_coefficients(j);
  // Depressed cubic u^3 + p*u + q via lambda = u - d1/3.
  const double shift = c.d1 / 3.0;
  const double p = c.d2 - c.d1 * c.d1 / 3.0;
  const double q = 2.0 * c.d1 * c.d1 * c.d1 / 27.0 - c.d1 * c.d2 / 3.0 + c.d3;
  const double disc = q * q / 4.0 + p * p * p / 27.0;

  std::array<cplx, 3> roots;
  if (disc > 0.0) {
    // One real root, one conjugate pair (Cardano).
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + sq);
    const double v = std::cbrt(-q / 2.0 - sq);
    const double real_u = u + v;
    const double half = -real_u / 2.0;
    const double imag = std::sqrt(3.0) / 2.0 * (u - v);
    roots = {cplx(real_u - shift, 0.0), cplx(half - shift, imag),
             cplx(half - shift, -imag)};
  } else {
    // Three real roots (trigonometric branch); p <= 0 is implied here.
    if (p == 0.0) {
      roots = {cplx(-shift, 0.0), cplx(-shift, 0.0), cplx(-shift, 0.0)};
    } else {
      const double m = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
      const double theta = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) {
        const double u = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
        roots[k] = cplx(u - shift, 0.0);
      }
    }
  }

  for (auto& r : roots) r = polish(c, r);
  // Polishing drifts conjugate pairs apart by rounding; re-pair them exactly.
  for (int i = 0; i < 3; ++i) {
    if (roots[i].imag() != 0.0) {
      for (int k = i + 1; k < 3; ++k) {
        if (roots[k].imag() != 0.0) {
          roots[k] = std::conj(roots[i]);
          break;
        }
      }
      break;
    }
  }

  std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return roots;
}

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::Marginal: return "marginal";
    case StabilityClass::Unstable: return "unstable";
  }
  return "?";
}

StabilityReport classify_equilibrium(const EffectiveParameters& p, const Equilibrium& eq) {
  if (!(eq.residual < 1e-8)) {
    std::ostringstream os;
    os << "not an equilibrium: rhs residual " << eq.residual << " at ("
       << eq.state.p << ", " << eq.state.z << ", " << eq.state.f << ")";
    throw PreconditionError(os.str());
  }
  StabilityReport r;
  const Matrix3 j = jacobian(p, eq.state);
  r.coeffs = characteristic_coefficients(j);
  r.eigenvalues = eigenvalues_3x3(j);
  r.max_real_part = r.eigenvalues[0].real();
  r.routh_hurwitz_ok = routh_hurwitz(r.coeffs);
  r.margin = r.coeffs.d1 * r.coeffs.d2 - r.coeffs.d3;

  if (r.routh_hurwitz_ok) {
    r.classification = StabilityClass::Stable;
  } else {
    bool any_on_axis = false;
    bool rest_negative = true;
    for (const auto& ev : r.eigenvalues) {
      if (std::abs(ev.real()) < 1e-9) {
        any_on_axis = true;
      } else if (ev.real() > 0.0) {
        rest_negative = false;
      }
    }
    r.classification = (any_on_axis && rest_negative) ? StabilityClass::Marginal
                                                      : StabilityClass::Unstable;
  }
  return r;
}

BisectionResult bisect_sign_change(const std::function<double(double)>& margin,
                                   double lo, double hi, double tol) {
  if (!(lo < hi)) {
    throw PreconditionError("bisection bracket requires lo < hi");
  }
  if (!(tol > 0.0)) {
    throw ConfigError("bisection tolerance must be positive");
  }
  double m_lo = margin(lo);
  double m_hi = margin(hi);
  BisectionResult out{0.0, m_lo, m_hi, 0};
  if (m_lo == 0.0) {
    out.root = lo;
    return out;
  }
  if (m_hi == 0.0) {
    out.root = hi;
    return out;
  }
  if ((m_lo > 0.0) == (m_hi > 0.0)) {
    std::ostringstream os;
    os << "no sign change over [" << lo << ", " << hi << "]: margin(lo)=" << m_lo
       << ", margin(hi)=" << m_hi;
    throw PreconditionError(os.str());
  }
  double a = lo, b = hi, m_a = m_lo;
  while (b - a > tol) {
    const double mid = a + (b - a) / 2.0;
    if (mid <= a || mid >= b) break;  // bracket exhausted at double precision
    const double m_mid = margin(mid);
    ++out.iterations;
    if (m_mid == 0.0) {
      out.root = mid;
      return out;
    }
    if ((m_mid > 0.0) == (m_a > 0.0)) {
      a = mid;
      m_a = m_mid;
    } else {
      b = mid;
    }
  }
  out.root = a + (b - a) / 2.0;
  return out;
}

}  // namespace pzf

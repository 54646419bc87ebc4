#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pzf/model_core.hpp"

namespace pzf {

enum class Method { Rk4Fixed, Rk45Adaptive };

const char* to_string(Method m);

struct IntegratorConfig {
  Method method = Method::Rk4Fixed;
  double dt = 0.01;        // fixed step / initial adaptive step, days
  double t_end = 1000.0;   // integration horizon, days
  double rel_tol = 1e-8;   // adaptive only
  double abs_tol = 1e-10;  // adaptive only
  int sample_every = 10;   // keep every Nth accepted step (plus t=0 and t_end)
  // Clamp target for negative excursions no deeper than -1e-12; deeper ones
  // are a StepFailure.
  double positivity_floor = 0.0;

  void validate() const;  // throws ConfigError
};

struct TrajectoryMeta {
  EffectiveParameters params;
  IntegratorConfig config;
  std::string fingerprint;  // FNV-1a 64 over a canonical (params, config) text
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  TrajectoryMeta meta;
};

// Any autonomous 3-dimensional system. The Jacobian is only needed for
// tangent propagation. Positivity clamping is opt-in: population models set
// it, generic systems (e.g. the 1/P-transformed one) do not.
struct System3 {
  std::function<State(const State&)> f;
  std::function<Matrix3(const State&)> jac;
  bool enforce_positivity = false;
};

System3 model_system(const EffectiveParameters& p);

Trajectory integrate_system(const System3& sys, const State& s0,
                            const IntegratorConfig& cfg);

// Integrates rhs from s0 over [0, t_end]. Components are clamped to zero on
// tiny negative excursions (> -1e-12); anything lower is a StepFailure.
// Non-finite states raise NumericalError at the offending time.
Trajectory integrate(const EffectiveParameters& p, const State& s0,
                     const IntegratorConfig& cfg);

// Log stretch factors of the tangent frame, accumulated per renormalization
// window; diagonal entries of R in the QR sense (modified Gram-Schmidt).
struct StretchEvent {
  double time;
  std::array<double, 3> log_stretch;
};

struct TangentRun {
  Trajectory trajectory;
  std::vector<StretchEvent> stretches;
};

// Couples the tangent frame dQ/dt = J(s(t)) * Q to the base integration and
// re-orthonormalizes every renorm_interval days. q0 must be orthonormal to
// 1e-10 (the identity is the usual choice); PreconditionError otherwise.
// Stretch events land on every renorm boundary, plus t_end when it falls
// inside a window.
TangentRun integrate_system_with_tangent(const System3& sys, const State& s0,
                                         const Matrix3& q0, const IntegratorConfig& cfg,
                                         double renorm_interval);

TangentRun integrate_with_tangent(const EffectiveParameters& p, const State& s0,
                                  const Matrix3& q0, const IntegratorConfig& cfg,
                                  double renorm_interval);

}  // namespace pzf

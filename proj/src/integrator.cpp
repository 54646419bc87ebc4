#include "pzf/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "pzf/fmt.hpp"
#include "pzf/hash.hpp"

namespace pzf {

namespace {

constexpr double kClampTol = 1e-12;  // deepest excursion clamped silently
constexpr double kDtMin = 1e-10;     // adaptive underflow threshold
constexpr int kState = 3;
constexpr int kAug = 12;  // state + row-major tangent frame

using Vec = std::array<double, kAug>;

const char* component_name(int i) { return i == 0 ? "P" : (i == 1 ? "Z" : "F"); }

std::string meta_text(const EffectiveParameters& p, const IntegratorConfig& c) {
  std::ostringstream os;
  os << "m1=" << format_shortest(p.m1) << ";gs=" << format_shortest(p.gs)
     << ";m2=" << format_shortest(p.m2) << ";gf=" << format_shortest(p.gf)
     << ";m3=" << format_shortest(p.m3) << ";kp=" << format_shortest(p.kp)
     << ";kz=" << format_shortest(p.kz) << ";kf=" << format_shortest(p.kf)
     << ";a=" << format_shortest(p.a) << ";method=" << to_string(c.method)
     << ";dt=" << format_shortest(c.dt) << ";t_end=" << format_shortest(c.t_end)
     << ";rel_tol=" << format_shortest(c.rel_tol)
     << ";abs_tol=" << format_shortest(c.abs_tol)
     << ";sample_every=" << c.sample_every
     << ";positivity_floor=" << format_shortest(c.positivity_floor);
  return os.str();
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// y5 - y4 error weights (B - Bhat), with the 7th stage at y5 itself.
constexpr double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695,
                 E4 = B4 - 393.0 / 640, E5 = B5 + 92097.0 / 339200,
                 E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

class Engine {
public:
  Engine(const System3& sys, bool tangent)
      : sys_(sys), n_(tangent ? kAug : kState), tangent_(tangent) {}

  Vec deriv(const Vec& y) const {
    const State s{y[0], y[1], y[2]};
    const State d = sys_.f(s);
    Vec out{};
    out[0] = d.p;
    out[1] = d.z;
    out[2] = d.f;
    if (tangent_) {
      const Matrix3 j = sys_.jac(s);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (int k = 0; k < 3; ++k) acc += j(r, k) * y[3 + k * 3 + c];
          out[3 + r * 3 + c] = acc;
        }
      }
    }
    return out;
  }

  Vec rk4_step(const Vec& y, double h) const {
    const Vec k1 = deriv(y);
    const Vec k2 = deriv(axpy(y, h / 2, k1));
    const Vec k3 = deriv(axpy(y, h / 2, k2));
    const Vec k4 = deriv(axpy(y, h, k3));
    Vec out = y;
    for (int i = 0; i < n_; ++i) {
      out[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return out;
  }

  // One trial Dormand-Prince step; fills the 5th-order result and the
  // scaled RMS error norm.
  double dp_step(const Vec& y, double h, double rel, double abs, Vec& y5) const {
    const Vec k1 = deriv(y);
    const Vec k2 = deriv(axpy(y, h * A21, k1));
    const Vec k3 = deriv(lc(y, h, {A31, A32}, {&k1, &k2}));
    const Vec k4 = deriv(lc(y, h, {A41, A42, A43}, {&k1, &k2, &k3}));
    const Vec k5 = deriv(lc(y, h, {A51, A52, A53, A54}, {&k1, &k2, &k3, &k4}));
    const Vec k6 =
        deriv(lc(y, h, {A61, A62, A63, A64, A65}, {&k1, &k2, &k3, &k4, &k5}));
    y5 = lc(y, h, {B1, 0.0, B3, B4, B5, B6}, {&k1, &k2, &k3, &k4, &k5, &k6});
    const Vec k7 = deriv(y5);

    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] +
                            E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
      const double scale = abs + rel * std::max(std::abs(y[i]), std::abs(y5[i]));
      acc += (e / scale) * (e / scale);
    }
    return std::sqrt(acc / n_);
  }

  int n() const { return n_; }

private:
  static Vec axpy(const Vec& y, double h, const Vec& k) {
    Vec out = y;
    for (int i = 0; i < kAug; ++i) out[i] += h * k[i];
    return out;
  }

  Vec lc(const Vec& y, double h, std::initializer_list<double> coef,
         std::initializer_list<const Vec*> ks) const {
    Vec out = y;
    auto c = coef.begin();
    for (const Vec* k : ks) {
      if (*c != 0.0) {
        for (int i = 0; i < n_; ++i) out[i] += h * *c * (*k)[i];
      }
      ++c;
    }
    return out;
  }

  const System3& sys_;
  int n_;
  bool tangent_;
};

void check_finite(const Vec& y, int n, double t) {
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) {
      std::ostringstream os;
      os << "non-finite state at t=" << t;
      throw NumericalError(os.str());
    }
  }
}

void clamp_positive(Vec& y, double floor_value, double t) {
  for (int i = 0; i < kState; ++i) {
    if (y[i] < 0.0) {
      if (y[i] < -kClampTol) {
        std::ostringstream os;
        os << "positivity violation: " << component_name(i) << "=" << y[i]
           << " at t=" << t << " (below clamp tolerance " << -kClampTol << ")";
        throw NumericalError(os.str());
      }
      y[i] = floor_value;
    }
  }
}

// Modified Gram-Schmidt on the tangent columns; returns per-column log norms.
std::array<double, 3> renormalize(Vec& y, double t) {
  std::array<double, 3> logs{};
  std::array<std::array<double, 3>, 3> q;  // orthonormalized columns
  for (int c = 0; c < 3; ++c) {
    std::array<double, 3> v{y[3 + c], y[6 + c], y[9 + c]};
    for (int k = 0; k < c; ++k) {
      const double proj = q[k][0] * v[0] + q[k][1] * v[1] + q[k][2] * v[2];
      for (int i = 0; i < 3; ++i) v[i] -= proj * q[k][i];
    }
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      std::ostringstream os;
      os << "tangent frame collapsed at t=" << t;
      throw NumericalError(os.str());
    }
    logs[c] = std::log(norm);
    for (int i = 0; i < 3; ++i) q[c][i] = v[i] / norm;
  }
  for (int c = 0; c < 3; ++c) {
    y[3 + c] = q[c][0];
    y[6 + c] = q[c][1];
    y[9 + c] = q[c][2];
  }
  return logs;
}

State state_of(const Vec& y) { return State{y[0], y[1], y[2]}; }

TangentRun run_integration(const System3& sys, const State& s0, const Matrix3* q0,
                           const IntegratorConfig& cfg, double renorm_interval) {
  cfg.validate();
  const bool tangent = q0 != nullptr;
  if (tangent && !(renorm_interval > 0.0)) {
    throw ConfigError("renorm_interval must be positive");
  }
  Engine eng(sys, tangent);

  Vec y{};
  y[0] = s0.p;
  y[1] = s0.z;
  y[2] = s0.f;
  if (tangent) {
    // Orthonormality check: max |Q^T Q - I| <= 1e-10.
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += (*q0)(k, a) * (*q0)(k, b);
        worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
      }
    }
    if (worst > 1e-10) {
      throw PreconditionError("tangent frame q0 is not orthonormal");
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) y[3 + r * 3 + c] = (*q0)(r, c);
    }
  }
  check_finite(y, eng.n(), 0.0);

  TangentRun run;
  run.trajectory.times.push_back(0.0);
  run.trajectory.states.push_back(state_of(y));

  const double t_end = cfg.t_end;
  const double snap = 1e-12 * std::max(1.0, t_end);
  double t = 0.0;
  double h_adaptive = cfg.dt;
  double next_renorm = tangent ? renorm_interval : std::numeric_limits<double>::infinity();
  long long step_idx = 0;

  auto accept = [&](Vec& y_new, double t_new) {
    check_finite(y_new, eng.n(), t_new);
    if (sys.enforce_positivity) clamp_positive(y_new, cfg.positivity_floor, t_new);
    y = y_new;
    t = t_new;
    ++step_idx;
    if (step_idx % cfg.sample_every == 0 && t > run.trajectory.times.back()) {
      run.trajectory.times.push_back(t);
      run.trajectory.states.push_back(state_of(y));
    }
  };

  while (t < t_end - snap) {
    const double target = std::min(t_end, next_renorm);
    const double span = target - t;

    if (cfg.method == Method::Rk4Fixed) {
      // Uniform substeps chosen to land exactly on target with h ~ dt.
      const long long nsub = std::max(1ll, static_cast<long long>(std::llround(span / cfg.dt)));
      const double h = span / static_cast<double>(nsub);
      const double seg_start = t;
      for (long long k = 1; k <= nsub; ++k) {
        Vec y_new = eng.rk4_step(y, h);
        const double t_new = (k == nsub) ? target : seg_start + static_cast<double>(k) * h;
        accept(y_new, t_new);
      }
    } else {
      while (t < target - snap) {
        double h_try = std::min(h_adaptive, target - t);
        Vec y5;
        const double errnorm = eng.dp_step(y, h_try, cfg.rel_tol, cfg.abs_tol, y5);
        const bool bad = !std::isfinite(errnorm);
        if (!bad && errnorm <= 1.0) {
          double t_new = t + h_try;
          if (target - t_new < snap) t_new = target;
          accept(y5, t_new);
          const double grow =
              errnorm == 0.0 ? 5.0
                             : std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
          h_adaptive = h_try * grow;
        } else {
          const double shrink =
              bad ? 0.2 : std::max(0.2, 0.9 * std::pow(errnorm, -0.2));
          h_adaptive = h_try * shrink;
          if (h_adaptive < kDtMin) {
            std::ostringstream os;
            os << "adaptive step underflow (h=" << h_adaptive << ") at t=" << t;
            throw NumericalError(os.str());
          }
        }
      }
      t = target;
    }

    if (tangent && t >= next_renorm - snap) {
      run.stretches.push_back({t, renormalize(y, t)});
      next_renorm += renorm_interval;
    }
  }

  if (run.trajectory.times.back() < t_end) {
    run.trajectory.times.push_back(t_end);
    run.trajectory.states.push_back(state_of(y));
  }
  // Trailing partial renormalization window.
  if (tangent &&
      (run.stretches.empty() || run.stretches.back().time < t_end - snap)) {
    run.stretches.push_back({t_end, renormalize(y, t_end)});
  }
  return run;
}

}  // namespace

const char* to_string(Method m) {
  return m == Method::Rk4Fixed ? "rk4" : "rk45";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
  if (sample_every < 1) throw ConfigError("sample_every must be >= 1");
  if (!(positivity_floor >= 0.0)) throw ConfigError("positivity_floor must be >= 0");
  if (method == Method::Rk45Adaptive) {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw ConfigError("rel_tol and abs_tol must be positive for rk45");
    }
  }
}

System3 model_system(const EffectiveParameters& p) {
  System3 sys;
  sys.f = [p](const State& s) { return rhs(p, s); };
  sys.jac = [p](const State& s) { return jacobian(p, s); };
  sys.enforce_positivity = true;
  return sys;
}

Trajectory integrate_system(const System3& sys, const State& s0,
                            const IntegratorConfig& cfg) {
  return run_integration(sys, s0, nullptr, cfg, 0.0).trajectory;
}

TangentRun integrate_system_with_tangent(const System3& sys, const State& s0,
                                         const Matrix3& q0, const IntegratorConfig& cfg,
                                         double renorm_interval) {
  return run_integration(sys, s0, &q0, cfg, renorm_interval);
}

namespace {

void require_nonnegative_start(const State& s0) {
  if (s0.p < 0.0 || s0.z < 0.0 || s0.f < 0.0) {
    std::ostringstream os;
    os << "initial state must be componentwise >= 0, got (" << s0.p << ", "
       << s0.z << ", " << s0.f << ")";
    throw PreconditionError(os.str());
  }
}

TrajectoryMeta make_meta(const EffectiveParameters& p, const IntegratorConfig& cfg) {
  return {p, cfg, hex16(fnv1a64(meta_text(p, cfg)))};
}

}  // namespace

Trajectory integrate(const EffectiveParameters& p, const State& s0,
                     const IntegratorConfig& cfg) {
  p.validate();
  require_nonnegative_start(s0);
  Trajectory traj = integrate_system(model_system(p), s0, cfg);
  traj.meta = make_meta(p, cfg);
  return traj;
}

TangentRun integrate_with_tangent(const EffectiveParameters& p, const State& s0,
                                  const Matrix3& q0, const IntegratorConfig& cfg,
                                  double renorm_interval) {
  p.validate();
  require_nonnegative_start(s0);
  TangentRun run = integrate_system_with_tangent(model_system(p), s0, q0, cfg,
                                                 renorm_interval);
  run.trajectory.meta = make_meta(p, cfg);
  return run;
}

}  // namespace pzf

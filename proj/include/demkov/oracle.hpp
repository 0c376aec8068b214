#pragma once

// Reference solution of the Bloch equations by direct numerical integration.
// Dormand-Prince 5(4) with local extrapolation and step control on a mixed
// absolute/relative RMS error norm. Step boundaries are forced onto every
// requested sample time and onto the cusp of Omega(t) at t = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "demkov/error.hpp"
#include "demkov/model.hpp"

namespace demkov::oracle {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double t_start_factor = 40.0;  // integration starts at -t_start_factor * T
  double t_end_factor = 40.0;    // and ends at +t_end_factor * T
  long max_steps = 2'000'000;
  bool force_cusp_point = true;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw Error(ErrorKind::domain, "integrator tolerances must be positive");
    if (!(t_start_factor >= 10.0) || !(t_end_factor >= 10.0))
      throw Error(ErrorKind::domain, "integration window factors must be >= 10");
    if (max_steps < 1000) throw Error(ErrorKind::domain, "max_steps must be >= 1000");
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<BlochVector> states;
  long step_count = 0;
  double max_est_local_error = 0.0;
};

using State = std::array<double, 3>;

inline State bloch_rhs(const ModelParams& p, double t, const State& y) {
  const double rabi = p.rabi(t);
  return {-p.gamma_deph * y[0] - p.delta * y[1],
          p.delta * y[0] - p.gamma_deph * y[1] - rabi * y[2], rabi * y[1]};
}

/// w' and one-sided w'' implied by the Bloch equations at a given state.
/// side = -1 selects t -> 0-, +1 selects t -> 0+ (only matters at t = 0).
struct InversionDerivatives {
  double w1dot;
  double w2dot;
};

inline InversionDerivatives inversion_derivatives(const ModelParams& p, double t,
                                                  const BlochVector& s, int side) {
  const double rabi = p.rabi(t);
  const bool left = t < 0.0 || (t == 0.0 && side < 0);
  const double rabi_dot = (left ? 1.0 : -1.0) * rabi / p.t_width;
  const double vdot = p.delta * s.u - p.gamma_deph * s.v - rabi * s.w;
  return {rabi * s.v, rabi_dot * s.v + rabi * vdot};
}

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

inline State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State r = y;
  for (const auto& [c, k] : terms)
    for (int i = 0; i < 3; ++i) r[i] += h * c * (*k)[i];
  return r;
}

}  // namespace detail

/// Integrates from (0, 0, -1) at t = -t_start_factor T and records the state
/// at each of `sample_times` (strictly increasing, inside the window). The
/// observer is called with (t, state) after every accepted step.
template <class Observer>
Trajectory integrate_bloch(const ModelParams& params, const IntegratorConfig& cfg,
                           const std::vector<double>& sample_times, Observer&& observe) {
  params.validate();
  cfg.validate();
  const double T = params.t_width;
  const double t0 = -cfg.t_start_factor * T;
  const double t1 = cfg.t_end_factor * T;
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || sample_times[i] > t1)
      throw Error(ErrorKind::domain, "sample time outside the integration window");
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw Error(ErrorKind::domain, "sample times must be strictly increasing");
  }

  // Mandatory step boundaries.
  std::vector<double> stops = sample_times;
  if (cfg.force_cusp_point) stops.push_back(0.0);
  stops.push_back(t1);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Trajectory traj;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());
  std::size_t next_sample = 0;
  auto record = [&](double t, const State& y) {
    while (next_sample < sample_times.size() && sample_times[next_sample] == t) {
      traj.times.push_back(t);
      traj.states.push_back({y[0], y[1], y[2]});
      ++next_sample;
    }
  };

  using namespace detail;
  State y{0.0, 0.0, -1.0};
  double t = t0;
  record(t, y);
  double h_free = 1e-2 * T;
  State k1 = bloch_rhs(params, t, y);

  for (double stop : stops) {
    if (stop <= t) continue;
    while (t < stop) {
      if (++traj.step_count > cfg.max_steps)
        throw Error(ErrorKind::step_limit,
                    "exceeded " + std::to_string(cfg.max_steps) + " steps at t = " + std::to_string(t));
      bool last = false;
      double h = h_free;
      if (t + 1.01 * h >= stop) {
        h = stop - t;
        last = true;
      }
      const State k2 = bloch_rhs(params, t + c2 * h, axpy(y, h, {{a21, &k1}}));
      const State k3 = bloch_rhs(params, t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const State k4 =
          bloch_rhs(params, t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State k5 = bloch_rhs(params, t + c5 * h,
                                 axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const double t_new = last ? stop : t + h;
      const State k6 = bloch_rhs(
          params, t_new, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State y_new =
          axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const State k7 = bloch_rhs(params, t_new, y_new);

      double err2 = 0.0, err_abs = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double e =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err2 += (e / sc) * (e / sc);
        err_abs = std::max(err_abs, std::abs(e));
      }
      const double err = std::sqrt(err2 / 3.0);

      if (err <= 1.0) {
        t = t_new;
        y = y_new;
        k1 = k7;
        traj.max_est_local_error = std::max(traj.max_est_local_error, err_abs);
        observe(t, BlochVector{y[0], y[1], y[2]});
        record(t, y);
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      const double h_next = h * (err <= 1.0 ? factor : std::min(factor, 1.0));
      if (err > 1.0 && h_next < 1e-14 * std::max(1.0, std::abs(t)))
        throw Error(ErrorKind::tolerance, "step size underflow at t = " + std::to_string(t));
      // A step clipped onto a boundary says nothing about the free step size.
      if (!(err <= 1.0 && last)) h_free = h_next;
    }
  }
  return traj;
}

inline Trajectory integrate_bloch(const ModelParams& params, const IntegratorConfig& cfg,
                                  const std::vector<double>& sample_times) {
  return integrate_bloch(params, cfg, sample_times, [](double, const BlochVector&) {});
}

struct OracleInversion {
  double w = -1.0;
  /// |w(+inf) - w(t_end)| <= integral of Omega |v| beyond t_end <= Omega(t_end) T.
  double truncation_bound = 0.0;
};

inline OracleInversion oracle_final_inversion(const ModelParams& params,
                                              const IntegratorConfig& cfg = {}) {
  const double t_end = cfg.t_end_factor * params.t_width;
  const Trajectory tr = integrate_bloch(params, cfg, {t_end});
  return {tr.states.back().w, params.rabi(t_end) * params.t_width};
}

inline double oracle_w_infinity(const ModelParams& params, const IntegratorConfig& cfg = {}) {
  return oracle_final_inversion(params, cfg).w;
}

}  // namespace demkov::oracle

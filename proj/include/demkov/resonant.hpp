#pragma once

// Exact solution at zero detuning. The u component decouples and decays
// from u(-inf) = 0, so it stays zero; (v, w) obey a second-order equation
// whose solutions are Bessel functions of argument 2 omega exp(-|t| / T).

#include <cmath>
#include <numbers>

#include "demkov/error.hpp"
#include "demkov/linalg.hpp"
#include "demkov/model.hpp"
#include "demkov/specialfn.hpp"

namespace demkov::resonant {

struct ResonantState {
  double u_r = 0.0;
  double v_r = 0.0;
  double w_r = -1.0;
};

struct ResonantConstants {
  double a_plus_r = -1.0;
  cplx b_plus_r = 0.0;
  cplx wronskian2 = 0.0;
  double est_error = 0.0;
};

namespace detail {

// Below this scaled amplitude y = omega exp(-|t|/T) the leading terms of the
// power series are exact to far below double precision.
inline constexpr double tiny_y = 1e-30;

inline double scaled_amplitude(const ReducedParams& rp, double t) {
  return rp.omega * std::exp(-std::abs(t) / rp.t_width);
}

}  // namespace detail

/// t <= 0 branch and its derivatives at t:
///   w = -G(b) y^(1-b) J_(b-1)(2y),  b = 1/2 + gamma,  y = omega e^(t/T).
inline WJet resonant_branch1_jet(const ReducedParams& rp, double t) {
  if (t > 0.0) throw Error(ErrorKind::domain, "resonant branch 1 requires t <= 0");
  const double T = rp.t_width;
  const double b = 0.5 + rp.gamma;
  const double y = detail::scaled_amplitude(rp, t);
  if (y < detail::tiny_y) {
    const double y2b = y * y / b;
    return {-1.0 + y2b, 2.0 / T * y2b, 4.0 / (T * T) * y2b, 0.0, 0.0};
  }
  const double gb = std::tgamma(b);
  const double jb = specialfn::bessel_j(b, 2.0 * y);
  const double y2b = std::pow(y, 2.0 - b);
  const double w = -gb * std::pow(y, 1.0 - b) * specialfn::bessel_j(b - 1.0, 2.0 * y);
  const double d1 = 2.0 * gb / T * y2b * jb;
  const double d2 = 4.0 * gb / (T * T) * (y2b * jb - y2b * y * specialfn::bessel_j(b + 1.0, 2.0 * y));
  return {w, d1, d2, 0.0, 1e-14};
}

inline double w_resonant_branch1(const ReducedParams& rp, double t) {
  return resonant_branch1_jet(rp, t).w;
}

/// w1(0), its derivative, and the one-sided second derivatives across the cusp.
inline CuspState resonant_cusp(const ReducedParams& rp) {
  const WJet j = resonant_branch1_jet(rp, 0.0);
  CuspState c;
  c.w0 = j.w;
  c.w1dot = j.d1;
  c.w2dot_left = j.d2;
  c.w2dot_right = j.d2 - 2.0 / rp.t_width * j.d1;
  c.est_rel_error = 1e-14;
  return c;
}

/// Two-solution basis on t >= 0 with nu = 1/2 + gamma:
///   g1 = G(1 - nu) y^nu J_(-nu)(2y)   (= 0F1(; 1/2 - gamma; -y^2), -> 1)
///   g2 = G(1 + nu) y^nu J_nu(2y)      (= |x|^nu 0F1(; 3/2 + gamma; x), -> 0)
/// When nu is an integer g1 collapses onto g2; the Neumann solution
///   g1 = -(pi / G(nu)) y^nu Y_nu(2y)  (also -> 1)
/// takes its place.
class ResonantSolution {
 public:
  explicit ResonantSolution(const ModelParams& params)
      : params_(params), rp_(reduce(params)) {
    if (std::abs(rp_.delta) > specialfn::eps_degen)
      throw Error(ErrorKind::domain, "resonant solution requires |delta| <= eps_degen");
    nu_ = 0.5 + rp_.gamma;
    neumann_ = specialfn::near_integer(cplx(nu_), specialfn::eps_degen);
    if (rp_.omega == 0.0) return;

    cusp_ = resonant_cusp(rp_);
    const auto [g1, g2] = basis(0.0);
    linalg::Matrix<double, 2> m{{{g1.w, g2.w}, {g1.d1, g2.d1}}};
    const std::array<double, 2> rhs{cusp_.w0, cusp_.w1dot};
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (std::abs(det) < 1e-12 * linalg::hadamard_bound(m))
      throw Error(ErrorKind::singular_system, "resonant Wronskian vanishes");
    // Cramer's rule on the 2x2 matching system.
    const double a = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    const double b = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
    const auto err = linalg::skeel_bound(m, rhs, std::array<double, 2>{a, b}, 1e-14);
    constants_ = {a, b, det, err[0]};
  }

  const ReducedParams& reduced() const { return rp_; }
  const CuspState& cusp() const { return cusp_; }
  const ResonantConstants& constants() const { return constants_; }
  bool uses_neumann_basis() const { return neumann_; }

  /// The two basis solutions at t >= 0 (value, first and second derivative).
  std::pair<WJet, WJet> basis(double t) const {
    const double T = rp_.t_width;
    const double y = detail::scaled_amplitude(rp_, t);
    const double rabi = 2.0 * y / T;
    const double damp = params_.gamma_deph + 1.0 / T;
    auto finish = [&](double g, double dg_dy) {
      const double d1 = -y / T * dg_dy;
      return WJet{g, d1, -damp * d1 - rabi * rabi * g, 0.0, 1e-14};
    };
    if (y < detail::tiny_y) {
      const double p = std::pow(y, 2.0 * nu_);
      const WJet g1{1.0, 0.0, 0.0, 0.0, 0.0};
      const double d1 = -2.0 * nu_ / T * p;
      return {g1, WJet{p, d1, 4.0 * nu_ * nu_ / (T * T) * p, 0.0, 0.0}};
    }
    const double x = 2.0 * y;
    const double ynu = std::pow(y, nu_);
    WJet g1;
    if (neumann_) {
      const double c = -std::numbers::pi / std::tgamma(nu_);
      g1 = finish(c * ynu * specialfn::bessel_y(nu_, x),
                  c * 2.0 * ynu * specialfn::bessel_y(nu_ - 1.0, x));
    } else {
      const double c = std::tgamma(1.0 - nu_);
      g1 = finish(c * ynu * specialfn::bessel_j(-nu_, x),
                  -c * 2.0 * ynu * specialfn::bessel_j(1.0 - nu_, x));
    }
    const double c2 = std::tgamma(1.0 + nu_);
    const WJet g2 = finish(c2 * ynu * specialfn::bessel_j(nu_, x),
                           c2 * 2.0 * ynu * specialfn::bessel_j(nu_ - 1.0, x));
    return {g1, g2};
  }

  /// w and derivatives; at t = 0 the left (t <= 0) branch is used.
  WJet jet(double t) const {
    if (rp_.omega == 0.0) return {};
    if (t <= 0.0) return resonant_branch1_jet(rp_, t);
    const auto [g1, g2] = basis(t);
    const double a = constants_.a_plus_r, b = constants_.b_plus_r.real();
    return {a * g1.w + b * g2.w, a * g1.d1 + b * g2.d1, a * g1.d2 + b * g2.d2, 0.0, 1e-14};
  }

  double w(double t) const { return jet(t).w; }

  double w_infinity() const { return rp_.omega == 0.0 ? -1.0 : constants_.a_plus_r; }

  /// (0, w' / Omega, w); u stays zero for the initial condition u(-inf) = 0.
  ResonantState state(double t) const {
    const WJet j = jet(t);
    const double rabi = params_.rabi(t);
    return {0.0, rabi > 0.0 ? j.d1 / rabi : 0.0, j.w};
  }

 private:
  ModelParams params_;
  ReducedParams rp_;
  double nu_ = 0.5;
  bool neumann_ = false;
  CuspState cusp_;
  ResonantConstants constants_;
};

inline double w_resonant_full(const ModelParams& params, double t) {
  return ResonantSolution(params).w(t);
}

}  // namespace demkov::resonant

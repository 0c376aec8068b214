#pragma once

// Exact population inversion of the Demkov model with dephasing.
//
// On t <= 0 the regular solution is w1(t) = -1F2(1/2+g; 1/2+g+id, 1/2+g-id;
// -omega^2 e^(2t/T)); the other two solutions are excluded by w(-inf) = -1.
// On t >= 0, w2 = A f1 + B f2 + C f3 with the three-member fundamental set in
// x = -omega^2 e^(-2t/T), matched to w, w' and the post-cusp w'' at t = 0.
//
// Power prefactors are taken on the positive base |x|^s = omega^(2s) e^(-2st/T),
// which only rescales f2, f3 by constants. It keeps f3 = conj(f2) and
// C = conj(B) for real parameters.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "demkov/error.hpp"
#include "demkov/linalg.hpp"
#include "demkov/model.hpp"
#include "demkov/precision.hpp"
#include "demkov/resonant.hpp"
#include "demkov/specialfn.hpp"

namespace demkov {

/// Largest tolerated imaginary residue of quantities that are real in exact
/// arithmetic.
inline constexpr double tol_real = 1e-9;

/// Complex value of a time-domain solution with two time derivatives.
struct TimeJet {
  cplx v;
  cplx d1;
  cplx d2;
  double est_rel_error = 0.0;
};

namespace detail {

// Chain rule for f(t) = P(t) G(x(t)), x = x0 e^(k t), P = p0 e^(s k t):
// x' = k x, x'' = k^2 x, P' = s k P, P'' = (s k)^2 P.
inline TimeJet compose(const specialfn::Jet& g, cplx x, double k, cplx s, cplx p) {
  const cplx dx = k * x, d2x = k * k * x;
  const cplx dp = s * k * p, d2p = s * k * s * k * p;
  return {p * g.f, dp * g.f + p * g.df * dx,
          d2p * g.f + 2.0 * dp * g.df * dx + p * (g.d2f * dx * dx + g.df * d2x), g.est_rel_error};
}

}  // namespace detail

/// w1 and its time derivatives on t <= 0.
inline WJet branch1_jet(const ReducedParams& rp, double t, const PrecisionPolicy& policy = {}) {
  if (t > 0.0) throw Error(ErrorKind::domain, "branch 1 requires t <= 0");
  const double k = 2.0 / rp.t_width;
  const cplx x = -rp.omega * rp.omega * std::exp(k * t);
  const specialfn::Jet g = specialfn::ghf_1f2_jet(rp.ghf_branch1, x, policy);
  const TimeJet j = detail::compose(g, x, k, 0.0, 1.0);
  return {-j.v.real(), -j.d1.real(), -j.d2.real(),
          std::max({std::abs(j.v.imag()), std::abs(j.d1.imag()), std::abs(j.d2.imag())}),
          j.est_rel_error};
}

inline double w_branch1(const ReducedParams& rp, double t, const PrecisionPolicy& policy = {}) {
  return branch1_jet(rp, t, policy).w;
}

/// Initial data for t >= 0. w and w' come from the regular t <= 0 solution;
/// w'' jumps because d Omega / dt flips sign at t = 0 while v and v' stay
/// continuous: w''(0+) - w''(0-) = (Omega'(0+) - Omega'(0-)) v(0) = -(2/T) w'(0).
inline CuspState matching_at_cusp(const ReducedParams& rp, const PrecisionPolicy& policy = {}) {
  if (!(rp.omega > 0.0)) throw Error(ErrorKind::domain, "cusp matching requires omega > 0");
  const WJet j = branch1_jet(rp, 0.0, policy);
  CuspState c;
  c.w0 = j.w;
  c.w1dot = j.d1;
  c.w2dot_left = j.d2;
  c.w2dot_right = j.d2 - 2.0 / rp.t_width * j.d1;
  c.est_rel_error = j.est_rel_error;
  return c;
}

/// f1, f2, f3 on t >= 0, x = -omega^2 e^(-2t/T):
///   f1 = 1F2(1/2-g; 1/2-g-id, 1/2-g+id; x)
///   f2 = |x|^(1/2+g+id) 1F2(1+id; 3/2+g+id, 1+2id; x)
///   f3 = |x|^(1/2+g-id) 1F2(1-id; 1-2id, 3/2+g-id; x)
/// Immutable after construction; safe to share between threads.
class FundamentalSet {
 public:
  FundamentalSet(const ReducedParams& rp, const PrecisionPolicy& policy)
      : rp_(rp), policy_(policy) {
    if (!(rp.omega > 0.0)) throw Error(ErrorKind::domain, "fundamental set requires omega > 0");
    const GhfParams& p = rp.ghf_branch2;
    if (p.degenerate())
      throw Error(ErrorKind::degenerate,
                  "fundamental set is degenerate for |delta| <= eps_degen; use the resonant path");
    params_ = {p, specialfn::second_solution_params(p), specialfn::third_solution_params(p)};
    exponents_ = {0.0, 1.0 - p.b1, 1.0 - p.b2};
  }

  const ReducedParams& reduced() const { return rp_; }
  const std::array<GhfParams, 3>& params() const { return params_; }
  const std::array<cplx, 3>& exponents() const { return exponents_; }

  TimeJet evaluate(int index, double t) const {
    const double k = -2.0 / rp_.t_width;
    const cplx x = -rp_.omega * rp_.omega * std::exp(k * t);
    const cplx s = exponents_.at(index);
    // |x|^s = exp(s (2 ln omega + k t))
    const cplx p = index == 0 ? cplx(1.0) : std::exp(s * (2.0 * std::log(rp_.omega) + k * t));
    const specialfn::Jet g = specialfn::ghf_1f2_jet(params_[index], x, policy_);
    return detail::compose(g, x, k, s, p);
  }

  std::array<TimeJet, 3> evaluate_all(double t) const {
    return {evaluate(0, t), evaluate(1, t), evaluate(2, t)};
  }

  /// Time-domain Wronskian from the closed form in x: the chain rule
  /// contributes (dx/dt)^3, and the positive-base normalisation of f2, f3
  /// contributes exp(-i pi (s2 + s3)) relative to the principal branch.
  cplx closed_form_wronskian(double t) const {
    const double k = -2.0 / rp_.t_width;
    const cplx x = -rp_.omega * rp_.omega * std::exp(k * t);
    const cplx dx = k * x;
    const cplx phase = std::exp(-cplx(0.0, std::numbers::pi) * (exponents_[1] + exponents_[2]));
    return dx * dx * dx * phase * specialfn::wronskian_identity(params_[0], x);
  }

 private:
  ReducedParams rp_;
  PrecisionPolicy policy_;
  std::array<GhfParams, 3> params_;
  std::array<cplx, 3> exponents_;
};

inline FundamentalSet fundamental_set(const ReducedParams& rp, const PrecisionPolicy& policy = {}) {
  return FundamentalSet(rp, policy);
}

struct IntegrationConstants {
  cplx a_plus;
  cplx b_plus;
  cplx c_plus;
  cplx wronskian;
  /// Forward error bound on a_plus (Skeel bound of the matching solve).
  double a_plus_error = 0.0;
};

/// Solves [f_i(0); f_i'(0); f_i''(0)] (A, B, C)^T = (w0, w1dot, w2dot_right)^T
/// by pivoted elimination. `wronskian` is the system determinant.
inline IntegrationConstants branch2_constants(const CuspState& cusp, const FundamentalSet& fs) {
  const auto f = fs.evaluate_all(0.0);
  linalg::Matrix<cplx, 3> m{};
  double eps = cusp.est_rel_error;
  for (int i = 0; i < 3; ++i) {
    m[0][i] = f[i].v;
    m[1][i] = f[i].d1;
    m[2][i] = f[i].d2;
    eps = std::max(eps, f[i].est_rel_error);
  }
  const std::array<cplx, 3> rhs{cusp.w0, cusp.w1dot, cusp.w2dot_right};
  const auto sol = linalg::solve(m, rhs);
  if (std::abs(sol.det) < 1e-12 * linalg::hadamard_bound(m))
    throw Error(ErrorKind::singular_system, "matching system at t = 0 is singular");
  const auto bound = linalg::skeel_bound(m, rhs, sol.x, std::max(eps, 0x1p-52));
  return {sol.x[0], sol.x[1], sol.x[2], sol.det, bound[0]};
}

enum class Route { decoupled, general, resonant };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::decoupled: return "decoupled";
    case Route::general: return "general";
    case Route::resonant: return "resonant";
  }
  return "?";
}

enum class ReconstructionPath { inversion, resonant, free_precession, decoupled };

inline const char* to_string(ReconstructionPath p) {
  switch (p) {
    case ReconstructionPath::inversion: return "inversion";
    case ReconstructionPath::resonant: return "resonant";
    case ReconstructionPath::free_precession: return "free_precession";
    case ReconstructionPath::decoupled: return "decoupled";
  }
  return "?";
}

struct Reconstruction {
  BlochVector state;
  ReconstructionPath path = ReconstructionPath::inversion;
};

struct InversionReport {
  double w_inf = -1.0;
  double probability = 0.0;  // (1 + w_inf) / 2
  double est_error = 0.0;
  Route route = Route::decoupled;
};

/// Full analytic solution for one parameter set. Builds the cusp data and
/// integration constants once; evaluation afterwards is const and
/// thread-safe.
class Solution {
 public:
  /// |t| / T beyond which Omega(t) is treated as switched off for the
  /// Bloch-vector reconstruction.
  static constexpr double free_precession_cutoff = 600.0;

  explicit Solution(const ModelParams& params, const PrecisionPolicy& policy = {})
      : params_(params), policy_(policy), rp_(reduce(params)) {
    policy_.validate();
    if (rp_.omega == 0.0) {
      route_ = Route::decoupled;
    } else if (std::abs(rp_.delta) <= specialfn::eps_degen) {
      route_ = Route::resonant;
      resonant_.emplace(params_);
      cusp_ = resonant_->cusp();
    } else {
      route_ = Route::general;
      cusp_ = matching_at_cusp(rp_, policy_);
      fs_.emplace(rp_, policy_);
      constants_ = branch2_constants(cusp_, *fs_);
    }
  }

  Route route() const { return route_; }
  const ModelParams& params() const { return params_; }
  const ReducedParams& reduced() const { return rp_; }
  const CuspState& cusp() const { return cusp_; }
  /// Only meaningful on the general route.
  const IntegrationConstants& constants() const { return constants_; }
  const std::optional<FundamentalSet>& fundamental() const { return fs_; }
  const std::optional<resonant::ResonantSolution>& resonant_solution() const { return resonant_; }

  /// w and its time derivatives; t = 0 belongs to the t <= 0 branch, so d2
  /// there is the left-sided second derivative.
  WJet jet(double t) const {
    switch (route_) {
      case Route::decoupled: return {};
      case Route::resonant: return resonant_->jet(t);
      case Route::general: break;
    }
    if (t <= 0.0) return branch1_jet(rp_, t, policy_);
    const auto f = fs_->evaluate_all(t);
    const std::array<cplx, 3> c{constants_.a_plus, constants_.b_plus, constants_.c_plus};
    cplx v = 0.0, d1 = 0.0, d2 = 0.0;
    double est = 0.0;
    for (int i = 0; i < 3; ++i) {
      v += c[i] * f[i].v;
      d1 += c[i] * f[i].d1;
      d2 += c[i] * f[i].d2;
      est = std::max(est, f[i].est_rel_error);
    }
    return {v.real(), d1.real(), d2.real(),
            std::max({std::abs(v.imag()), std::abs(d1.imag()), std::abs(d2.imag())}), est};
  }

  double w(double t) const { return jet(t).w; }

  InversionReport inversion() const {
    InversionReport r;
    r.route = route_;
    switch (route_) {
      case Route::decoupled:
        r.w_inf = -1.0;
        break;
      case Route::resonant:
        r.w_inf = resonant_->w_infinity();
        r.est_error = resonant_->constants().est_error;
        break;
      case Route::general:
        r.w_inf = constants_.a_plus.real();
        r.est_error = constants_.a_plus_error + std::abs(constants_.a_plus.imag());
        break;
    }
    r.probability = 0.5 * (1.0 + r.w_inf);
    return r;
  }

  double w_infinity() const { return inversion().w_inf; }

  /// Bloch vector from w and its derivatives by inverting the rows of the
  /// Bloch system: v = w' / Omega, v' = (w'' - sigma w' / T) / Omega with
  /// sigma = sign(-t) (Omega' = sigma Omega / T), u = (v' + Gamma v + Omega w) / Delta.
  Reconstruction bloch(double t) const {
    const double T = params_.t_width;
    if (route_ == Route::decoupled) return {{0.0, 0.0, -1.0}, ReconstructionPath::decoupled};
    if (t < -free_precession_cutoff * T)
      return {{0.0, 0.0, w(t)}, ReconstructionPath::free_precession};
    if (t > free_precession_cutoff * T) {
      // Omega is below double resolution here: u + i v precesses freely.
      const double t_ref = free_precession_cutoff * T;
      const BlochVector ref = bloch(t_ref).state;
      const cplx rot = std::exp(cplx(-params_.gamma_deph, params_.delta) * (t - t_ref));
      const cplx uv = cplx(ref.u, ref.v) * rot;
      return {{uv.real(), uv.imag(), w(t)}, ReconstructionPath::free_precession};
    }
    const WJet j = jet(t);
    const double rabi = params_.rabi(t);
    const double sigma = t <= 0.0 ? 1.0 : -1.0;
    const double v = j.d1 / rabi;
    if (route_ == Route::resonant) return {{0.0, v, j.w}, ReconstructionPath::resonant};
    const double vdot = (j.d2 - sigma * j.d1 / T) / rabi;
    const double u = (vdot + params_.gamma_deph * v + rabi * j.w) / params_.delta;
    return {{u, v, j.w}, ReconstructionPath::inversion};
  }

 private:
  ModelParams params_;
  PrecisionPolicy policy_;
  ReducedParams rp_;
  Route route_ = Route::decoupled;
  CuspState cusp_;
  std::optional<FundamentalSet> fs_;
  std::optional<resonant::ResonantSolution> resonant_;
  IntegrationConstants constants_{};
};

/// Piecewise w(t): w1 on t <= 0, A f1 + B f2 + C f3 on t > 0.
inline double w_full(const ModelParams& params, double t, const PrecisionPolicy& policy = {}) {
  return Solution(params, policy).w(t);
}

/// Final inversion w(+inf) = Re A+.
inline double w_infinity(const ModelParams& params, const PrecisionPolicy& policy = {}) {
  return Solution(params, policy).w_infinity();
}

inline InversionReport final_inversion(const ModelParams& params, const PrecisionPolicy& policy = {}) {
  return Solution(params, policy).inversion();
}

inline Reconstruction bloch_from_w(const ModelParams& params, double t,
                                   const PrecisionPolicy& policy = {}) {
  return Solution(params, policy).bloch(t);
}

inline TimeSeries time_series(const ModelParams& params, double t_min, double t_max, int n_points,
                              const PrecisionPolicy& policy = {}) {
  const Solution sol(params, policy);
  TimeSeries ts;
  ts.times = uniform_grid(t_min, t_max, n_points);
  ts.states.reserve(ts.times.size());
  for (double t : ts.times) ts.states.push_back(sol.bloch(t).state);
  return ts;
}

}  // namespace demkov

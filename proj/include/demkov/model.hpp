#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "demkov/error.hpp"
#include "demkov/specialfn.hpp"

namespace demkov {

using cplx = std::complex<double>;
using specialfn::GhfParams;

/// Physical inputs of the Demkov model with dephasing:
/// Omega(t) = omega0 exp(-|t| / t_width), constant detuning and dephasing.
struct ModelParams {
  double delta = 0.0;       // detuning Delta (angular frequency)
  double omega0 = 0.0;      // peak Rabi frequency Omega_0 (angular frequency)
  double t_width = 1.0;     // pulse width T (time)
  double gamma_deph = 0.0;  // dephasing rate 1/T2 (inverse time)

  void validate() const {
    if (!(t_width > 0.0) || !std::isfinite(t_width))
      throw Error(ErrorKind::domain, "pulse width T must be positive");
    if (!(omega0 >= 0.0) || !std::isfinite(omega0))
      throw Error(ErrorKind::domain, "peak Rabi frequency must be non-negative");
    if (!(gamma_deph >= 0.0) || !std::isfinite(gamma_deph))
      throw Error(ErrorKind::domain, "dephasing rate must be non-negative");
    if (!std::isfinite(delta)) throw Error(ErrorKind::domain, "detuning must be finite");
  }

  /// Builds physical parameters from the dimensionless triple with T = 1.
  static ModelParams from_reduced(double gamma, double delta, double omega) {
    return {2.0 * delta, 2.0 * omega, 1.0, 2.0 * gamma};
  }

  double rabi(double t) const { return omega0 * std::exp(-std::abs(t) / t_width); }
};

/// Dimensionless parameters gamma = T Gamma / 2, delta = T Delta / 2,
/// omega = T Omega_0 / 2, plus the 1F2 parameters of both time branches.
struct ReducedParams {
  double gamma = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double t_width = 1.0;
  /// t <= 0: (1/2 + g; 1/2 + g + i d, 1/2 + g - i d)
  GhfParams ghf_branch1;
  /// t >= 0: (1/2 - g; 1/2 - g - i d, 1/2 - g + i d)
  GhfParams ghf_branch2;
};

inline ReducedParams reduce(const ModelParams& params) {
  params.validate();
  ReducedParams rp;
  rp.gamma = params.t_width * params.gamma_deph / 2.0;
  rp.delta = params.t_width * params.delta / 2.0;
  rp.omega = params.t_width * params.omega0 / 2.0;
  rp.t_width = params.t_width;
  const cplx b1(0.5 + rp.gamma, rp.delta);
  rp.ghf_branch1 = {b1.real(), b1, std::conj(b1)};
  const cplx c1(0.5 - rp.gamma, -rp.delta);
  rp.ghf_branch2 = {c1.real(), c1, std::conj(c1)};
  return rp;
}

/// Bloch vector: u = 2 Re rho12, v = 2 Im rho12, w = rho22 - rho11.
struct BlochVector {
  double u = 0.0;
  double v = 0.0;
  double w = -1.0;

  double norm2() const { return u * u + v * v + w * w; }
};

/// Initial-condition data handed from the t <= 0 branch to the t >= 0 branch.
/// The second derivative jumps at the cusp of Omega(t):
/// w2dot_right = w2dot_left - (2 / T) w1dot.
struct CuspState {
  double w0 = -1.0;
  double w1dot = 0.0;
  double w2dot_left = 0.0;
  double w2dot_right = 0.0;
  double est_rel_error = 0.0;
};

/// w and its first two time derivatives at one instant. `imag` is the
/// largest imaginary part discarded when the value came from complex
/// arithmetic; est_rel_error the propagated special-function estimate.
struct WJet {
  double w = -1.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double imag = 0.0;
  double est_rel_error = 0.0;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<BlochVector> states;
};

/// Uniform grid with both endpoints hit exactly.
inline std::vector<double> uniform_grid(double t_min, double t_max, int n_points) {
  if (!(t_min < t_max)) throw Error(ErrorKind::domain, "time range requires t_min < t_max");
  if (n_points < 2) throw Error(ErrorKind::domain, "time series needs at least two points");
  std::vector<double> t(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i)
    t[i] = t_min + (t_max - t_min) * double(i) / double(n_points - 1);
  t.back() = t_max;
  return t;
}

}  // namespace demkov

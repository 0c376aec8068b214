#pragma once

// Generalized hypergeometric function 1F2(a1; b1, b2; z) with complex
// parameters, plus the gamma and Bessel functions needed around it.
//
// The series is summed in software extended precision whose width follows
// the cancellation estimate of PrecisionPolicy; the large-|z| expansion is
// available for validation and for arguments beyond the series budget.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

#include "demkov/error.hpp"
#include "demkov/precision.hpp"

namespace demkov::specialfn {

using cplx = std::complex<double>;

/// Integer proximity threshold below which a fundamental set built from
/// x^(1-b) solutions is treated as degenerate.
inline constexpr double eps_degen = 1e-8;

inline bool near_integer(cplx z, double eps) {
  return std::abs(z.imag()) <= eps && std::abs(z.real() - std::round(z.real())) <= eps;
}

inline bool near_nonpositive_integer(cplx z, double eps) {
  return near_integer(z, eps) && std::round(z.real()) <= 0.0;
}

struct GhfParams {
  cplx a1;
  cplx b1;
  cplx b2;

  /// True when b1, b2 or b1 - b2 is within eps_degen of an integer, i.e.
  /// the three x^(1-b) solutions no longer form a fundamental set.
  bool degenerate() const {
    return near_integer(b1, eps_degen) || near_integer(b2, eps_degen) ||
           near_integer(b1 - b2, eps_degen);
  }

  /// Parameters of the n-th derivative: (a1 + n; b1 + n, b2 + n).
  GhfParams shifted(int n) const { return {a1 + double(n), b1 + double(n), b2 + double(n)}; }
};

enum class EvalMethod { series, asymptotic };

inline const char* to_string(EvalMethod m) {
  return m == EvalMethod::series ? "series" : "asymptotic";
}

struct EvalResult {
  cplx value;
  double est_rel_error = 0.0;
  EvalMethod method = EvalMethod::series;
  int terms = 0;   // series terms summed (0 for the asymptotic path)
  int digits = 0;  // working precision in decimal digits (0 = double)
};

/// Rising factorial (alpha)_k.
inline cplx pochhammer(cplx alpha, int k) {
  if (k < 0) throw Error(ErrorKind::domain, "pochhammer: k must be >= 0");
  cplx r = 1.0;
  for (int j = 0; j < k; ++j) r *= alpha + double(j);
  return r;
}

namespace detail {

// Lanczos approximation, g = 671/128, 14 coefficients; accurate to a few
// ulps of ln Gamma for Re z >= 1/2.
inline cplx log_gamma_right(cplx z) {
  static constexpr std::array<double, 14> cof = {
      57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
      -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
      -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
      .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
      -.261908384015814087e-4, .368991826595316234e-5};
  cplx y = z;
  cplx tmp = z + 5.24218750000000000;
  tmp = (z + 0.5) * std::log(tmp) - tmp;
  cplx ser = 0.999999999999997092;
  for (double c : cof) {
    y += 1.0;
    ser += c / y;
  }
  return tmp + std::log(2.5066282746310005 * ser / z);
}

// sin(pi z) with the integer part of Re z removed first, so the result keeps
// full relative accuracy next to the zeros.
inline cplx sin_pi(cplx z) {
  const double n = std::round(z.real());
  const cplx r(z.real() - n, z.imag());
  cplx s = std::sin(std::numbers::pi * r);
  if (std::fmod(std::abs(n), 2.0) == 1.0) s = -s;
  return s;
}

inline bool at_gamma_pole(cplx z) { return near_nonpositive_integer(z, 1e-12); }

}  // namespace detail

/// Gamma function on the complex plane (reflection for Re z < 1/2).
inline cplx complex_gamma(cplx z) {
  if (detail::at_gamma_pole(z))
    throw Error(ErrorKind::pole, "complex_gamma at a nonpositive integer");
  if (z.real() < 0.5)
    return std::numbers::pi / (detail::sin_pi(z) * std::exp(detail::log_gamma_right(1.0 - z)));
  return std::exp(detail::log_gamma_right(z));
}

/// 1/Gamma(z), exactly zero at the poles of Gamma.
inline cplx reciprocal_gamma(cplx z) {
  if (detail::at_gamma_pole(z)) return 0.0;
  if (z.real() < 0.5)
    return detail::sin_pi(z) * std::exp(detail::log_gamma_right(1.0 - z)) / std::numbers::pi;
  return std::exp(-detail::log_gamma_right(z));
}

/// z^s on the principal branch, with the negative real axis mapped to
/// arg z = +pi regardless of the sign of a zero imaginary part.
inline cplx principal_pow(cplx z, cplx s) {
  if (z.imag() == 0.0 && z.real() < 0.0)
    return std::exp(s * cplx(std::log(-z.real()), std::numbers::pi));
  if (z == cplx(0.0)) return s == cplx(0.0) ? cplx(1.0) : cplx(0.0);
  return std::exp(s * std::log(z));
}

namespace detail {

inline void check_series_params(const GhfParams& p) {
  if (near_nonpositive_integer(p.b1, 1e-13) || near_nonpositive_integer(p.b2, 1e-13))
    throw Error(ErrorKind::pole, "1F2 bottom parameter is a nonpositive integer");
}

struct SeriesOutcome {
  cplx value;
  double tail = 0.0;      // bound on the discarded tail
  double rounding = 0.0;  // bound on accumulated rounding (absolute)
  int terms = 0;
};

template <class R>
SeriesOutcome sum_series(const GhfParams& p, cplx z, const PrecisionPolicy& policy, int digits) {
  using C = xp::Complex<R>;
  const C a(p.a1), b1(p.b1), b2(p.b2), zz(z);
  C term(R(1), R(0));
  C sum = term;

  const double abs_a = std::abs(p.a1), abs_b1 = std::abs(p.b1), abs_b2 = std::abs(p.b2);
  const double abs_z = std::abs(z);
  const double u = std::pow(10.0, -double(digits));
  double peak = 1.0;
  int quiet = 0;

  for (int k = 0; k < policy.max_terms; ++k) {
    // term_{k+1} = term_k (a + k) z / ((b1 + k)(b2 + k)(k + 1))
    term = term * (a + k) * zz / ((b1 + k) * (b2 + k) * (k + 1));
    sum += term;
    const int n = k + 1;
    const double mag = std::abs(term.to_double());
    peak = std::max(peak, mag);
    const double abs_sum = std::abs(sum.to_double());
    const double rounding = 6.0 * double(n) * double(n) * peak * u;

    if (term.is_zero()) return {sum.to_double(), 0.0, rounding, n};

    // Majorant for |r_j|, j >= n; decreasing in j once n exceeds |b1|, |b2|.
    const double nn = double(n);
    if (nn > std::max(abs_b1, abs_b2) + 1.0) {
      const double rho = abs_z * (abs_a + nn) / ((nn - abs_b1) * (nn - abs_b2) * (nn + 1.0));
      if (rho < 1.0) {
        const double tail = mag * rho / (1.0 - rho);
        if (tail < policy.target_rel_error * abs_sum) {
          if (++quiet == 3) return {sum.to_double(), tail, rounding, n};
        } else {
          quiet = 0;
        }
      }
    }
  }
  throw Error(ErrorKind::non_convergence,
              "1F2 series did not converge within " + std::to_string(policy.max_terms) +
                  " terms at |z| = " + std::to_string(abs_z));
}

}  // namespace detail

/// Power-series evaluation at a working precision picked from |z|. If the
/// rounding budget still exceeds a tenth of the target (a value near a zero
/// of the function), the sum is repeated with more digits.
inline EvalResult ghf_1f2_series(const GhfParams& p, cplx z, const PrecisionPolicy& policy) {
  policy.validate();
  detail::check_series_params(p);
  if (z == cplx(0.0)) return {cplx(1.0), 0.0, EvalMethod::series, 0, 0};

  constexpr double unit_roundoff = 0x1p-53;
  int digits = policy.working_digits(std::abs(z));
  for (;;) {
    const int carried = xp::tier_digits(digits);
    const auto out = xp::with_precision(digits, [&](auto tag) {
      return detail::sum_series<typename decltype(tag)::type>(p, z, policy, carried);
    });
    const double scale = std::max(std::abs(out.value), std::numeric_limits<double>::min());
    const double rounding_rel = out.rounding / scale;
    if (rounding_rel > 0.1 * policy.target_rel_error && carried < xp::max_digits) {
      const int more = static_cast<int>(
          std::ceil(std::log10(rounding_rel / (0.1 * policy.target_rel_error)))) + 5;
      digits = std::min(xp::max_digits, carried + more);
      continue;
    }
    return {out.value, (out.tail + out.rounding) / scale + unit_roundoff, EvalMethod::series,
            out.terms, carried};
  }
}

/// Exponent chi = (a1 - b1 - b2 + 1/2) / 2 of the oscillatory asymptotic term.
inline cplx asymptotic_chi(const GhfParams& p) { return 0.5 * (p.a1 - p.b1 - p.b2 + 0.5); }

/// Two-term expansion for z -> -infinity:
///
///   1F2 ~ G(b1) G(b2) / (sqrt(pi) G(a1)) (-z)^chi cos(pi chi + 2 sqrt(-z))
///       + G(b1) G(b2) / (G(b1 - a1) G(b2 - a1)) (-z)^(-a1).
///
/// est_rel_error is the envelope of the first omitted corrections: a relative
/// P / (4 sqrt(-z)) on the oscillatory term, with
/// P = 4 b1 b2 + (8 chi - 2)(b1 + b2) + 12 chi^2 - 10 chi + 1, and
/// a1 (1 + a1 - b1)(1 + a1 - b2) / z on the algebraic term, plus the next
/// oscillatory order estimated as (P / 4)^2 / (-z).
inline EvalResult ghf_1f2_asymptotic(const GhfParams& p, cplx z,
                                     const PrecisionPolicy& policy = {}) {
  if (std::abs(z) < policy.z_switch)
    throw Error(ErrorKind::domain, "asymptotic 1F2 requires |z| >= z_switch");
  if (!(z.real() < 0.0) || std::abs(z.imag()) > 1e-12 * std::abs(z))
    throw Error(ErrorKind::domain, "asymptotic 1F2 is implemented on the negative real axis");

  const double x = -z.real();
  const double s = std::sqrt(x);
  const cplx chi = asymptotic_chi(p);
  const cplx gb = complex_gamma(p.b1) * complex_gamma(p.b2);

  const cplx osc_coef = gb * reciprocal_gamma(p.a1) / std::sqrt(std::numbers::pi);
  const cplx alg_coef = gb * reciprocal_gamma(p.b1 - p.a1) * reciprocal_gamma(p.b2 - p.a1);

  const cplx x_chi = std::exp(chi * std::log(x));
  const cplx phase = std::numbers::pi * chi + 2.0 * s;
  const cplx osc = osc_coef * x_chi * std::cos(phase);
  const cplx alg = alg_coef * std::exp(-p.a1 * std::log(x));

  const cplx big_p = 4.0 * p.b1 * p.b2 + (8.0 * chi - 2.0) * (p.b1 + p.b2) +
                     12.0 * chi * chi - 10.0 * chi + 1.0;
  const double envelope =
      std::abs(osc_coef * x_chi) * std::cosh(std::numbers::pi * chi.imag());
  const double q = std::abs(big_p) / (4.0 * s);
  const double osc_err = envelope * (q + q * q);
  const double alg_err =
      std::abs(alg) * std::abs(p.a1 * (1.0 + p.a1 - p.b1) * (1.0 + p.a1 - p.b2)) / x;

  const cplx value = osc + alg;
  const double scale = std::max(std::abs(value), std::numeric_limits<double>::min());
  // A few ulps for the evaluation itself; the truncation terms vanish when
  // a1 = 0 and the function is identically one.
  constexpr double rounding = 16.0 * 0x1p-53;
  return {value, (osc_err + alg_err) / scale + rounding, EvalMethod::asymptotic, 0, 0};
}

/// 1F2(a1; b1, b2; z). Series below policy.z_switch, asymptotic expansion on
/// the negative real axis beyond it.
inline EvalResult ghf_1f2(const GhfParams& p, cplx z, const PrecisionPolicy& policy = {}) {
  const bool negative_axis = z.real() < 0.0 && std::abs(z.imag()) <= 1e-12 * std::abs(z);
  if (std::abs(z) >= policy.z_switch && negative_axis) return ghf_1f2_asymptotic(p, z, policy);
  return ghf_1f2_series(p, z, policy);
}

/// n-th z-derivative via d^n/dz^n 1F2 = (a1)_n / ((b1)_n (b2)_n) 1F2(a1+n; b1+n, b2+n; z).
inline EvalResult ghf_1f2_derivative(const GhfParams& p, cplx z, int n,
                                     const PrecisionPolicy& policy = {}) {
  if (n < 1) throw Error(ErrorKind::domain, "derivative order must be >= 1");
  detail::check_series_params(p);
  const GhfParams q = p.shifted(n);
  EvalResult r = ghf_1f2(q, z, policy);
  const cplx factor = pochhammer(p.a1, n) / (pochhammer(p.b1, n) * pochhammer(p.b2, n));
  r.value *= factor;
  r.est_rel_error += 3.0 * n * 0x1p-53;
  return r;
}

/// Value and first two z-derivatives.
struct Jet {
  cplx f, df, d2f;
  double est_rel_error = 0.0;
};

inline Jet ghf_1f2_jet(const GhfParams& p, cplx z, const PrecisionPolicy& policy = {}) {
  const EvalResult f = ghf_1f2(p, z, policy);
  const EvalResult d1 = ghf_1f2_derivative(p, z, 1, policy);
  const EvalResult d2 = ghf_1f2_derivative(p, z, 2, policy);
  return {f.value, d1.value, d2.value,
          std::max({f.est_rel_error, d1.est_rel_error, d2.est_rel_error})};
}

/// Bessel function of the first kind J_nu(x), real order, x >= 0.
inline double bessel_j(double nu, double x) {
  if (!(x >= 0.0)) throw Error(ErrorKind::domain, "bessel_j requires x >= 0");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0 || std::round(nu) == nu) return 0.0;
    throw Error(ErrorKind::domain, "bessel_j diverges at x = 0 for negative non-integer order");
  }
  return boost::math::cyl_bessel_j(nu, x);
}

/// Bessel function of the second kind Y_nu(x), real order, x > 0.
inline double bessel_y(double nu, double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::domain, "bessel_y requires x > 0");
  return boost::math::cyl_neumann(nu, x);
}

/// Closed-form Wronskian of {F, z^(1-b1) F(...), z^(1-b2) F(...)}:
/// (b1 - 1)(b2 - 1)(b1 - b2) z^(-b1 - b2 - 1), principal branch.
inline cplx wronskian_identity(const GhfParams& p, cplx z) {
  if (p.degenerate())
    throw Error(ErrorKind::degenerate, "fundamental set undefined for integer b1, b2 or b1 - b2");
  return (p.b1 - 1.0) * (p.b2 - 1.0) * (p.b1 - p.b2) * principal_pow(z, -p.b1 - p.b2 - 1.0);
}

/// Parameters of the second and third members of the fundamental set,
/// z^(1-b1) 1F2(a1+1-b1; 2-b1, b2+1-b1; z) and its b1 <-> b2 mirror.
inline GhfParams second_solution_params(const GhfParams& p) {
  return {p.a1 + 1.0 - p.b1, 2.0 - p.b1, p.b2 + 1.0 - p.b1};
}
inline GhfParams third_solution_params(const GhfParams& p) {
  return {p.a1 + 1.0 - p.b2, p.b1 + 1.0 - p.b2, 2.0 - p.b2};
}

}  // namespace demkov::specialfn

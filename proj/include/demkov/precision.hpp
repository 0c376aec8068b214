#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <type_traits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "demkov/error.hpp"

namespace demkov {

/// Controls how hard the special-function layer works for a value.
///
/// Power series of 1F2 at large negative argument suffer catastrophic
/// cancellation: terms peak near k ~ 2 sqrt|z| with size ~ exp(2 sqrt|z|)
/// while the sum stays O(1). The working precision therefore grows with |z|:
/// double precision plus the digits lost to cancellation plus a guard.
struct PrecisionPolicy {
  double target_rel_error = 1e-15;
  int max_terms = 20000;
  /// |z| at which ghf_1f2 hands over to the asymptotic expansion.
  double z_switch = 1e4;
  /// Guard digits on top of the cancellation estimate.
  int extra_digits = 10;
  /// Floor for the working precision (decimal digits); 0 means no floor.
  int min_digits = 0;

  int working_digits(double abs_z) const {
    constexpr double log10e = 0.43429448190325182765;
    const int lost = static_cast<int>(std::ceil(2.0 * std::sqrt(abs_z) * log10e));
    return std::max(min_digits, 17 + lost + extra_digits);
  }

  void validate() const {
    if (!(target_rel_error > 0.0 && target_rel_error < 1.0))
      throw Error(ErrorKind::domain, "target_rel_error must lie in (0, 1)");
    if (max_terms < 1) throw Error(ErrorKind::domain, "max_terms must be >= 1");
    if (!(z_switch > 0.0)) throw Error(ErrorKind::domain, "z_switch must be > 0");
    if (extra_digits < 0 || min_digits < 0)
      throw Error(ErrorKind::domain, "digit counts must be non-negative");
  }

  /// Applies DEMKOV_PRECISION_DIGITS (if set) as the working-precision floor.
  static PrecisionPolicy from_environment(PrecisionPolicy base) {
    if (const char* env = std::getenv("DEMKOV_PRECISION_DIGITS")) {
      char* end = nullptr;
      const long digits = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || digits < 0 || digits > 100000)
        throw Error(ErrorKind::domain,
                    std::string("DEMKOV_PRECISION_DIGITS is not a valid digit count: ") + env);
      base.min_digits = static_cast<int>(digits);
    }
    return base;
  }
  static PrecisionPolicy from_environment();
};

inline PrecisionPolicy PrecisionPolicy::from_environment() {
  return from_environment(PrecisionPolicy{});
}

namespace xp {

template <unsigned Digits>
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                           boost::multiprecision::et_off>;

/// Largest working precision available, in decimal digits.
inline constexpr int max_digits = 400;

/// Minimal complex arithmetic over a multiprecision real. std::complex is
/// only specified for the built-in floating types.
template <class R>
struct Complex {
  R re{0};
  R im{0};

  Complex() = default;
  Complex(const R& r, const R& i) : re(r), im(i) {}
  explicit Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator+(Complex a, int k) {
    a.re += k;
    return a;
  }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(Complex a, int k) {
    a.re *= k;
    a.im *= k;
    return a;
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    const R d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  bool is_zero() const { return re == 0 && im == 0; }
  std::complex<double> to_double() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

/// Calls fn(std::type_identity<Real>{}) with the smallest tier holding
/// `digits` decimal digits. Throws when the request exceeds every tier.
template <class Fn>
decltype(auto) with_precision(int digits, Fn&& fn) {
  if (digits <= 40) return fn(std::type_identity<Real<40>>{});
  if (digits <= 60) return fn(std::type_identity<Real<60>>{});
  if (digits <= 100) return fn(std::type_identity<Real<100>>{});
  if (digits <= 160) return fn(std::type_identity<Real<160>>{});
  if (digits <= 250) return fn(std::type_identity<Real<250>>{});
  if (digits <= max_digits) return fn(std::type_identity<Real<max_digits>>{});
  throw Error(ErrorKind::non_convergence,
              "required working precision of " + std::to_string(digits) +
                  " digits exceeds the supported maximum of " + std::to_string(max_digits));
}

/// Decimal digits actually carried by the tier selected for `digits`.
inline int tier_digits(int digits) {
  for (int tier : {40, 60, 100, 160, 250, max_digits})
    if (digits <= tier) return tier;
  return max_digits;
}

}  // namespace xp
}  // namespace demkov

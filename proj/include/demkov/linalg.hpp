#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace demkov::linalg {

template <class T, std::size_t N>
using Matrix = std::array<std::array<T, N>, N>;

template <class T, std::size_t N>
struct LuSolve {
  std::array<T, N> x;
  T det;
};

/// Gaussian elimination with partial pivoting. Returns the solution and the
/// determinant; a zero pivot leaves det == 0 and x unspecified.
template <class T, std::size_t N>
LuSolve<T, N> solve(Matrix<T, N> a, std::array<T, N> b) {
  T det = T(1);
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == T(0)) return {{}, T(0)};
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(b[piv], b[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < N; ++r) {
      const T m = a[r][col] / a[col][col];
      for (std::size_t c = col; c < N; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::array<T, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    T s = b[i];
    for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return {x, det};
}

/// Product of row 2-norms: Hadamard's bound on |det a|.
template <class T, std::size_t N>
double hadamard_bound(const Matrix<T, N>& a) {
  double p = 1.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (const auto& v : row) s += std::norm(std::complex<double>(v));
    p *= std::sqrt(s);
  }
  return p;
}

/// Componentwise (Skeel) forward error bound for a x = b when every entry of
/// a and b carries relative error eps: |a^-1| (eps |b| + eps |a| |x|).
template <class T, std::size_t N>
std::array<double, N> skeel_bound(const Matrix<T, N>& a, const std::array<T, N>& b,
                                  const std::array<T, N>& x, double eps) {
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) {
    double s = std::abs(b[i]);
    for (std::size_t j = 0; j < N; ++j) s += std::abs(a[i][j]) * std::abs(x[j]);
    r[i] = eps * s;
  }
  std::array<double, N> out{};
  for (std::size_t col = 0; col < N; ++col) {
    std::array<T, N> e{};
    e[col] = T(1);
    const auto inv_col = solve(a, e).x;
    for (std::size_t i = 0; i < N; ++i) out[i] += std::abs(inv_col[i]) * r[col];
  }
  return out;
}

}  // namespace demkov::linalg

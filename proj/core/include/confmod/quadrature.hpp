#pragma once

#include <cmath>
#include <complex>
#include <type_traits>
#include <utility>

namespace confmod::quadrature {

template <class T>
struct Result {
  T value{};
  double abs_error = 0.0;
  int evaluations = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr double kWg[4] = {0.129484966168869693270611432679082,
                                  0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975,
                                  0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T, class F>
Result<T> adaptive(F& f, double a, double b, double tol, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  const double err = magnitude(kronrod - gauss);
  if (err <= tol || depth <= 0 || half <= 1e-15 * (std::abs(a) + std::abs(b))) {
    return {kronrod, err, 15};
  }
  Result<T> left = adaptive<T>(f, a, center, 0.5 * tol, depth - 1);
  Result<T> right = adaptive<T>(f, center, b, 0.5 * tol, depth - 1);
  return {left.value + right.value, left.abs_error + right.abs_error,
          left.evaluations + right.evaluations};
}

}  // namespace detail

/// Adaptive 15-point Gauss-Kronrod on [a, b] with recursive bisection. The
/// error estimate is |K15 - G7| summed over accepted panels.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol = 1e-12, int max_depth = 40) {
  using T = std::decay_t<decltype(f(a))>;
  if (a == b) return Result<T>{};
  if (b < a) {
    Result<T> r = integrate(f, b, a, abs_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  return detail::adaptive<T>(f, a, b, abs_tol, max_depth);
}

}  // namespace confmod::quadrature

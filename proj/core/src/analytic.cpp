#include "confmod/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "confmod/error.hpp"
#include "confmod/quadrature.hpp"

namespace confmod::analytic {

using geometry::BoundaryFunction;
using geometry::ChannelDomain;
using geometry::Point;
using geometry::StretchFactor;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> breakpoints(const BoundaryFunction& u, const BoundaryFunction& v, double lo,
                                double hi) {
  std::vector<double> xs{lo, hi};
  for (const Point& p : u.samples()) {
    if (p.x > lo && p.x < hi) xs.push_back(p.x);
  }
  for (const Point& p : v.samples()) {
    if (p.x > lo && p.x < hi) xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// Integral of 1 / g over a panel where g is linear from g0 to g1.
double reciprocal_linear(double width, double g0, double g1) {
  const double z = (g1 - g0) / g0;
  if (std::abs(z) < 1e-8) return width / g0 * (1.0 - z / 2.0 + z * z / 3.0);
  return width * std::log1p(z) / (g1 - g0);
}

}  // namespace

GammaValue gamma(const ChannelDomain& domain, const GammaOptions& options) {
  const BoundaryFunction& f1 = domain.outer_lower();
  const BoundaryFunction& f2 = domain.inner_upper();
  const double c = domain.c();
  const double d = domain.d();
  const std::vector<double> xs = breakpoints(f1, f2, c, d);

  GammaValue out;
  if (!f1.has_exact() && !f2.has_exact()) {
    double prev = f1.interpolate(xs.front()) - f2.interpolate(xs.front());
    if (!(prev > 0.0)) throw Error(ErrorKind::NonpositiveGap, "f1 <= f2 at x = c");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double next = f1.interpolate(xs[i]) - f2.interpolate(xs[i]);
      if (!(next > 0.0)) {
        throw Error(ErrorKind::NonpositiveGap, "f1 <= f2 at x = " + std::to_string(xs[i]));
      }
      out.value += reciprocal_linear(xs[i] - xs[i - 1], prev, next);
      prev = next;
    }
    out.abs_error_estimate =
        4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(xs.size()) * out.value;
    return out;
  }

  auto integrand = [&](double x) {
    const double gap = f1(x) - f2(x);
    if (!(gap > 0.0)) {
      throw Error(ErrorKind::NonpositiveGap, "f1 <= f2 at x = " + std::to_string(x));
    }
    return 1.0 / gap;
  };
  const double total = d - c;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double w = xs[i] - xs[i - 1];
    auto r = quadrature::integrate(integrand, xs[i - 1], xs[i], options.abs_tol * w / total);
    out.value += r.value;
    out.abs_error_estimate += r.abs_error;
  }
  return out;
}

double annulus_modulus(double r, double R) {
  if (!(r > 0.0) || !(R > r) || !std::isfinite(R)) {
    throw Error(ErrorKind::NonpositiveOrUnorderedRadii,
                "annulus radii must satisfy 0 < r < R (r = " + std::to_string(r) +
                    ", R = " + std::to_string(R) + ")");
  }
  return std::log(R / r) / (2.0 * kPi);
}

double agm(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::OutOfRange, "agm needs positive arguments");
  for (int i = 0; i < 64; ++i) {
    if (std::abs(a - b) <= 1e-15 * a) break;
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

double elliptic_k(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) throw Error(ErrorKind::OutOfRange, "elliptic_k needs 0 <= k < 1");
  return kPi / (2.0 * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))));
}

double grotzsch_mu(double r) {
  if (!(r > 0.0) || !(r < 1.0)) {
    throw Error(ErrorKind::OutOfRange, "grotzsch_mu needs 0 < r < 1, got " + std::to_string(r));
  }
  const double rc = std::sqrt((1.0 - r) * (1.0 + r));
  // K(rc) / K(r) = agm(1, rc) / agm(1, r).
  return 0.5 * kPi * agm(1.0, rc) / agm(1.0, r);
}

double teichmuller_modulus(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::OutOfRange, "teichmuller_modulus needs t > 0");
  }
  return grotzsch_mu(1.0 / std::sqrt(1.0 + t)) / kPi;
}

double r_of_rho(double rho) {
  if (!(rho > 1.0)) throw Error(ErrorKind::OutOfRange, "rho must exceed 1");
  return 2.0 * rho / (1.0 + rho * rho);
}

Complex mobius_psi(double rho, Complex zeta) {
  if (!(rho > 1.0)) throw Error(ErrorKind::OutOfRange, "rho must exceed 1");
  const Complex i{0.0, 1.0};
  const Complex den = zeta + i * rho;
  if (std::abs(den) <= 1e-14 * rho) {
    throw Error(ErrorKind::PoleEvaluation, "mobius_psi evaluated at its pole -i rho");
  }
  return rho * (rho * zeta + i) / den;
}

Complex sqrt_upper_cut(Complex w) {
  double arg = std::atan2(w.imag(), w.real());
  if (arg > 0.5 * kPi) arg -= 2.0 * kPi;
  return std::polar(std::sqrt(std::abs(w)), 0.5 * arg);
}

Complex halfplane_to_U(double M, Complex zeta) {
  if (std::isnan(zeta.real()) || std::isnan(zeta.imag()) || !std::isfinite(M)) {
    throw Error(ErrorKind::InvalidInput, "halfplane_to_U: NaN input");
  }
  if (!(M > 0.0)) throw Error(ErrorKind::InvalidInput, "halfplane_to_U needs M > 0");
  if (zeta.imag() > 0.0) {
    throw Error(ErrorKind::OutOfRange, "halfplane_to_U is defined on the closed lower half-plane");
  }
  const Complex root = sqrt_upper_cut(zeta - 1.0) * sqrt_upper_cut(zeta + 1.0);
  const Complex F = zeta + root;
  double arg = std::atan2(F.imag(), F.real());
  // F stays in the closed lower half-plane; positive angles are rounding or the -pi side.
  if (arg > 0.5 * kPi) arg -= 2.0 * kPi;
  const Complex log_f{std::log(std::abs(F)), arg};
  return (M / kPi) * root + M * (log_f / kPi);
}

void ShearParams::validate() const {
  if (!(c < d)) throw Error(ErrorKind::InvalidInput, "shear breakpoints need c < d");
  if (!(M >= 0.0)) throw Error(ErrorKind::InvalidInput, "shear offset M must be non-negative");
}

double ShearParams::max_slope() const {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

namespace {

// Vertical offset subtracted on the piece containing x.
double shear_offset(const ShearParams& p, double H, double x) {
  if (x <= H * p.c) return p.a[0] / H * x + p.b[0];
  if (x <= H * p.d) return p.a[1] / H * x + p.b[1] + p.M;
  return p.a[2] / H * x + p.b[2];
}

}  // namespace

Complex shear_eta(const ShearParams& p, StretchFactor H, Complex z) {
  p.validate();
  return {z.real(), z.imag() - shear_offset(p, H.value(), z.real())};
}

Complex shear_eta_inverse(const ShearParams& p, StretchFactor H, Complex w) {
  p.validate();
  return {w.real(), w.imag() + shear_offset(p, H.value(), w.real())};
}

bool is_continuous(const ShearParams& p, StretchFactor H, double tol) {
  p.validate();
  const double h = H.value();
  const double xc = h * p.c;
  const double xd = h * p.d;
  const double left_c = p.a[0] / h * xc + p.b[0];
  const double mid_c = p.a[1] / h * xc + p.b[1] + p.M;
  const double mid_d = p.a[1] / h * xd + p.b[1] + p.M;
  const double right_d = p.a[2] / h * xd + p.b[2];
  const double scale = 1.0 + std::abs(left_c) + std::abs(right_d);
  return std::abs(left_c - mid_c) <= tol * scale && std::abs(mid_d - right_d) <= tol * scale;
}

double shear_k(const ShearParams& p, StretchFactor H) {
  const double A = p.max_slope();
  const double h = H.value();
  return A / std::sqrt(A * A + 4.0 * h * h);
}

double shear_dilatation(const ShearParams& p, StretchFactor H) {
  const double k = shear_k(p, H);
  return (1.0 + k) / (1.0 - k);
}

double asymptotic_prediction(const ChannelDomain& domain, StretchFactor H) {
  return 1.0 / (gamma(domain).value * H.value());
}

}  // namespace confmod::analytic

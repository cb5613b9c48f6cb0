#pragma once

#include <array>
#include <complex>

#include "confmod/geometry.hpp"

namespace confmod::analytic {

using Complex = std::complex<double>;

struct GammaValue {
  double value = 0.0;
  double abs_error_estimate = 0.0;
};

struct GammaOptions {
  double abs_tol = 1e-10;
};

/// Integral of 1 / (f1(x) - f2(x)) over [c, d].
///
/// When neither function has an exact evaluator the interpolants are integrated
/// in closed form (the integrand is 1 / linear on each breakpoint panel);
/// otherwise adaptive Gauss-Kronrod runs panel by panel. Throws
/// Error(NonpositiveGap) if f1 <= f2 anywhere it is evaluated.
GammaValue gamma(const geometry::ChannelDomain& domain, const GammaOptions& options = {});

/// log(R / r) / (2 pi); requires 0 < r < R.
double annulus_modulus(double r, double R);

/// Arithmetic-geometric mean, iterated until the means agree to 1e-15 relative.
double agm(double a, double b);

/// Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, sqrt(1 - k^2))).
double elliptic_k(double k);

/// Groetzsch ring function mu(r) = (pi/2) K(sqrt(1 - r^2)) / K(r), 0 < r < 1.
double grotzsch_mu(double r);

/// Modulus of the ring C \ ([-1, 0] U [t, inf)), equal to mu(1 / sqrt(1 + t)) / pi.
double teichmuller_modulus(double t);

/// 2 rho / (1 + rho^2).
double r_of_rho(double rho);

/// rho (rho zeta + i) / (zeta + i rho). Maps the unit circle to |w| = rho and the
/// circle |zeta + i r/2| = r/2, r = r_of_rho(rho), to the unit circle.
Complex mobius_psi(double rho, Complex zeta);

/// Square root with its cut on the positive imaginary axis (arg in (-3pi/2, pi/2]).
Complex sqrt_upper_cut(Complex w);

/// Conformal map of the closed lower half-plane onto the L-shaped region U
/// (bounded by {Im = -M, Re <= 0}, [-iM, 0] and {Im = 0, Re >= 0}):
///   g(zeta) = (M/pi) [ sqrt(zeta^2 - 1) + log(zeta + sqrt(zeta^2 - 1)) ],
/// with g(1) = 0, g(-1) = -iM, g real and increasing on (1, inf). On the
/// segment (-1, 1) the lower-side limit is returned.
Complex halfplane_to_U(double M, Complex zeta);

/// Coefficients of the piecewise vertical shear: lines y = a_k x + b_k for the
/// left, middle and right pieces, middle offset M, breakpoints at H c and H d.
struct ShearParams {
  std::array<double, 3> a{};
  std::array<double, 3> b{};
  double M = 0.0;
  double c = 0.0;
  double d = 1.0;

  /// Throws Error(InvalidInput) unless c < d and M >= 0.
  void validate() const;
  double max_slope() const;
};

/// x + i v(x, y) with v the three-piece shear of the stretched lines.
Complex shear_eta(const ShearParams& p, geometry::StretchFactor H, Complex z);
/// Inverse of shear_eta, piece by piece (x is preserved).
Complex shear_eta_inverse(const ShearParams& p, geometry::StretchFactor H, Complex w);
/// Whether the three pieces agree on the breakpoint lines.
bool is_continuous(const ShearParams& p, geometry::StretchFactor H, double tol = 1e-12);

/// k = A / sqrt(A^2 + 4 H^2) with A = max |a_k|.
double shear_k(const ShearParams& p, geometry::StretchFactor H);
/// Maximal dilatation K(H) = (1 + k) / (1 - k).
double shear_dilatation(const ShearParams& p, geometry::StretchFactor H);

/// 1 / (gamma(domain) H): the limiting law, and an upper bound for every H.
double asymptotic_prediction(const geometry::ChannelDomain& domain, geometry::StretchFactor H);

}  // namespace confmod::analytic

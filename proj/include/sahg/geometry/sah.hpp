#pragma once

#include <span>
#include <vector>

// Closed-form quantities of the sector-anisotropic hyperbolic metric
//   ds^2 = dr^2 + J(r, u)^2 dsigma^2,   J(r, u) = sinh(gamma(u) r) / gamma(u).
// Pure functions, double precision, safe to call concurrently.

namespace sahg::geometry {

inline constexpr double kPolarEps = 1e-6;

// Radial-angular coordinates of a latent vector. u is a unit vector, or a
// shorter vector when |z| < eps, or zero at the origin.
struct SahPoint {
  double r = 0.0;
  std::vector<double> u;
};

// sinh(x) / x, accurate down to x -> 0.
double sinhc(double x);

// Angular warp J = sinh(gamma r) / gamma. Throws DomainError for gamma <= 0.
double warp_factor(double gamma, double r);

// Radial sectional curvature -gamma^2.
double radial_curvature(double gamma);

// -J''(r) / J(r) by second-order central differences on warp_factor.
double radial_curvature_numeric(double gamma, double r, double h = 1e-4);

// Arc-length amplification over the Euclidean circle of the same radius,
// sinh(g r0) / (g r0). Both arguments must be positive.
double amplification_ratio(double gamma_bar, double r0);

// Max |warp_factor(sqrt c, r) - sinh(sqrt(c) r) / sqrt(c)| over the samples.
double check_constant_curvature_reduction(double c, std::span<const SahPoint> samples);

SahPoint polar_decompose(std::span<const double> z, double eps = kPolarEps);

}  // namespace sahg::geometry

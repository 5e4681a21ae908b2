#include "sahg/geometry/sah.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sahg/error.hpp"

namespace sahg::geometry {

double sinhc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-2) {
    // Taylor series; the next term x^8/362880 is below 1e-21 here.
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) / x;
}

double warp_factor(double gamma, double r) {
  if (!(gamma > 0.0)) throw DomainError("warp_factor: gamma must be > 0, got " + std::to_string(gamma));
  if (r < 0.0) throw DomainError("warp_factor: r must be >= 0, got " + std::to_string(r));
  const double x = gamma * r;
  if (x < 1e-2) return r * sinhc(x);
  return std::sinh(x) / gamma;
}

double radial_curvature(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("radial_curvature: gamma must be > 0, got " + std::to_string(gamma));
  return -gamma * gamma;
}

double radial_curvature_numeric(double gamma, double r, double h) {
  if (!(r > h)) throw DomainError("radial_curvature_numeric: need r > h");
  const double j = warp_factor(gamma, r);
  const double jpp = (warp_factor(gamma, r + h) - 2.0 * j + warp_factor(gamma, r - h)) / (h * h);
  return -jpp / j;
}

double amplification_ratio(double gamma_bar, double r0) {
  if (!(gamma_bar > 0.0) || !(r0 > 0.0)) {
    throw DomainError("amplification_ratio: arguments must be positive");
  }
  return sinhc(gamma_bar * r0);
}

double check_constant_curvature_reduction(double c, std::span<const SahPoint> samples) {
  if (!(c > 0.0)) throw DomainError("constant curvature scale must be > 0");
  const double g = std::sqrt(c);
  double worst = 0.0;
  for (const auto& s : samples) {
    const double direct = std::sinh(g * s.r) / g;
    worst = std::max(worst, std::abs(warp_factor(g, s.r) - direct));
  }
  return worst;
}

SahPoint polar_decompose(std::span<const double> z, double eps) {
  if (!(eps > 0.0)) throw DomainError("polar_decompose: eps must be > 0");
  SahPoint p;
  double ss = 0.0;
  for (double v : z) ss += v * v;
  p.r = std::sqrt(ss);
  const double denom = std::max(p.r, eps);
  p.u.reserve(z.size());
  for (double v : z) p.u.push_back(v / denom);
  return p;
}

}  // namespace sahg::geometry

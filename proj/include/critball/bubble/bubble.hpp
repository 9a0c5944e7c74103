#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "critball/core.hpp"
#include "critball/numkit/quadrature.hpp"

namespace critball::bubble {

/// U_{x,lambda}(y) = lambda^{1/2} (1 + lambda^2 |y-x|^2)^{-1/2}.
struct Bubble {
  Point x{0.0, 0.0, 0.0};
  double lambda = 1.0;

  Bubble() = default;
  Bubble(Point centre, double lam) : x(centre), lambda(lam) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw DomainError("Bubble: lambda must be positive");
  }
};

// Radial profiles of the centred bubble; r = |y - x|.

inline double u_radial(double lam, double r) { return std::sqrt(lam / (1.0 + lam * lam * r * r)); }

/// dU/dr.
inline double du_dr(double lam, double r) {
  const double s = 1.0 + lam * lam * r * r;
  return -std::pow(lam, 2.5) * r / (s * std::sqrt(s));
}

/// dU/dlambda = (1/2) lambda^{-1/2} (1 - lambda^2 r^2) / (1 + lambda^2 r^2)^{3/2}.
inline double dlambda_radial(double lam, double r) {
  const double t2 = lam * lam * r * r;
  const double s = 1.0 + t2;
  return 0.5 * (1.0 - t2) / (std::sqrt(lam) * s * std::sqrt(s));
}

/// d/dr of dU/dlambda = (1/2) lambda^{3/2} r (lambda^2 r^2 - 5) / (1 + lambda^2 r^2)^{5/2}.
inline double dlambda_dr(double lam, double r) {
  const double t2 = lam * lam * r * r;
  const double s = 1.0 + t2;
  return 0.5 * std::pow(lam, 1.5) * r * (t2 - 5.0) / (s * s * std::sqrt(s));
}

inline double u_val(const Bubble& b, const Point& y) { return u_radial(b.lambda, norm(y - b.x)); }

inline double du_dlambda(const Bubble& b, const Point& y) { return dlambda_radial(b.lambda, norm(y - b.x)); }

/// Derivative with respect to the centre coordinate x_i.
inline double du_dx(const Bubble& b, const Point& y, int i) {
  const double lam = b.lambda;
  const Point d = y - b.x;
  const double s = 1.0 + lam * lam * dot(d, d);
  return std::pow(lam, 2.5) * d[static_cast<std::size_t>(i)] / (s * std::sqrt(s));
}

/// g_{x,lambda}(y) = lambda^{-1/2}/|x-y| - U_{x,lambda}(y) = lambda^{1/2} g_{0,1}(lambda |x-y|).
inline double g_fun(const Bubble& b, const Point& y) {
  const double r = norm(y - b.x);
  if (r == 0.0) throw DomainError("g_fun: y coincides with the centre");
  const double t = b.lambda * r;
  // 1/t - 1/sqrt(1+t^2) = 1 / (t sqrt(1+t^2) (sqrt(1+t^2) + t)), cancellation-free.
  const double s = std::sqrt(1.0 + t * t);
  return std::sqrt(b.lambda) / (t * s * (s + t));
}

/// Radial quadrature of f on [0, R] (R may be infinite) for integrands
/// concentrated on the scale 1/lambda: panels break at powers of ~3 times 1/lambda.
template <class F>
numkit::QuadratureResult integrate_concentrated(F&& f, double lam, double R, double rel_tol = 1e-12) {
  std::vector<double> bp;
  for (double m = 0.3; m / lam < R && m < 1e9; m *= 3.0) bp.push_back(m / lam);
  numkit::QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-300;
  return numkit::integrate(std::forward<F>(f), 0.0, R, opt, bp);
}

}  // namespace critball::bubble

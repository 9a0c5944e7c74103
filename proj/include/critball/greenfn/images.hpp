#pragma once

#include <cmath>
#include <string>

#include "critball/core.hpp"

namespace critball::greenfn {

namespace detail {
inline void require_closed_ball(const Point& p, double R, const char* what) {
  if (norm(p) > R * (1.0 + 1e-14)) throw DomainError(std::string(what) + ": point outside the ball");
}
}  // namespace detail

/// Dirichlet Green's function of -Laplace on the ball (normalised to 4 pi delta),
/// by the Kelvin image charge.
inline double g0_ball(const Point& x, const Point& y, double R) {
  detail::require_closed_ball(x, R, "g0_ball");
  detail::require_closed_ball(y, R, "g0_ball");
  const double d = norm(x - y);
  if (d == 0.0) throw DomainError("g0_ball: coincident points");
  const double rx = norm(x);
  if (rx == 0.0) return 1.0 / d - 1.0 / R;
  // |x| |y - x*| / R with x* = R^2 x/|x|^2, written without forming x*.
  const double image = norm((rx / R) * y - (R / rx) * x);
  return 1.0 / d - 1.0 / image;
}

/// Regular part H_0(x, y) = 1/|x-y| - G_0(x, y); smooth up to the diagonal.
inline double h0_ball(const Point& x, const Point& y, double R) {
  detail::require_closed_ball(x, R, "h0_ball");
  detail::require_closed_ball(y, R, "h0_ball");
  const double rx = norm(x);
  if (rx == 0.0) return 1.0 / R;
  return 1.0 / norm((rx / R) * y - (R / rx) * x);
}

/// phi_0(x) = H_0(x, x) = R / (R^2 - |x|^2).
inline double phi0_ball(const Point& x, double R) {
  const double r2 = dot(x, x);
  if (!(r2 < R * R)) throw DomainError("phi0_ball: point on or outside the boundary");
  return R / (R * R - r2);
}

inline double phi0_ball(double rho, double R) { return phi0_ball(Point{rho, 0.0, 0.0}, R); }

}  // namespace critball::greenfn

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "critball/core.hpp"
#include "critball/greenfn/center.hpp"
#include "critball/greenfn/domain.hpp"

namespace critball::solver {

using greenfn::BallDomain;
using greenfn::RadialCoefficient;

/// -Laplace u + (a + eps V) u = 3 u^5 on the ball, u > 0, u = 0 on the boundary.
struct ProblemConfig {
  BallDomain domain{1.0};
  RadialCoefficient a = RadialCoefficient::constant(-pi * pi / 4.0);
  RadialCoefficient V = RadialCoefficient::constant(-1.0);
  double eps = 0.0;
  double shoot_tol = 1e-10;  // |u(R)| at an accepted solution
  double ode_rtol = 1e-12;
  double ode_atol = 1e-14;   // on the scaled profile u/M, which is O(1)
  double lattice = 1.3;      // multiplicative bracket lattice in M
  double min_height = 1e-6;  // bracket scan range for M; above ~1e5 the inner
  double max_height = 1e5;   // span M^2 R outgrows double-precision stepping
  std::size_t grid_points = 200;  // output grid, in addition to integrator nodes
  double series_start = 1e-6;     // Taylor start in the inner variable, times min(M^2, 1)

  double radius() const { return domain.radius(); }
  /// Total coefficient m = a + eps V.
  double m(double r) const { return a(r) + eps * V(r); }
  double dm(double r) const { return a.derivative(r) + eps * V.derivative(r); }
  bool constant_coefficients() const { return a.is_constant() && V.is_constant(); }

  /// m as a RadialCoefficient: exact for constants, otherwise sampled on a
  /// 257-point grid (interpolation error is far below the solver tolerances
  /// for smooth tables).
  RadialCoefficient total_coefficient() const {
    if (constant_coefficients()) return RadialCoefficient::constant(m(0.0));
    const double R = radius();
    std::vector<double> r, v;
    for (int i = 0; i <= 256; ++i) {
      r.push_back(R * i / 256.0);
      v.push_back(m(r.back()));
    }
    return RadialCoefficient::table(std::move(r), std::move(v));
  }

  void validate() const {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ValidationError("eps", "must be finite and non-negative");
    if (!(shoot_tol > 0.0)) throw ValidationError("shoot_tol", "must be positive");
    if (!(ode_rtol > 0.0 && ode_rtol < 1e-3)) throw ValidationError("ode_rtol", "must lie in (0, 1e-3)");
    if (!(ode_atol > 0.0)) throw ValidationError("ode_atol", "must be positive");
    if (!(lattice > 1.0 && lattice < 4.0)) throw ValidationError("lattice", "must lie in (1, 4)");
    if (!(series_start > 0.0 && series_start <= 1e-2)) throw ValidationError("series_start", "must lie in (0, 1e-2]");
    if (!(min_height > 0.0)) throw ValidationError("min_height", "must be positive");
    if (!(max_height > min_height * lattice)) throw ValidationError("max_height", "must exceed min_height");
    a.check_covers(radius());
    V.check_covers(radius());
    a.check_coercive(domain, "a");
    total_coefficient().check_coercive(domain, "a+eps*V");
  }
};

/// Whether a configuration lies in the existence regime: the unperturbed
/// coefficient is at or above criticality (phi_a(0) >= 0) and the
/// perturbation pushes it below (phi_{a+eps V}(0) < 0).
struct RegimeCheck {
  double phi_a = 0.0;
  double phi_total = 0.0;
  bool eps_positive = false;
  bool a_at_or_above_critical = false;
  bool perturbation_below_critical = false;
  bool ok() const { return eps_positive && a_at_or_above_critical && perturbation_below_critical; }
};

inline RegimeCheck check_regime(const ProblemConfig& cfg, double tol = 1e-8) {
  RegimeCheck c;
  c.eps_positive = cfg.eps > 0.0;
  c.phi_a = greenfn::ga_center(cfg.a, cfg.radius()).phi_a0();
  c.phi_total = greenfn::ga_center(cfg.total_coefficient(), cfg.radius()).phi_a0();
  c.a_at_or_above_critical = c.phi_a >= -tol;
  c.perturbation_below_critical = c.phi_total < 0.0;
  return c;
}

/// Series start for u'' + (2/r) u' = m u - 3 u^5 with u(0) = M, u'(0) = 0.
struct TaylorStart {
  double u = 0.0;
  double du = 0.0;
};

inline TaylorStart taylor_start(double M, double m, double delta) {
  const double c = m * M - 3.0 * std::pow(M, 5);
  return {M + delta * delta / 6.0 * c, delta / 3.0 * c};
}

}  // namespace critball::solver

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "critball/core.hpp"
#include "critball/greenfn/domain.hpp"
#include "critball/numkit/ode.hpp"
#include "critball/numkit/quadrature.hpp"
#include "critball/numkit/roots.hpp"

namespace critball::greenfn {

/// Green's function of -Laplace + a(|x|) with pole at the centre:
/// G_a(0, y) = v(|y|)/|y| with v'' = a v, v(0) = 1, v(R) = 0.
///
/// v = v_p + c v_h where (v_p, v_p')(0) = (1, 0), (v_h, v_h')(0) = (0, 1).
/// Then H_a(0, y) = (1 - v)/|y| and phi_a(0) = -c.
class CenterGreens {
 public:
  CenterGreens(numkit::OdeTrajectory<4> traj, double R, double c)
      : traj_(std::move(traj)), R_(R), c_(c) {}

  double radius() const noexcept { return R_; }
  double phi_a0() const noexcept { return -c_; }
  double shooting_coefficient() const noexcept { return c_; }
  const numkit::OdeTrajectory<4>& trajectory() const noexcept { return traj_; }

  double v(double r) const {
    const auto s = at(r);
    return s[0] + c_ * s[2];
  }
  double dv(double r) const {
    const auto s = at(r);
    return s[1] + c_ * s[3];
  }
  double vh(double r) const { return at(r)[2]; }

  /// G_a(0, y) at |y| = r > 0.
  double g(double r) const {
    if (!(r > 0.0)) throw DomainError("CenterGreens::g: r must be positive");
    return v(r) / r;
  }

  /// H_a(0, y) at |y| = r, continuous at r = 0 with value phi_a(0).
  double h(double r) const {
    if (r == 0.0) return phi_a0();
    return (1.0 - v(r)) / r;
  }

  /// d/dr H_a(0, y); loses digits as r -> 0, where it tends to -a(0)/2.
  double dh(double r) const {
    if (!(r > 0.0)) throw DomainError("CenterGreens::dh: r must be positive");
    const auto s = at(r);
    const double v = s[0] + c_ * s[2], dv = s[1] + c_ * s[3];
    return -(dv * r + 1.0 - v) / (r * r);
  }

  /// (H_a - H_0)(0, y); H_0(0, .) = 1/R.
  double h_minus_h0(double r) const { return h(r) - 1.0 / R_; }

  /// Spherical mean of G_a(x, y)/(4 pi) over |x| = r, |y| = s: the kernel of
  /// (-Laplace + a)^{-1} on radial functions, u(r) = int_0^R K(r, s) f(s) s^2 ds.
  double kernel(double r, double s) const {
    const double lo = std::min(r, s), hi = std::max(r, s);
    if (!(hi > 0.0)) throw DomainError("CenterGreens::kernel: both radii zero");
    const double ratio = lo > 0.0 ? vh(lo) / lo : 1.0;
    return ratio * v(hi) / hi;
  }

 private:
  numkit::State<4> at(double r) const {
    if (r < 0.0 || r > R_ * (1.0 + 1e-14)) throw DomainError("CenterGreens: radius outside [0, R]");
    return traj_(std::min(r, traj_.t_end()));
  }

  numkit::OdeTrajectory<4> traj_;
  double R_;
  double c_;
};

inline numkit::OdeOptions default_green_ode_options() {
  numkit::OdeOptions opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-15;
  return opt;
}

/// Solves for the centre Green's function of -Laplace + a on the ball of radius R.
/// Throws ResonanceError if v_h(R) vanishes (Dirichlet eigenvalue collision).
inline CenterGreens ga_center(const RadialCoefficient& a, double R,
                              const numkit::OdeOptions& opt = default_green_ode_options()) {
  const BallDomain dom(R);
  a.check_coercive(dom);
  numkit::OdeOptions o = opt;
  o.max_step = std::min(o.max_step, R / 8.0);
  auto rhs = [&a](double r, const numkit::State<4>& s) {
    const double ar = a(r);
    return numkit::State<4>{s[1], ar * s[0], s[3], ar * s[2]};
  };
  auto res = numkit::ode_solve<4>(rhs, 0.0, {1.0, 0.0, 0.0, 1.0}, R, o);
  const auto& end = res.trajectory.back();
  if (std::abs(end[2]) < 1e-12 * R)
    throw ResonanceError("ga_center: v_h(R) = 0, the coefficient hits a Dirichlet eigenvalue");
  const double c = -end[0] / end[2];
  return CenterGreens(std::move(res.trajectory), R, c);
}

/// Constant a* with phi_a(0) = 0 (the critical coefficient), by Brent's method
/// on a -> phi_a(0) over (-pi^2/R^2, 0).
inline numkit::RootResult critical_a_root(double R) {
  const BallDomain dom(R);
  const double lam1 = dom.first_dirichlet_eigenvalue();
  auto phi = [R](double a) { return ga_center(RadialCoefficient::constant(a), R).phi_a0(); };
  double lo = -lam1 * (1.0 - 1e-3);
  if (!(phi(lo) < 0.0)) throw NoSignChangeError("critical_a: phi_a(0) not negative near -pi^2/R^2");
  return numkit::brent_root(phi, lo, 0.0, 1e-15, 1e-15 * lam1);
}

inline double critical_a(double R) { return critical_a_root(R).root; }

/// Q_V(0) = int V G_a(0, y)^2 dy = 4 pi int_0^R V(r) v(r)^2 dr.
inline double qv_center(const RadialCoefficient& V, const CenterGreens& G, double rel_tol = 1e-12) {
  V.check_covers(G.radius());
  numkit::QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-15;
  std::vector<double> bp;
  for (double r : V.abscissae())
    if (r > 0.0 && r < G.radius()) bp.push_back(r);
  const auto res = numkit::integrate(
      [&](double r) {
        const double v = G.v(r);
        return V(r) * v * v;
      },
      0.0, G.radius(), opt, bp);
  if (!res.converged) throw ConvergenceError("qv_center: quadrature did not converge");
  return 4.0 * pi * res.value;
}

inline double qv_center(const RadialCoefficient& V, const RadialCoefficient& a, double R) {
  return qv_center(V, ga_center(a, R));
}

/// H_a(0, y) at |y| = r.
inline double ha_center(double r, const RadialCoefficient& a, double R) {
  if (!(r > 0.0 && r < R)) throw DomainError("ha_center: need 0 < r < R");
  return ga_center(a, R).h(r);
}

}  // namespace critball::greenfn

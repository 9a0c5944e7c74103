#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "critball/core.hpp"
#include "critball/greenfn/domain.hpp"
#include "critball/numkit/special.hpp"

namespace critball::greenfn {

/// Regular part of the Green's function of -Laplace - k^2 on the ball, as a
/// spherical-harmonic series in scaled Bessel functions:
///
///   F(x, y) = -(1/R) sum_l (yhat_l/jhat_l)(kR) jhat_l(k|x|) jhat_l(k|y|) (|x||y|/R^2)^l P_l(cos theta),
///   G_a = cos(k|x-y|)/|x-y| - F,   H_a = (1 - cos(k|x-y|))/|x-y| + F,   phi_a(x) = F(x, x).
///
/// Only a = -k^2 <= 0 in the coercive range is supported; there every
/// jhat_l(kR) is positive.
class HelmholtzSeries {
 public:
  HelmholtzSeries(double a_const, double R, double tol = 1e-15, int lmax_cap = 1000)
      : R_(R), tol_(tol), lmax_cap_(lmax_cap) {
    const BallDomain dom(R);
    if (a_const > 0.0) throw DomainError("HelmholtzSeries: requires a <= 0");
    if (!(a_const > -dom.first_dirichlet_eigenvalue()))
      throw ValidationError("a", "coefficient violates coercivity bound a > -pi^2/R^2");
    k_ = std::sqrt(-a_const);
    tabulate();
  }

  double k() const noexcept { return k_; }
  double radius() const noexcept { return R_; }
  double tolerance() const noexcept { return tol_; }
  int stored_lmax() const noexcept { return static_cast<int>(ratios_.size()) - 1; }

  /// (yhat_l / jhat_l)(kR); proportional to y_l(kR)/j_l(kR).
  double ratio(int l) const { return ratios_.at(static_cast<std::size_t>(l)); }

  /// Smallest L with (rho1 rho2 / R^2)^L <= tol; throws if above the cap.
  int lmax_for(double rho1, double rho2) const {
    const double t = rho1 * rho2 / (R_ * R_);
    if (!(t < 1.0)) throw DomainError("HelmholtzSeries: points must be interior");
    if (t == 0.0) return 0;
    const int L = static_cast<int>(std::ceil(std::log(tol_) / std::log(t))) + 1;
    if (L > lmax_cap_)
      throw DomainError("HelmholtzSeries: truncation order " + std::to_string(L) + " exceeds cap");
    return std::max(L, 1);
  }

  /// Smooth series part F(x, y).
  double series(const Point& x, const Point& y) const {
    const double r1 = norm(x), r2 = norm(y);
    const int L = lmax_for(r1, r2);
    const double c = (r1 > 0.0 && r2 > 0.0) ? std::clamp(dot(x, y) / (r1 * r2), -1.0, 1.0) : 1.0;
    return series_radial(r1, r2, c, L);
  }

  double regular(const Point& x, const Point& y) const {
    const double d = norm(x - y);
    return free_regular(d) + series(x, y);
  }

  double green(const Point& x, const Point& y) const {
    const double d = norm(x - y);
    if (d == 0.0) throw DomainError("HelmholtzSeries::green: coincident points");
    return std::cos(k_ * d) / d - series(x, y);
  }

  /// phi_a(rho) = H_a(x, x) at |x| = rho.
  double phi(double rho) const { return series_radial(rho, rho, 1.0, lmax_for(rho, rho)); }

  /// d phi_a / d rho.
  double dphi(double rho) const {
    if (rho == 0.0) return 0.0;
    const int L = lmax_for(rho, rho);
    const auto jh = numkit::scaled_bessel_j(L + 1, k_ * rho);
    const double t = rho * rho / (R_ * R_);
    double sum = 0.0, pw = 1.0;  // pw = t^l
    for (int l = 0; l <= L; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      const double jl = jh[ul];
      const double djl = -k_ * k_ * rho * jh[ul + 1] / (2.0 * l + 3.0);  // d/drho jhat_l(k rho)
      sum += ratio(l) * (2.0 * jl * djl * pw + (l > 0 ? 2.0 * l * jl * jl * pw / rho : 0.0));
      pw *= t;
    }
    return -sum / R_;
  }

  /// Gradient of phi_a at x (radial direction times dphi).
  Point grad_phi(const Point& x) const {
    const double r = norm(x);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    return (dphi(r) / r) * x;
  }

  /// phi_a''(0) from the l = 0 and l = 1 coefficients.
  double phi_second_derivative_at_center() const {
    return -2.0 / R_ * (ratio(0) * (-k_ * k_ / 3.0) + ratio(1) / (R_ * R_));
  }

 private:
  // (1 - cos(k d))/d, written to avoid cancellation; vanishes at d = 0.
  double free_regular(double d) const {
    if (d == 0.0) return 0.0;
    const double s = std::sin(0.5 * k_ * d);
    return 2.0 * s * s / d;
  }

  double series_radial(double r1, double r2, double c, int L) const {
    const auto j1 = numkit::scaled_bessel_j(L, k_ * r1);
    const auto j2 = (r2 == r1) ? j1 : numkit::scaled_bessel_j(L, k_ * r2);
    const auto P = numkit::legendre_p(L, c);
    const double t = r1 * r2 / (R_ * R_);
    double sum = 0.0, pw = 1.0;
    for (int l = 0; l <= L; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      sum += ratio(l) * j1[ul] * j2[ul] * pw * P[ul];
      pw *= t;
      if (pw == 0.0) break;
    }
    return -sum / R_;
  }

  void tabulate() {
    const int L = lmax_cap_ + 1;
    const double x = k_ * R_;
    const auto jh = numkit::scaled_bessel_j(L, x);
    const auto yh = numkit::scaled_bessel_y(L, x);
    ratios_.resize(static_cast<std::size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      if (!(std::abs(jh[ul]) > 1e-12))
        throw ResonanceError("HelmholtzSeries: j_" + std::to_string(l) + "(kR) vanishes");
      ratios_[ul] = yh[ul] / jh[ul];
    }
  }

  double R_;
  double tol_;
  int lmax_cap_;
  double k_ = 0.0;
  std::vector<double> ratios_;
};

}  // namespace critball::greenfn

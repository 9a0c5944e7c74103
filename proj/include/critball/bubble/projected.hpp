#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "critball/bubble/bubble.hpp"
#include "critball/core.hpp"
#include "critball/greenfn/center.hpp"
#include "critball/numkit/quadrature.hpp"

namespace critball::bubble {

/// PU_{x,lambda} = U_{x,lambda} - phi_{x,lambda}, where phi_{x,lambda} is the
/// harmonic extension of U|_{boundary}. For a centred bubble phi_{x,lambda} is
/// the constant U(R) = lambda^{1/2}(1 + lambda^2 R^2)^{-1/2}; otherwise it is
/// evaluated from the Poisson integral over the sphere.
class ProjectedBubble {
 public:
  ProjectedBubble(Bubble b, double R) : b_(b), R_(R) {
    if (!(R > 0.0)) throw DomainError("ProjectedBubble: radius must be positive");
    if (!(norm(b.x) < R)) throw DomainError("ProjectedBubble: centre must be interior");
    centred_ = norm(b.x) == 0.0;
    c_ = u_radial(b.lambda, R);
  }

  const Bubble& bubble() const noexcept { return b_; }
  double lambda() const noexcept { return b_.lambda; }
  double radius() const noexcept { return R_; }
  bool centred() const noexcept { return centred_; }

  /// phi_{x,lambda}(z).
  double correction(const Point& z) const {
    if (centred_) return c_;
    return poisson(z);
  }
  double value(const Point& z) const { return u_val(b_, z) - correction(z); }

  // Centred-bubble radial profiles.
  double correction() const {
    require_centred();
    return c_;
  }
  double value(double r) const {
    require_centred();
    return u_radial(b_.lambda, r) - c_;
  }
  double grad(double r) const { return du_dr(b_.lambda, r); }
  /// d PU / d lambda; the constant correction contributes -dU/dlambda(R).
  double d_lambda(double r) const {
    require_centred();
    return dlambda_radial(b_.lambda, r) - dlambda_radial(b_.lambda, R_);
  }
  double grad_d_lambda(double r) const { return dlambda_dr(b_.lambda, r); }

 private:
  void require_centred() const {
    if (!centred_) throw DomainError("ProjectedBubble: radial profile needs a centred bubble");
  }

  // (R^2 - |z|^2)/(4 pi R) * int_{|xi|=R} U(xi) / |z - xi|^3 dsigma, in
  // spherical coordinates whose pole points along z (where the kernel peaks).
  double poisson(const Point& z) const {
    const double rz = norm(z);
    if (!(rz < R_)) throw DomainError("ProjectedBubble: evaluation point must be interior");
    Point e3{0, 0, 1};
    if (rz > 0.0) e3 = (1.0 / rz) * z;
    Point helper = std::abs(e3[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
    Point e1 = helper - dot(helper, e3) * e3;
    e1 = (1.0 / norm(e1)) * e1;
    const Point e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
                   e3[0] * e1[1] - e3[1] * e1[0]};
    numkit::QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-300;
    auto inner = [&](double theta) {
      const double st = std::sin(theta), ct = std::cos(theta);
      auto f = [&](double psi) {
        const double cp = std::cos(psi), sp = std::sin(psi);
        Point xi;
        for (std::size_t i = 0; i < 3; ++i) xi[i] = R_ * (st * cp * e1[i] + st * sp * e2[i] + ct * e3[i]);
        const double d = norm(z - xi);
        return u_val(b_, xi) / (d * d * d);
      };
      return numkit::integrate(f, 0.0, 2.0 * pi, opt, {0.5 * pi, pi, 1.5 * pi}).value * st;
    };
    const double sep = 1.0 - rz / R_;
    std::vector<double> bp;
    for (double s = sep; s < pi; s *= 4.0) bp.push_back(s);
    const double surf = numkit::integrate(inner, 0.0, pi, opt, bp).value * R_ * R_;
    return (R_ * R_ - rz * rz) / (4.0 * pi * R_) * surf;
  }

  Bubble b_;
  double R_;
  bool centred_ = true;
  double c_ = 0.0;
};

inline ProjectedBubble pu_center(double lambda, double R) { return ProjectedBubble(Bubble({0, 0, 0}, lambda), R); }

/// psi = PU - lambda^{-1/2} (H_a - H_0)(0, .), the refined approximate solution.
class PsiCenter {
 public:
  PsiCenter(ProjectedBubble pu, greenfn::CenterGreens G) : pu_(std::move(pu)), G_(std::move(G)) {
    if (!pu_.centred()) throw DomainError("PsiCenter: needs a centred bubble");
  }
  double operator()(double r) const { return pu_.value(r) + shift(r); }
  /// psi - PU.
  double shift(double r) const { return -G_.h_minus_h0(r) / std::sqrt(pu_.lambda()); }
  double grad_shift(double r) const { return -G_.dh(r) / std::sqrt(pu_.lambda()); }
  const ProjectedBubble& projected() const noexcept { return pu_; }
  const greenfn::CenterGreens& greens() const noexcept { return G_; }

 private:
  ProjectedBubble pu_;
  greenfn::CenterGreens G_;
};

inline PsiCenter psi_center(double lambda, const greenfn::CenterGreens& G) {
  return PsiCenter(pu_center(lambda, G.radius()), G);
}

inline PsiCenter psi_center(double lambda, const greenfn::RadialCoefficient& a, double R) {
  return psi_center(lambda, greenfn::ga_center(a, R));
}

}  // namespace critball::bubble

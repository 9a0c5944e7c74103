#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "critball/bubble/bubble.hpp"
#include "critball/core.hpp"
#include "critball/numkit/roots.hpp"
#include "critball/solver/solution.hpp"

namespace critball::asympt {

/// A radial field on [0, R] given by value and radial derivative, with the
/// grid used for sup norms and a concentration scale for quadrature.
struct RadialField {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double R = 1.0;
  double scale = 1.0;  // concentration scale lambda
  std::vector<double> grid;
};

inline RadialField field_of(const solver::RadialSolution& sol) {
  RadialField f;
  f.value = [&sol](double r) { return sol.u(r); };
  f.slope = [&sol](double r) { return sol.du(r); };
  f.R = sol.radius();
  f.scale = sol.lambda_hat();
  f.grid = sol.nodes();
  return f;
}

/// 4 pi int_0^R f g r^2 dr for integrands concentrated on the scale 1/lambda.
template <class F>
double ball_radial(F&& f, double lam, double R) {
  return 4.0 * pi * bubble::integrate_concentrated([&](double r) { return f(r) * r * r; }, lam, R, 1e-12).value;
}

struct BubbleFit {
  double alpha = 0.0;
  double lambda = 0.0;
  double residual = 0.0;   // |grad(u - alpha PU)| / |grad u|
  double curvature = 0.0;  // lambda^2 J''(lambda) / |grad u|^2 of the reduced objective
  bool flat = false;       // curvature below tolerance: lambda poorly determined
  std::string warning;
};

/// Minimises |grad(u - alpha PU_{0,lambda})|^2. For fixed lambda the optimal
/// alpha is <grad u, grad PU>/|grad PU|^2; lambda solves the stationarity
/// condition <grad u, grad d_lambda PU>|grad PU|^2 = <grad u, grad PU><grad PU, grad d_lambda PU>.
inline BubbleFit fit_bubble(const RadialField& u, double flat_tol = 1e-8) {
  const double R = u.R;
  struct Products {
    double A, B, G11, G12;
  };
  auto products = [&](double lam) {
    Products p{};
    p.A = ball_radial([&](double r) { return u.slope(r) * bubble::du_dr(lam, r); }, lam, R);
    p.B = ball_radial([&](double r) { return u.slope(r) * bubble::dlambda_dr(lam, r); }, lam, R);
    p.G11 = ball_radial([&](double r) { return std::pow(bubble::du_dr(lam, r), 2); }, lam, R);
    p.G12 = ball_radial([&](double r) { return bubble::du_dr(lam, r) * bubble::dlambda_dr(lam, r); }, lam, R);
    return p;
  };
  auto F = [&](double lam) {
    const auto p = products(lam);
    return (p.B * p.G11 - p.A * p.G12) * lam;
  };
  double lo = 0.9 * u.scale, hi = 1.1 * u.scale;
  for (int i = 0; i < 60 && (F(lo) > 0) == (F(hi) > 0); ++i) {
    lo /= 1.3;
    hi *= 1.3;
  }
  const auto root = numkit::brent_root(F, lo, hi, 0.0, 1e-13 * u.scale, 200);
  BubbleFit fit;
  fit.lambda = root.root;
  const auto p = products(fit.lambda);
  fit.alpha = p.A / p.G11;
  const double uu = ball_radial([&](double r) { return u.slope(r) * u.slope(r); }, fit.lambda, R);
  fit.residual = std::sqrt(std::max(0.0, uu - p.A * p.A / p.G11) / uu);
  auto J = [&](double lam) {
    const auto q = products(lam);
    return uu - q.A * q.A / q.G11;
  };
  const double h = 1e-3 * fit.lambda;
  fit.curvature = (J(fit.lambda + h) - 2.0 * J(fit.lambda) + J(fit.lambda - h)) / (h * h) * fit.lambda * fit.lambda / uu;
  fit.flat = !(fit.curvature > flat_tol);
  if (fit.flat) fit.warning = "fit_bubble: objective is flat near the minimum; lambda is poorly determined";
  return fit;
}

inline BubbleFit fit_bubble(const solver::RadialSolution& sol) { return fit_bubble(field_of(sol)); }

}  // namespace critball::asympt

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "critball/asympt/fit.hpp"
#include "critball/bubble/bubble.hpp"
#include "critball/bubble/projected.hpp"
#include "critball/core.hpp"
#include "critball/greenfn/center.hpp"
#include "critball/numkit/fit.hpp"

namespace critball::asympt {

/// u = alpha (PU + w), q = w + lambda^{-1/2}(H_a - H_0)(0, .), q = s + r with
/// s = lambda^{-1} beta PU + gamma d_lambda PU in span{PU, d_lambda PU} and r
/// orthogonal to it in the Dirichlet inner product. The centre is pinned at
/// 0 by symmetry, so the x-derivative modes and their coefficients vanish.
struct Decomposition {
  double alpha = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  std::vector<double> grid, w, q, s, r;  // sampled fields

  double grad_w = 0.0;  // |grad w|
  double grad_r = 0.0;  // |grad r|
  double grad_s = 0.0;
  double sup_w = 0.0;   // max |w| on the grid

  double gram_condition = 0.0;
  double orth_pu = 0.0;      // |<grad r, grad PU>| / (|grad r||grad PU|)
  double orth_dlpu = 0.0;    // same for d_lambda PU
  double orth_sr = 0.0;      // |<grad s, grad r>| / (|grad s||grad r|)
  double reconstruction = 0.0;  // max |alpha (PU + w) - u| / u(0) on the grid
};

inline Decomposition decompose(const RadialField& u, double alpha, double lambda, const greenfn::CenterGreens& G,
                               double max_condition = 1e8) {
  const double R = u.R, lam = lambda, il = 1.0 / std::sqrt(lam);
  const auto pu = bubble::pu_center(lam, R);
  auto pu_s = [&](double r) { return bubble::du_dr(lam, r); };
  auto dl_s = [&](double r) { return bubble::dlambda_dr(lam, r); };
  auto w_s = [&](double r) { return u.slope(r) / alpha - pu_s(r); };
  auto q_s = [&](double r) { return w_s(r) + (r > 0.0 ? il * G.dh(r) : 0.0); };
  auto ip = [&](auto&& f, auto&& g) { return ball_radial([&](double r) { return f(r) * g(r); }, lam, R); };

  Decomposition d;
  d.alpha = alpha;
  d.lambda = lam;
  Eigen::Matrix2d gram;
  gram(0, 0) = ip(pu_s, pu_s);
  gram(0, 1) = gram(1, 0) = ip(pu_s, dl_s);
  gram(1, 1) = ip(dl_s, dl_s);
  const Eigen::Vector2d rhs(ip(q_s, pu_s), ip(q_s, dl_s));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
  d.gram_condition = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  if (!(d.gram_condition <= max_condition))
    throw ConvergenceError("decompose: Gram matrix is ill-conditioned (cond = " + std::to_string(d.gram_condition) + ")");
  const Eigen::Vector2d c = gram.ldlt().solve(rhs);
  d.beta = c(0) * lam;
  d.gamma = c(1);

  auto s_s = [&](double r) { return c(0) * pu_s(r) + c(1) * dl_s(r); };
  auto r_s = [&](double r) { return q_s(r) - s_s(r); };
  d.grad_w = std::sqrt(ip(w_s, w_s));
  d.grad_r = std::sqrt(ip(r_s, r_s));
  d.grad_s = std::sqrt(ip(s_s, s_s));
  const double npu = std::sqrt(gram(0, 0)), ndl = std::sqrt(gram(1, 1));
  d.orth_pu = std::abs(ip(r_s, pu_s)) / (d.grad_r * npu);
  d.orth_dlpu = std::abs(ip(r_s, dl_s)) / (d.grad_r * ndl);
  d.orth_sr = d.grad_s > 0.0 ? std::abs(ip(s_s, r_s)) / (d.grad_s * d.grad_r) : 0.0;

  const double u0 = u.value(0.0);
  for (double r : u.grid) {
    const double ur = u.value(r), p = pu.value(r);
    const double w = ur / alpha - p;
    const double q = w + il * G.h_minus_h0(r);
    const double s = c(0) * p + c(1) * pu.d_lambda(r);
    d.grid.push_back(r);
    d.w.push_back(w);
    d.q.push_back(q);
    d.s.push_back(s);
    d.r.push_back(q - s);
    d.sup_w = std::max(d.sup_w, std::abs(w));
    d.reconstruction = std::max(d.reconstruction, std::abs(alpha * (p + w) - ur) / u0);
  }
  return d;
}

struct ZeroModeLimits {
  double beta_limit = 0.0, gamma_limit = 0.0;
  double beta_target = 0.0, gamma_target = 0.0;
  double beta_error = 0.0, gamma_error = 0.0;  // relative (absolute when the target is 0)
  numkit::RichardsonFit beta_fit, gamma_fit;
};

/// Extrapolates beta and gamma linearly in 1/lambda. Targets:
/// beta -> (16/(3 pi))(phi_a(0) - phi_0(0)), gamma -> -(8/5) beta.
inline ZeroModeLimits beta_gamma_limits(const std::vector<Decomposition>& ds, double phi_a0, double phi_00) {
  if (ds.size() < 3) throw InsufficientDataError("beta_gamma_limits: need at least 3 rungs");
  std::vector<double> x, b, g;
  for (const auto& d : ds) {
    x.push_back(1.0 / d.lambda);
    b.push_back(d.beta);
    g.push_back(d.gamma);
  }
  ZeroModeLimits z;
  z.beta_fit = numkit::richardson_fit(x, b);
  z.gamma_fit = numkit::richardson_fit(x, g);
  z.beta_limit = z.beta_fit.limit;
  z.gamma_limit = z.gamma_fit.limit;
  z.beta_target = 16.0 / (3.0 * pi) * (phi_a0 - phi_00);
  z.gamma_target = -1.6 * z.beta_target;
  auto err = [](double v, double t) { return t != 0.0 ? std::abs(v - t) / std::abs(t) : std::abs(v); };
  z.beta_error = err(z.beta_limit, z.beta_target);
  z.gamma_error = err(z.gamma_limit, z.gamma_target);
  return z;
}

}  // namespace critball::asympt

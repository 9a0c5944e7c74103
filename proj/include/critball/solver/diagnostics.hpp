#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "critball/core.hpp"
#include "critball/greenfn/center.hpp"
#include "critball/numkit/quadrature.hpp"
#include "critball/solver/solution.hpp"

namespace critball::solver {

/// Integrals entering the energy and Pohozaev identities.
struct EnergyIntegrals {
  double grad = 0.0;      // int |grad u|^2
  double mass_m = 0.0;    // int m u^2
  double sixth = 0.0;     // int u^6
  double r_dm = 0.0;      // int r m'(r) u^2
  double boundary = 0.0;  // int_{boundary} (x.n) (d_n u)^2
};

inline EnergyIntegrals energy_integrals(const RadialSolution& sol) {
  const auto& cfg = sol.config();
  const double R = sol.radius();
  EnergyIntegrals e;
  e.grad = sol.ball_integral([](double, double, double du) { return du * du; });
  e.mass_m = sol.ball_integral([&](double r, double u, double) { return cfg.m(r) * u * u; });
  e.sixth = sol.ball_integral([](double, double u, double) { return std::pow(u, 6); });
  if (!cfg.constant_coefficients())
    e.r_dm = sol.ball_integral([&](double r, double u, double) { return r * cfg.dm(r) * u * u; });
  const double duR = sol.du(R);
  e.boundary = 4.0 * pi * R * R * R * duR * duR;
  return e;
}

/// |int |grad u|^2 + int (a + eps V) u^2 - 3 int u^6| / int |grad u|^2.
inline double energy_identity_residual(const EnergyIntegrals& e) {
  return std::abs(e.grad + e.mass_m - 3.0 * e.sixth) / e.grad;
}

/// Dilation identity for radial m:
///   (1/2) int |grad u|^2 + (3/2) int m u^2 + (1/2) int r m' u^2 - (3/2) int u^6
///   + (1/2) int_{boundary} (x.n)(d_n u)^2 = 0,
/// normalised by int |grad u|^2.
inline double pohozaev_residual(const EnergyIntegrals& e) {
  return std::abs(0.5 * e.grad + 1.5 * e.mass_m + 0.5 * e.r_dm - 1.5 * e.sixth + 0.5 * e.boundary) / e.grad;
}

inline double sobolev_quotient(const EnergyIntegrals& e) { return (e.grad + e.mass_m) / std::cbrt(e.sixth); }
inline double sobolev_quotient_pure(const EnergyIntegrals& e) { return e.grad / std::cbrt(e.sixth); }

/// Sup over the integrator steps of the relative ODE residual of the scaled
/// profile, |v'' + 2v'/t - (m/M^4) v + 3 v^5| / (|v''| + |2v'/t| + |m v/M^4| + 3|v|^5),
/// with v'' from a 4th-order difference of the dense interpolant at each step midpoint.
inline double ode_residual(const RadialSolution& sol) {
  const auto& nodes = sol.scaled_trajectory().nodes();
  const double M2 = sol.M() * sol.M(), M4 = M2 * M2;
  const auto& cfg = sol.config();
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double t = 0.5 * (nodes[k] + nodes[k + 1]);
    const double h = 1e-3 * (nodes[k + 1] - nodes[k]);
    auto vp = [&](double s) { return sol.scaled(s)[1]; };
    const double vpp = (vp(t - 2 * h) - 8 * vp(t - h) + 8 * vp(t + h) - vp(t + 2 * h)) / (12 * h);
    const auto y = sol.scaled(t);
    const double lin = cfg.m(t / M2) / M4 * y[0], non = 3.0 * std::pow(y[0], 5), drift = 2.0 * y[1] / t;
    const double scale = std::abs(vpp) + std::abs(drift) + std::abs(lin) + std::abs(non);
    if (scale > 0.0) worst = std::max(worst, std::abs(vpp + drift - lin + non) / scale);
  }
  return worst;
}

/// int_0^R K(r, s) f(s) s^2 ds with K the radial kernel of (-Laplace + a)^{-1}.
/// `scale` is the concentration length of f; panels refine geometrically around 0.
template <class F>
double greens_representation(const greenfn::CenterGreens& G, F&& f, double r, double scale,
                             double rel_tol = 1e-11) {
  const double R = G.radius();
  std::vector<double> bp;
  for (double s = 0.3 * scale; s < R; s *= 3.0) bp.push_back(s);
  if (r > 0.0 && r < R) bp.push_back(r);
  std::sort(bp.begin(), bp.end());
  numkit::QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-300;
  auto g = [&](double s) { return s > 0.0 ? G.kernel(r, s) * f(s) * s * s : 0.0; };
  return numkit::integrate(g, 0.0, R, opt, bp).value;
}

/// max over probes of |u(r) - int K(r, s)(3u^5 - eps V u)(s) s^2 ds| / u(0).
inline double greens_rep_residual(const RadialSolution& sol, const std::vector<double>& probes,
                                  const greenfn::CenterGreens& G) {
  const auto& cfg = sol.config();
  auto source = [&](double s) {
    const double u = sol.u(s);
    return 3.0 * std::pow(u, 5) - cfg.eps * cfg.V(s) * u;
  };
  double worst = 0.0;
  for (double r : probes) {
    const double rep = greens_representation(G, source, r, 1.0 / sol.lambda_hat());
    worst = std::max(worst, std::abs(sol.u(r) - rep) / sol.M());
  }
  return worst;
}

inline double greens_rep_residual(const RadialSolution& sol, const std::vector<double>& probes = {0.3, 0.5, 0.7}) {
  std::vector<double> scaled;
  for (double p : probes) scaled.push_back(p * sol.radius());
  return greens_rep_residual(sol, scaled, greenfn::ga_center(sol.config().a, sol.radius()));
}

inline SolutionDiagnostics compute_diagnostics(const RadialSolution& sol) {
  const auto e = energy_integrals(sol);
  SolutionDiagnostics d;
  d.pde_residual = ode_residual(sol);
  d.energy_identity_residual = energy_identity_residual(e);
  d.pohozaev_residual = pohozaev_residual(e);
  d.sobolev_quotient = sobolev_quotient(e);
  d.sobolev_quotient_pure = sobolev_quotient_pure(e);
  return d;
}

}  // namespace critball::solver

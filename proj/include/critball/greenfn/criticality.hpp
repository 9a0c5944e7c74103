#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "critball/core.hpp"
#include "critball/greenfn/center.hpp"
#include "critball/greenfn/helmholtz.hpp"
#include "critball/numkit/roots.hpp"

namespace critball::greenfn {

/// phi_a(rho) for constant a = -k^2 <= 0.
inline double phia_profile(double rho, double a_const, double R, double tol = 1e-15) {
  if (!(rho >= 0.0 && rho < R)) throw DomainError("phia_profile: need 0 <= rho < R");
  return HelmholtzSeries(a_const, R, tol).phi(rho);
}

struct HessianReport {
  double series = 0.0;             // from the l = 0, 1 coefficients
  double finite_difference = 0.0;  // Richardson-extrapolated second difference
  double fd_halved = 0.0;          // same with the base step halved
  double gradient_at_center = 0.0;
  bool agreement = false;  // |series - fd| <= 1e-6 (else: truncation suspect)
  bool positive_definite = false;
};

/// phi_a''(0) (the Hessian is this value times the identity). The even
/// second difference D(h) = 2 (phi(h) - phi(0)) / h^2 is extrapolated as
/// (4 D(h/2) - D(h)) / 3.
inline HessianReport phia_hessian(double a_const, double R, double h = 0.01) {
  const HelmholtzSeries s(a_const, R);
  auto D = [&](double step) { return 2.0 * (s.phi(step * R) - s.phi(0.0)) / (step * R * step * R); };
  auto rich = [&](double step) { return (4.0 * D(0.5 * step) - D(step)) / 3.0; };
  HessianReport rep;
  rep.series = s.phi_second_derivative_at_center();
  rep.finite_difference = rich(h);
  rep.fd_halved = rich(0.5 * h);
  rep.gradient_at_center = (s.phi(1e-4 * R) - s.phi(0.0)) / (1e-4 * R) - 0.5 * rep.series * 1e-4 * R;
  rep.agreement = std::abs(rep.series - rep.finite_difference) <= 1e-6;
  rep.positive_definite = rep.series > 0.0;
  return rep;
}

struct CriticalityReport {
  double a = 0.0;
  double R = 1.0;
  double a_star = 0.0;
  double phi_at_center = 0.0;
  double phi_min = 0.0;
  std::vector<double> N_a;       // radii (spheres; 0 is the centre) where phi_a = 0
  std::vector<double> a_on_Na;   // coefficient values there
  double hessian = 0.0;          // phi_a''(0)
  bool criticality = false;      // (c): inf phi_a = 0, attained
  bool negativity = false;       // (d): a < 0 on N_a
  bool nondegeneracy = false;    // (e): every point of N_a is a nondegenerate critical point
};

/// Zero set of phi_a on a radial grid over [0, 0.98 R], refined by Brent's method.
inline CriticalityReport na_scan(double a_const, double R, int grid = 200, double tol = 1e-10) {
  const HelmholtzSeries s(a_const, R);
  CriticalityReport rep;
  rep.a = a_const;
  rep.R = R;
  rep.a_star = -pi * pi / (4.0 * R * R);
  rep.phi_at_center = s.phi(0.0);
  rep.hessian = s.phi_second_derivative_at_center();
  const double rmax = 0.98 * R;
  std::vector<double> rho(static_cast<std::size_t>(grid) + 1), val(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = rmax * static_cast<double>(i) / grid;
    val[i] = s.phi(rho[i]);
  }
  rep.phi_min = *std::min_element(val.begin(), val.end());
  if (std::abs(val[0]) <= tol) rep.N_a.push_back(0.0);
  for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
    if (i == 0 && std::abs(val[0]) <= tol) continue;
    if ((val[i] < 0.0) != (val[i + 1] < 0.0) && std::abs(val[i + 1]) > tol) {
      const auto root = numkit::brent_root([&](double r) { return s.phi(r); }, rho[i], rho[i + 1], 1e-15);
      rep.N_a.push_back(root.root);
    }
  }
  rep.a_on_Na.assign(rep.N_a.size(), a_const);
  const bool nonempty = !rep.N_a.empty();
  rep.criticality = nonempty && rep.phi_min >= -tol;
  rep.negativity = nonempty && std::all_of(rep.a_on_Na.begin(), rep.a_on_Na.end(), [](double v) { return v < 0.0; });
  rep.nondegeneracy = nonempty && std::all_of(rep.N_a.begin(), rep.N_a.end(), [&](double r) {
    // Off-centre zeros are spheres on which phi_a has nonzero slope, hence not critical points.
    if (r > 0.0) return false;
    return rep.hessian > 0.0;
  });
  return rep;
}

}  // namespace critball::greenfn

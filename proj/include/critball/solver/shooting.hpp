#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critball/core.hpp"
#include "critball/numkit/roots.hpp"
#include "critball/solver/diagnostics.hpp"
#include "critball/solver/problem.hpp"
#include "critball/solver/solution.hpp"

namespace critball::solver {

struct Bracket {
  double lo = 0.0, hi = 0.0;  // endpoint(lo) > 0 >= endpoint(hi)
  int k_lo = 0;
  std::size_t shots = 0;
};

/// Scans M on the lattice L^k from the seed's lattice cell for the first
/// change from a positive profile to one with an interior zero.
inline Bracket bracket_height(const ProblemConfig& cfg, std::optional<double> seed = std::nullopt) {
  const double L = cfg.lattice, lnL = std::log(L);
  const int k_min = static_cast<int>(std::ceil(std::log(cfg.min_height) / lnL));
  const int k_max = static_cast<int>(std::floor(std::log(cfg.max_height) / lnL));
  const int k0 = std::clamp(seed ? static_cast<int>(std::floor(std::log(*seed) / lnL)) : 0, k_min, k_max - 1);
  Bracket b;
  auto positive = [&](int k) {
    ++b.shots;
    const auto o = shoot(std::pow(L, k), cfg);
    return o.positive && o.endpoint > 0.0;
  };
  auto fail = [&]() {
    return NoSignChangeError("solve_profile: no sign change of u(R) for M in [" + std::to_string(std::pow(L, k_min)) +
                             ", " + std::to_string(std::pow(L, k_max)) + "]");
  };
  int k = k0;
  if (positive(k)) {
    while (k < k_max && positive(k + 1)) ++k;
    if (k == k_max) throw fail();
  } else {
    do --k;
    while (k >= k_min && !positive(k));
    if (k < k_min) throw fail();
  }
  b.k_lo = k;
  b.lo = std::pow(L, k);
  b.hi = std::pow(L, k + 1);
  return b;
}

/// Ground-state profile by bracketing and Brent iteration on M -> u_M(R).
inline RadialSolution solve_profile(const ProblemConfig& cfg, std::optional<double> seed = std::nullopt) {
  cfg.validate();
  const auto regime = check_regime(cfg);
  if (!regime.ok()) {
    throw RegimeError("solve_profile: configuration outside the existence regime (phi_a(0) = " +
                      std::to_string(regime.phi_a) + ", phi_{a+eps V}(0) = " + std::to_string(regime.phi_total) +
                      ", eps = " + std::to_string(cfg.eps) + ")");
  }
  const auto br = bracket_height(cfg, seed);
  auto f = [&](double M) { return shoot(M, cfg).endpoint; };
  const auto root = numkit::brent_root(f, br.lo, br.hi, 1e-3 * cfg.shoot_tol, 0.0, 300);
  auto run = detail::integrate_scaled(root.root, cfg);
  const auto o = detail::outcome(run);
  if (!(std::abs(o.endpoint) <= cfg.shoot_tol)) {
    throw ConvergenceError("solve_profile: |u(R)| = " + std::to_string(std::abs(o.endpoint)) +
                           " exceeds shoot_tol at M = " + std::to_string(root.root));
  }
  // |u(R)| <= shoot_tol moves the boundary zero by at most shoot_tol/|u'(R)|;
  // a zero within twice that distance of R is the boundary zero itself.
  const double R = cfg.radius();
  const double slack = 2.0 * cfg.shoot_tol / std::max(std::abs(o.endpoint_derivative), 1e-300) + 1e-14 * R;
  const double positive_up_to = o.first_zero ? *o.first_zero : R;
  if (positive_up_to < R - slack) {
    throw ConvergenceError("solve_profile: profile has an interior zero at r = " + std::to_string(positive_up_to));
  }
  RadialSolution sol(cfg, std::move(run), o.endpoint);
  for (std::size_t i = 0; i < sol.values().size(); ++i) {
    if (sol.nodes()[i] < R - slack && !(sol.values()[i] > 0.0))
      throw ConvergenceError("solve_profile: positivity violated at r = " + std::to_string(sol.nodes()[i]));
  }
  sol.diagnostics = compute_diagnostics(sol);
  return sol;
}

struct SweepRung {
  double eps = 0.0;
  std::optional<RadialSolution> solution;
  std::string error;  // empty on success
};

/// Continuation along a decreasing eps ladder. Each rung is seeded with
/// M*(eps_prev) sqrt(eps_prev/eps), the lambda ~ 1/eps scaling.
inline std::vector<SweepRung> sweep(const ProblemConfig& tmpl, const std::vector<double>& eps_ladder) {
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] < eps_ladder[i - 1])) throw ValidationError("eps_ladder", "must be strictly decreasing");
  std::vector<SweepRung> out;
  std::optional<double> seed;
  double seed_eps = 0.0;
  for (double e : eps_ladder) {
    SweepRung rung;
    rung.eps = e;
    ProblemConfig cfg = tmpl;
    cfg.eps = e;
    try {
      std::optional<double> s;
      if (seed) s = *seed * std::sqrt(seed_eps / e);
      rung.solution = solve_profile(cfg, s);
      seed = rung.solution->M();
      seed_eps = e;
    } catch (const Error& err) {
      rung.error = err.what();
    }
    out.push_back(std::move(rung));
  }
  return out;
}

}  // namespace critball::solver

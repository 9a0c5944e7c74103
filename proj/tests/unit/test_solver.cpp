#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "critball/bubble.hpp"
#include "critball/greenfn.hpp"
#include "critball/solver.hpp"

using namespace critball;
using namespace critball::solver;

namespace {

const double kCrit = -pi * pi / 4.0;
const double kLaw = pi * pi * pi / 2.0;

ProblemConfig base_config(double eps) {
  ProblemConfig cfg;
  cfg.a = RadialCoefficient::constant(kCrit);
  cfg.V = RadialCoefficient::constant(-1.0);
  cfg.eps = eps;
  return cfg;
}

// Energy integrals of a profile given in closed form, by direct quadrature.
EnergyIntegrals integrals_of(const std::function<double(double)>& u, const std::function<double(double)>& du, double m,
                             double R, double lam) {
  EnergyIntegrals e;
  auto ball = [&](auto&& f) { return 4 * pi * bubble::integrate_concentrated(f, lam, R, 1e-13).value; };
  e.grad = ball([&](double r) { return du(r) * du(r) * r * r; });
  e.mass_m = ball([&](double r) { return m * u(r) * u(r) * r * r; });
  e.sixth = ball([&](double r) { return std::pow(u(r), 6) * r * r; });
  e.boundary = 4 * pi * R * R * R * du(R) * du(R);
  return e;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST(ProblemConfig, ValidationNamesTheField) {
  auto cfg = base_config(0.01);
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps = -1;
  try {
    cfg.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "eps");
  }
  cfg = base_config(0.01);
  cfg.shoot_tol = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = base_config(20.0);  // a + eps V = -pi^2/4 - 20 < -pi^2
  try {
    cfg.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "a+eps*V");
  }
}

TEST(ProblemConfig, RegimeFlags) {
  const auto ok = check_regime(base_config(0.05));
  EXPECT_TRUE(ok.ok());
  EXPECT_NEAR(ok.phi_a, 0.0, 1e-10);
  EXPECT_LT(ok.phi_total, 0.0);
  EXPECT_FALSE(check_regime(base_config(0.0)).ok());
  auto sub = base_config(0.05);
  sub.a = RadialCoefficient::constant(-1.0);
  const auto c = check_regime(sub);
  EXPECT_TRUE(c.a_at_or_above_critical);
  EXPECT_FALSE(c.perturbation_below_critical);
  EXPECT_FALSE(c.ok());
}

// ---------------------------------------------------------------- taylor start

TEST(TaylorStart, Examples) {
  const auto z = taylor_start(0.0, -3.0, 1e-3);
  EXPECT_EQ(z.u, 0.0);
  EXPECT_EQ(z.du, 0.0);
  const double M = 2.0, d = 1e-3;
  EXPECT_DOUBLE_EQ(taylor_start(M, 0.0, d).u, M - d * d * std::pow(M, 5) / 2);
  // Exact bubble: the start matches U(delta) to O(delta^4).
  const double lam = 9.0;
  std::vector<double> err;
  for (double delta : {1e-2, 5e-3, 2.5e-3}) {
    const auto s = taylor_start(std::sqrt(lam), 0.0, delta);
    err.push_back(std::abs(s.u - bubble::u_radial(lam, delta)));
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 4.0, 0.1);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 4.0, 0.1);
}

// ---------------------------------------------------------------- shooting

TEST(Shoot, LinearRegimeMatchesSineProfile) {
  auto cfg = base_config(0.0);
  cfg.a = RadialCoefficient::constant(-5.0);
  const double M = 1e-3, k = std::sqrt(5.0);
  const auto o = shoot(M, cfg);
  EXPECT_TRUE(o.positive);
  EXPECT_GT(o.endpoint, 0.0);
  EXPECT_NEAR(o.endpoint / (M * std::sin(k) / k), 1.0, 1e-5);
}

TEST(Shoot, EndpointChangesSignOnDeskScale) {
  const auto cfg = base_config(0.05);
  bool seen_pos = false, seen_neg = false;
  for (double M = 1.0; M <= 1e3; M *= 2.0) {
    const auto o = shoot(M, cfg);
    (o.endpoint > 0 ? seen_pos : seen_neg) = true;
    EXPECT_EQ(o.first_zero.has_value(), !o.positive);
  }
  EXPECT_TRUE(seen_pos);
  EXPECT_TRUE(seen_neg);
  EXPECT_THROW(shoot(0.0, cfg), DomainError);
}

TEST(Shoot, NoSignChangeWithoutPerturbation) {
  // a = 0, eps = 0: every shot is a positive bubble on the ball.
  auto cfg = base_config(0.0);
  cfg.a = RadialCoefficient::constant(0.0);
  EXPECT_THROW(bracket_height(cfg), NoSignChangeError);
}

// ---------------------------------------------------------------- solve

TEST(SolveProfile, ConvergedSolutionAndDiagnostics) {
  const auto sol = solve_profile(base_config(0.05));
  EXPECT_LE(std::abs(sol.endpoint()), sol.config().shoot_tol);
  EXPECT_NEAR(0.05 * sol.lambda_hat() / kLaw, 1.0, 0.25);
  const auto& d = sol.diagnostics;
  EXPECT_LE(d.energy_identity_residual, 1e-7);
  EXPECT_LE(d.pohozaev_residual, 1e-6);
  EXPECT_LE(d.pde_residual, 1e-8);
  EXPECT_LT(d.sobolev_quotient, sobolev_constant);
  EXPECT_GE(d.sobolev_quotient_pure, sobolev_constant);
  EXPECT_LE(greens_rep_residual(sol), 1e-5);
  // Positive, decreasing, u'(0) = 0.
  EXPECT_EQ(sol.derivatives().front(), 0.0);
  for (std::size_t i = 1; i + 1 < sol.nodes().size(); ++i) {
    EXPECT_GT(sol.values()[i], 0.0);
    EXPECT_LT(sol.derivatives()[i], 0.0);
  }
  EXPECT_EQ(sol.nodes().back(), 1.0);
}

TEST(SolveProfile, Deterministic) {
  const auto a = solve_profile(base_config(0.02));
  const auto b = solve_profile(base_config(0.02));
  EXPECT_EQ(a.M(), b.M());
  EXPECT_EQ(a.values(), b.values());
  EXPECT_EQ(a.nodes(), b.nodes());
  // A seed anywhere in the same lattice cell gives the same bracket.
  const auto c = solve_profile(base_config(0.02), a.M() * 1.01);
  EXPECT_EQ(a.M(), c.M());
}

TEST(SolveProfile, RegimeAndValidationErrors) {
  EXPECT_THROW(solve_profile(base_config(0.0)), RegimeError);
  auto cfg = base_config(0.05);
  cfg.lattice = 1.0;
  EXPECT_THROW(solve_profile(cfg), ValidationError);
}

TEST(SolveProfile, TableCoefficients) {
  // a(r) = -pi^2/4 + 0.3 r^2 is above critical; V = -(1 + r) pushes below.
  std::vector<double> r, av, vv;
  for (int i = 0; i <= 40; ++i) {
    r.push_back(i / 40.0);
    av.push_back(kCrit + 0.3 * r.back() * r.back());
    vv.push_back(-(1 + r.back()));
  }
  auto cfg = base_config(0.3);
  cfg.a = RadialCoefficient::table(r, av);
  cfg.V = RadialCoefficient::table(r, vv);
  const auto sol = solve_profile(cfg);
  EXPECT_LE(sol.diagnostics.energy_identity_residual, 1e-7);
  EXPECT_LE(sol.diagnostics.pohozaev_residual, 1e-6);
  EXPECT_LE(greens_rep_residual(sol), 1e-5);
}

// ---------------------------------------------------------------- sweep

TEST(Sweep, LadderTrends) {
  const std::vector<double> ladder{0.04, 0.02, 0.01, 0.005};
  const auto rungs = sweep(base_config(0.0), ladder);
  ASSERT_EQ(rungs.size(), ladder.size());
  for (std::size_t i = 0; i < rungs.size(); ++i) {
    ASSERT_TRUE(rungs[i].solution.has_value()) << rungs[i].error;
    const auto& s = *rungs[i].solution;
    EXPECT_LT(s.diagnostics.sobolev_quotient, sobolev_constant);
    const double peak = s.M() * std::sqrt(s.eps());
    EXPECT_GE(peak, 0.99 * std::sqrt(kLaw));
    EXPECT_LE(peak, 2 * std::sqrt(kLaw));
    if (i == 0) continue;
    const auto& p = *rungs[i - 1].solution;
    EXPECT_GT(s.lambda_hat(), p.lambda_hat());
    EXPECT_GT(s.eps() * s.lambda_hat(), p.eps() * p.lambda_hat());
    EXPECT_LT(s.eps() * s.lambda_hat(), kLaw);
    EXPECT_GT(s.diagnostics.sobolev_quotient, p.diagnostics.sobolev_quotient);
  }
  // Extrapolation in eps lands on the law.
  std::vector<double> x, y;
  for (const auto& r : rungs) {
    x.push_back(r.eps);
    y.push_back(r.eps * r.solution->lambda_hat());
  }
  EXPECT_NEAR(numkit::richardson_fit(x, y, true).limit / kLaw, 1.0, 0.01);
}

TEST(Sweep, FailuresAreRecordedPerRung) {
  auto cfg = base_config(0.0);
  cfg.a = RadialCoefficient::constant(-1.0);  // subcritical: no solutions for small eps
  const auto rungs = sweep(cfg, {0.02, 0.01});
  ASSERT_EQ(rungs.size(), 2u);
  for (const auto& r : rungs) {
    EXPECT_FALSE(r.solution.has_value());
    EXPECT_FALSE(r.error.empty());
  }
  EXPECT_THROW(sweep(cfg, {0.01, 0.02}), ValidationError);
}

// ---------------------------------------------------------------- identities

TEST(Pohozaev, BubbleOnGrowingBalls) {
  // The whole-space bubble solves the m = 0 problem; the ball cut-off leaves a
  // residual that vanishes as R grows.
  const double lam = 1.0;
  std::vector<double> res;
  for (double R : {10.0, 100.0, 1000.0}) {
    const auto e = integrals_of([&](double r) { return bubble::u_radial(lam, r); },
                                [&](double r) { return bubble::du_dr(lam, r); }, 0.0, R, lam);
    res.push_back(pohozaev_residual(e));
  }
  EXPECT_LT(res[1], res[0]);
  EXPECT_LT(res[2], res[1]);
  EXPECT_LT(res[2], 1e-4);
}

TEST(Pohozaev, SensitiveToPerturbation) {
  const auto sol = solve_profile(base_config(0.05));
  const double m = sol.config().m(0.0);
  // u (1 + 1e-3 b(r)) with a smooth bump b vanishing at the boundary.
  auto b = [](double r) { return std::exp(-r * r / 0.02); };
  auto db = [](double r) { return -r / 0.01 * std::exp(-r * r / 0.02); };
  const auto e = integrals_of([&](double r) { return sol.u(r) * (1 + 1e-3 * b(r)); },
                              [&](double r) { return sol.du(r) * (1 + 1e-3 * b(r)) + sol.u(r) * 1e-3 * db(r); }, m,
                              1.0, sol.lambda_hat());
  EXPECT_GT(pohozaev_residual(e), 1e-4);
  const auto e0 = integrals_of([&](double r) { return sol.u(r); }, [&](double r) { return sol.du(r); }, m, 1.0,
                               sol.lambda_hat());
  EXPECT_LT(pohozaev_residual(e0), 1e-8);
}

TEST(GreensRepresentation, ManufacturedLinearProblem) {
  // u = cos(pi r / 2) on R = 1 solves (-Laplace + a) u = f with
  // f = (pi^2/4 + a) u + (pi / r) sin(pi r / 2).
  const double a = -1.3;
  const auto G = greenfn::ga_center(RadialCoefficient::constant(a), 1.0);
  auto u = [](double r) { return std::cos(pi * r / 2); };
  auto f = [&](double r) { return (pi * pi / 4 + a) * u(r) + pi / r * std::sin(pi * r / 2); };
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.95})
    EXPECT_NEAR(greens_representation(G, f, r, 1.0), u(r), 1e-8) << "r=" << r;
}

TEST(GreensRepresentation, WrongNormalisationIsDetected) {
  const auto sol = solve_profile(base_config(0.05));
  const auto G = greenfn::ga_center(sol.config().a, 1.0);
  const double good = greens_rep_residual(sol, {0.3, 0.5, 0.7}, G);
  // Replacing 3/(4 pi) by 3 scales the nonlinear source by 4 pi.
  double bad = 0.0;
  for (double r : {0.3, 0.5, 0.7}) {
    const double rep = greens_representation(
        G, [&](double s) { return 4 * pi * 3 * std::pow(sol.u(s), 5) + sol.eps() * sol.u(s); }, r,
        1.0 / sol.lambda_hat());
    bad = std::max(bad, std::abs(sol.u(r) - rep) / sol.M());
  }
  EXPECT_LE(good, 1e-5);
  EXPECT_GE(bad, 10 * 1e-5);
}

#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "critball/asympt.hpp"
#include "critball/bubble.hpp"
#include "critball/greenfn.hpp"
#include "critball/solver.hpp"

using namespace critball;
using namespace critball::asympt;
using greenfn::RadialCoefficient;

namespace {

const double kCrit = -pi * pi / 4.0;
const std::vector<double> kLadder{0.04, 0.02, 0.01, 0.005};

solver::ProblemConfig config(double V) {
  solver::ProblemConfig cfg;
  cfg.a = RadialCoefficient::constant(kCrit);
  cfg.V = RadialCoefficient::constant(V);
  return cfg;
}

std::vector<double> log_grid(double lam, double R) {
  std::vector<double> g{0.0};
  for (double r = 1e-3 / lam; r < R; r *= 1.05) g.push_back(r);
  g.push_back(R);
  return g;
}

RadialField scaled_pu(double c, double lam, double R) {
  const auto pu = bubble::pu_center(lam, R);
  RadialField f;
  f.value = [=](double r) { return c * pu.value(r); };
  f.slope = [=](double r) { return c * pu.grad(r); };
  f.R = R;
  f.scale = lam;
  f.grid = log_grid(lam, R);
  return f;
}

// A converged ladder and its records, shared by the sweep-based tests.
struct Ladder {
  solver::ProblemConfig cfg;
  AsymptoticContext ctx;
  std::vector<solver::SweepRung> rungs;
  std::vector<SweepRecord> records;
  std::vector<Decomposition> decomps;

  explicit Ladder(double V) : cfg(config(V)), ctx(make_context(cfg)), rungs(solver::sweep(cfg, kLadder)) {
    for (const auto& rung : rungs) {
      records.push_back(make_record(*rung.solution, ctx, default_probes(1.0)));
      decomps.push_back(decompose(*rung.solution, ctx));
    }
  }
};

const Ladder& ladder(double V) {
  static std::unique_ptr<Ladder> one, two;
  auto& slot = V == -1.0 ? one : two;
  if (!slot) slot = std::make_unique<Ladder>(V);
  return *slot;
}

SweepRecord synthetic(double eps, double lambda) {
  SweepRecord r;
  r.eps = eps;
  r.lambda = lambda;
  r.eps_lambda = eps * lambda;
  r.alpha = 1.0;
  return r;
}

}  // namespace

// ------------------------------------------------------------------ fit

TEST(FitBubble, RecoversScaledProjectedBubble) {
  auto f = scaled_pu(1.01, 500.0, 1.0);
  f.scale = 520.0;  // seed away from the answer
  const auto fit = fit_bubble(f);
  EXPECT_NEAR(fit.alpha, 1.01, 1.01e-6);
  EXPECT_NEAR(fit.lambda, 500.0, 500e-6);
  EXPECT_LT(fit.residual, 1e-6);
  EXPECT_FALSE(fit.flat);
}

TEST(FitBubble, ConvergedSolutionsApproachABubble) {
  const auto& L = ladder(-1.0);
  for (std::size_t i = 0; i < L.records.size(); ++i) {
    const auto& r = L.records[i];
    EXPECT_GT(r.alpha, 1.0);
    EXPECT_LT(r.alpha - 1.0, 0.2 * r.eps);
    // |lambda_fit - u(0)^2| / lambda_fit = O(eps)
    const double rel = std::abs(r.lambda - r.lambda_hat) / r.lambda;
    EXPECT_LT(rel / r.eps, 0.5);
    if (i > 0) {
      EXPECT_LT(r.alpha, L.records[i - 1].alpha);
    }
  }
}

// ------------------------------------------------------------------ decompose

TEST(Decompose, OrthogonalityAndReconstruction) {
  for (const auto& d : ladder(-1.0).decomps) {
    EXPECT_LE(d.orth_pu, 1e-9);
    EXPECT_LE(d.orth_dlpu, 1e-9);
    EXPECT_LE(d.orth_sr, 1e-9);
    EXPECT_LE(d.reconstruction, 1e-12);
    for (std::size_t k = 0; k < d.grid.size(); ++k) EXPECT_NEAR(d.s[k] + d.r[k], d.q[k], 1e-12 * (1 + std::abs(d.q[k])));
  }
}

TEST(Decompose, ZeroModeLimitsAtCriticalCoefficient) {
  const auto& L = ladder(-1.0);
  const auto z = beta_gamma_limits(L.decomps, L.ctx.phi_a0, L.ctx.phi_00);
  EXPECT_NEAR(z.beta_target, -16.0 / (3.0 * pi), 1e-10);
  EXPECT_NEAR(z.gamma_target, 128.0 / (15.0 * pi), 1e-10);
  EXPECT_LT(z.beta_error, 0.01);
  EXPECT_LT(z.gamma_error, 0.01);
}

TEST(Decompose, ZeroCoefficientControlHasNoZeroModes) {
  const double lam = 800.0;
  const auto G = greenfn::ga_center(RadialCoefficient::constant(0.0), 1.0);
  const auto d = decompose(scaled_pu(1.0, lam, 1.0), 1.0, lam, G);
  EXPECT_NEAR(d.beta, 0.0, 1e-8);
  EXPECT_NEAR(d.gamma, 0.0, 1e-8);
  EXPECT_NEAR(d.grad_w, 0.0, 1e-10);
}

TEST(Decompose, FewerThanThreeRungsRejected) {
  const auto& L = ladder(-1.0);
  std::vector<Decomposition> two(L.decomps.begin(), L.decomps.begin() + 2);
  EXPECT_THROW(beta_gamma_limits(two, 0.0, 1.0), InsufficientDataError);
}

// ------------------------------------------------------------------ laws

TEST(Laws, RateMatchesPotentialStrength) {
  const auto a = verify_rate(ladder(-1.0).records, ladder(-1.0).ctx);
  EXPECT_NEAR(a.target, pi * pi * pi / 2.0, 1e-6);
  EXPECT_TRUE(a.pass) << a.value;
  const auto b = verify_rate(ladder(-2.0).records, ladder(-2.0).ctx);
  EXPECT_NEAR(b.target, pi * pi * pi / 4.0, 1e-6);
  EXPECT_TRUE(b.pass) << b.value;
}

TEST(Laws, VanishingPotentialIsReportedAsInfinite) {
  auto ctx = make_context(config(-1.0));
  ctx.qv = 0.0;
  std::vector<SweepRecord> recs{synthetic(0.04, 400), synthetic(0.02, 1000), synthetic(0.01, 2500)};
  const auto e = verify_rate(recs, ctx);
  EXPECT_TRUE(e.infinite);
  EXPECT_TRUE(std::isinf(e.target));
  EXPECT_TRUE(e.pass);
  recs[2].eps_lambda = 5.0;
  EXPECT_FALSE(verify_rate(recs, ctx).pass);
}

TEST(Laws, PoorFitIsFlagged) {
  const auto ctx = make_context(config(-1.0));
  std::vector<SweepRecord> recs;
  const double target = 4 * pi * pi * std::abs(kCrit) / (2 * pi);
  int k = 0;
  for (double eps : {0.04, 0.03, 0.02, 0.01, 0.005}) {
    auto r = synthetic(eps, target / eps);
    r.eps_lambda = target + ((k++ % 2) ? 0.5 : -0.5);
    recs.push_back(r);
  }
  const auto e = verify_rate(recs, ctx);
  EXPECT_TRUE(e.poor_fit);
  EXPECT_FALSE(e.pass);
}

TEST(Laws, AlphaSlope) {
  const auto a = verify_alpha(ladder(-1.0).records, ladder(-1.0).ctx);
  EXPECT_NEAR(a.target, 32.0 / (3.0 * std::pow(pi, 4)), 1e-8);
  EXPECT_TRUE(a.pass) << a.value;
  const auto b = verify_alpha(ladder(-2.0).records, ladder(-2.0).ctx);
  EXPECT_NEAR(b.target, 2.0 * a.target, 1e-8);
  EXPECT_NEAR(b.value / a.value, 2.0, 0.1);
}

TEST(Laws, AlphaRefusesNonCriticalCoefficient) {
  solver::ProblemConfig cfg;
  cfg.a = RadialCoefficient::constant(0.0);
  const auto ctx = make_context(cfg);
  EXPECT_THROW(verify_alpha(ladder(-1.0).records, ctx), RegimeError);
}

TEST(Laws, TrustRegionExcludesSmallLambda) {
  const auto& L = ladder(-1.0);
  Tolerances tol;
  tol.trust_lambda = 1000.0;  // leaves two rungs
  EXPECT_THROW(verify_rate(L.records, L.ctx, tol), InsufficientDataError);
  EXPECT_THROW(build_report(L.records, L.ctx, tol), InsufficientDataError);
}

// ------------------------------------------------------------------ far field and trends

TEST(FarField, ExactGreensProfileHasNoError) {
  const auto G = greenfn::ga_center(RadialCoefficient::constant(kCrit), 1.0);
  const double lam = 1234.0;
  auto u = [&](double r) { return G.g(r) / std::sqrt(lam); };
  EXPECT_NEAR(verify_farfield(u, lam, G, default_probes(1.0)), 0.0, 1e-14);
  EXPECT_THROW(verify_farfield(u, lam, G, {1.0}), DomainError);
}

TEST(FarField, ErrorDecreasesAlongLadder) {
  const auto& recs = ladder(-1.0).records;
  for (std::size_t i = 1; i < recs.size(); ++i) EXPECT_LT(recs[i].farfield_error, recs[i - 1].farfield_error);
  EXPECT_LE(recs.back().farfield_error, 0.1);
}

TEST(Trends, SupNormDetector) {
  std::vector<SweepRecord> good, flat;
  for (double lam : {200.0, 400.0, 800.0, 1600.0}) {
    // w = PU / ln(lambda): sup|w| / lambda^{1/2} ~ 1 / ln(lambda)
    auto r = synthetic(1.0 / lam, lam);
    r.sup_w_ratio = 1.0 / std::log(lam);
    good.push_back(r);
    r.sup_w_ratio = 0.25;
    flat.push_back(r);
  }
  EXPECT_TRUE(sup_w_check(good).pass);
  EXPECT_FALSE(sup_w_check(flat).pass);
  EXPECT_TRUE(sup_w_check(ladder(-1.0).records).pass);
}

TEST(Trends, BoundednessDetector) {
  EXPECT_TRUE(bounded_trend("x", {1.0, 1.1, 1.2, 1.3}, 3.0).pass);
  EXPECT_FALSE(bounded_trend("x", {1.0, 2.0, 4.0, 16.0}, 3.0).pass);
  EXPECT_FALSE(bounded_trend("x", {1.0, NAN, 1.0}, 3.0).pass);
}

TEST(Report, CanonicalLadderPasses) {
  const auto& L = ladder(-1.0);
  const auto rep = build_report(L.records, L.ctx);
  EXPECT_EQ(rep.trusted_rungs, 4u);
  EXPECT_TRUE(rep.rate.pass);
  ASSERT_TRUE(rep.alpha.has_value());
  EXPECT_TRUE(rep.beta.pass);
  EXPECT_TRUE(rep.gamma.pass);
  EXPECT_TRUE(rep.farfield_pass);
  EXPECT_TRUE(rep.grad_w_bound.pass);
  EXPECT_TRUE(rep.grad_r_bound.pass);
  EXPECT_TRUE(rep.identities_pass);
  EXPECT_EQ(rep.symmetry_notes.size(), 3u);
  EXPECT_TRUE(rep.pass);
}

TEST(Report, PhiExpansionRouteVanishes) {
  // pi a(0)/lambda - eps Q_V/(4 pi), normalised by eps |Q_V|/(4 pi), tends to 0.
  const auto& recs = ladder(-1.0).records;
  for (std::size_t i = 1; i < recs.size(); ++i) EXPECT_LT(std::abs(recs[i].phi_route), std::abs(recs[i - 1].phi_route));
  EXPECT_LT(std::abs(recs.back().phi_route), 0.01);
}

// ------------------------------------------------------------------ coercivity

TEST(Coercivity, PositiveAtCriticalCoefficient) {
  const auto rep = coercivity_probe(1e3, RadialCoefficient::constant(kCrit), 1.0, 200);
  EXPECT_EQ(rep.samples, 200u);
  EXPECT_GT(rep.min_ratio, 0.0);
  EXPECT_GT(rep.span_min, 0.0);
  EXPECT_GE(rep.min_ratio, rep.span_min);
  EXPECT_LT(rep.unprojected_pu, 0.0);
}

TEST(Coercivity, ZeroCoefficientControl) {
  const auto rep = coercivity_probe(1e3, RadialCoefficient::constant(0.0), 1.0, 200);
  EXPECT_GE(rep.min_ratio, 4.0 / 7.0 - 0.02);
  EXPECT_GE(rep.span_min, 4.0 / 7.0 - 0.02);
  EXPECT_LT(rep.unprojected_pu, 0.0);
}

TEST(Coercivity, SeededSamplesAreDeterministic) {
  const auto a = RadialCoefficient::constant(kCrit);
  EXPECT_EQ(coercivity_probe(500.0, a, 1.0, 50, 7).min_ratio, coercivity_probe(500.0, a, 1.0, 50, 7).min_ratio);
}

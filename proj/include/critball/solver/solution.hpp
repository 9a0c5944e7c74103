#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critball/core.hpp"
#include "critball/numkit/ode.hpp"
#include "critball/numkit/quadrature.hpp"
#include "critball/solver/problem.hpp"

namespace critball::solver {

// The profile is integrated in the inner variable t = M^2 r with
// v(t) = u(r)/M, so that v(0) = 1 and
//   v'' + (2/t) v' = (m(t/M^2)/M^4) v - 3 v^5.
// The bubble core then sits at t = O(1) whatever the height M.

struct ShootOutcome {
  double M = 0.0;
  double endpoint = 0.0;             // u(R)
  double endpoint_derivative = 0.0;  // u'(R)
  std::optional<double> first_zero;  // first r in (0, R) with u(r) = 0
  bool positive = false;             // no zero in (0, R)
};

namespace detail {

struct ScaledRun {
  double M = 0.0;
  double t0 = 0.0;  // series start
  double T = 0.0;   // M^2 R
  numkit::OdeResult<2> ode;
};

inline ScaledRun integrate_scaled(double M, const ProblemConfig& cfg) {
  if (!(M > 0.0) || !std::isfinite(M)) throw DomainError("shoot: M must be positive and finite");
  const double M2 = M * M, M4 = M2 * M2, R = cfg.radius();
  ScaledRun run;
  run.M = M;
  run.T = M2 * R;
  run.t0 = cfg.series_start * std::min(M2, 1.0);
  const auto s = taylor_start(1.0, cfg.m(0.0) / M4, run.t0);
  auto rhs = [&](double t, const numkit::State<2>& y) -> numkit::State<2> {
    const double v = y[0], v2 = v * v;
    return {y[1], cfg.m(t / M2) / M4 * v - 3.0 * v2 * v2 * v - 2.0 * y[1] / t};
  };
  numkit::OdeOptions opt;
  opt.rtol = cfg.ode_rtol;
  // The tail of v decays like 1/t, so the absolute floor shrinks with the span.
  opt.atol = cfg.ode_atol / std::max(1.0, run.T);
  opt.max_step = std::max(run.T / 16.0, 1.0);
  std::vector<numkit::OdeEvent<2>> events{{[](double, const numkit::State<2>& y) { return y[0]; }, false, -1}};
  try {
    run.ode = numkit::ode_solve<2>(rhs, run.t0, {s.u, s.du}, run.T, opt, events);
  } catch (const StiffnessError& e) {
    throw StiffnessError(std::string(e.what()) + " (shooting height M = " + std::to_string(M) + ")");
  }
  return run;
}

inline ShootOutcome outcome(const ScaledRun& run) {
  ShootOutcome o;
  o.M = run.M;
  const auto& end = run.ode.trajectory.back();
  o.endpoint = run.M * end[0];
  o.endpoint_derivative = run.M * run.M * run.M * end[1];
  // A zero landing on the endpoint itself (within rounding) is not interior.
  for (const auto& h : run.ode.hits) {
    if (h.t < run.T * (1.0 - 1e-12)) {
      o.first_zero = h.t / (run.M * run.M);
      break;
    }
  }
  o.positive = !o.first_zero.has_value();
  return o;
}

}  // namespace detail

inline ShootOutcome shoot(double M, const ProblemConfig& cfg) {
  return detail::outcome(detail::integrate_scaled(M, cfg));
}

struct SolutionDiagnostics {
  double pde_residual = 0.0;
  double energy_identity_residual = 0.0;
  double pohozaev_residual = 0.0;
  double sobolev_quotient = 0.0;       // (int |grad u|^2 + m u^2) / |u|_6^2
  double sobolev_quotient_pure = 0.0;  // int |grad u|^2 / |u|_6^2
};

/// A positive radial solution, stored as the scaled dense trajectory.
class RadialSolution {
 public:
  RadialSolution(ProblemConfig cfg, detail::ScaledRun run, double endpoint)
      : cfg_(std::move(cfg)), run_(std::move(run)), endpoint_(endpoint) {
    const double M2 = run_.M * run_.M, R = cfg_.radius();
    nodes_.push_back(0.0);
    values_.push_back(run_.M);
    derivs_.push_back(0.0);
    std::vector<double> grid;
    for (std::size_t i = 1; i < cfg_.grid_points; ++i) grid.push_back(R * double(i) / double(cfg_.grid_points));
    std::vector<double> merged;
    for (double t : run_.ode.trajectory.nodes()) merged.push_back(t / M2);
    merged.insert(merged.end(), grid.begin(), grid.end());
    merged.push_back(R);
    std::sort(merged.begin(), merged.end());
    for (double r : merged) {
      if (r <= nodes_.back() * (1.0 + 1e-14)) continue;
      nodes_.push_back(std::min(r, R));
      values_.push_back(u(nodes_.back()));
      derivs_.push_back(du(nodes_.back()));
    }
  }

  const ProblemConfig& config() const noexcept { return cfg_; }
  double eps() const noexcept { return cfg_.eps; }
  double radius() const noexcept { return cfg_.radius(); }
  double M() const noexcept { return run_.M; }
  /// Provisional concentration scale u(0)^2.
  double lambda_hat() const noexcept { return run_.M * run_.M; }
  double endpoint() const noexcept { return endpoint_; }

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& derivatives() const noexcept { return derivs_; }

  /// Scaled profile v(t) and v'(t), t = M^2 r.
  numkit::State<2> scaled(double t) const {
    if (t < run_.t0) {
      const auto s = taylor_start(1.0, cfg_.m(0.0) / std::pow(run_.M, 4), t);
      return {s.u, s.du};
    }
    return run_.ode.trajectory(std::min(t, run_.T));
  }
  double u(double r) const { return run_.M * scaled(r * lambda_hat())[0]; }
  double du(double r) const { return std::pow(run_.M, 3) * scaled(r * lambda_hat())[1]; }

  /// 4 pi int_0^R F(r, u, u') r^2 dr, integrated in the inner variable with
  /// panels at the integrator nodes.
  template <class F>
  double ball_integral(F&& f, double rel_tol = 1e-12) const {
    const double M = run_.M, M2 = M * M, M3 = M2 * M;
    std::vector<double> pts{0.0};
    for (double t : run_.ode.trajectory.nodes()) pts.push_back(t);
    pts.back() = run_.T;
    numkit::QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    auto g = [&](double t) {
      const auto s = scaled(t);
      const double r = t / M2;
      return f(r, M * s[0], M3 * s[1]) * r * r / M2;
    };
    return 4.0 * pi * numkit::integrate_panels(g, pts, opt).value;
  }

  const numkit::OdeTrajectory<2>& scaled_trajectory() const noexcept { return run_.ode.trajectory; }
  double scaled_start() const noexcept { return run_.t0; }

  SolutionDiagnostics diagnostics;

 private:
  ProblemConfig cfg_;
  detail::ScaledRun run_;
  double endpoint_ = 0.0;
  std::vector<double> nodes_, values_, derivs_;
};

}  // namespace critball::solver

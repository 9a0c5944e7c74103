#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "critball/core.hpp"

namespace critball::numkit {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_subdivisions = 4000;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 21-point Kronrod rule with its embedded 10-point Gauss rule.
// Odd Kronrod abscissae are the Gauss nodes.
template <class F>
Panel gk21(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double kron = wk[0] * fc;
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double s = f(c - h * x[i]) + f(c + h * x[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  const double err = std::abs(kron - gauss) +
                     64.0 * std::numeric_limits<double>::epsilon() * std::abs(kron);
  return {a, b, kron, err};
}

inline constexpr std::size_t kGk21Evaluations = 21;

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21/10) quadrature over the finite panels
/// delimited by `points` (sorted, at least two entries). The panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// max(abs_tol, rel_tol*|value|). On exhaustion the partial value is returned
/// with converged = false.
template <class F>
QuadratureResult integrate_panels(F&& f, const std::vector<double>& points,
                                  const QuadOptions& opt = {}) {
  if (points.size() < 2) throw DomainError("integrate: need at least two points");
  QuadratureResult out;
  std::priority_queue<detail::Panel> heap;
  double value = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) {
      if (points[i + 1] == points[i]) continue;
      throw DomainError("integrate: breakpoints must be increasing");
    }
    auto p = detail::gk21(f, points[i], points[i + 1]);
    out.evaluations += detail::kGk21Evaluations;
    value += p.value;
    error += p.error;
    heap.push(p);
  }
  int splits = 0;
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(value)); };
  while (error > target() && splits < opt.max_subdivisions && !heap.empty()) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    auto left = detail::gk21(f, worst.a, mid);
    auto right = detail::gk21(f, mid, worst.b);
    out.evaluations += 2 * detail::kGk21Evaluations;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error_estimate = error;
  out.converged = error <= target();
  return out;
}

/// Integral of f over [a, b] with b possibly +infinity, split at interior
/// `breakpoints`. The semi-infinite tail [c, inf) is mapped to s in [0, 1)
/// by x = c + s/(1-s).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                           std::vector<double> breakpoints = {}) {
  if (!(b > a)) {
    if (b == a) return {0.0, 0.0, 0, true};
    throw DomainError("integrate: need a < b");
  }
  std::vector<double> pts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  if (std::isfinite(b)) {
    pts.push_back(b);
    return integrate_panels(f, pts, opt);
  }
  const double c = pts.back();
  auto mapped = [&](double s) {
    const double t = 1.0 - s;
    const double x = c + s / t;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx / (t * t);
  };
  QuadratureResult head{0.0, 0.0, 0, true};
  if (pts.size() > 1) head = integrate_panels(f, pts, opt);
  // Split the mapped tail so that x in [c, c+1] and [c+1, inf) get their own panels.
  auto tail = integrate_panels(mapped, {0.0, 0.5, 0.9, 1.0}, opt);
  QuadratureResult out;
  out.value = head.value + tail.value;
  out.error_estimate = head.error_estimate + tail.error_estimate;
  out.evaluations = head.evaluations + tail.evaluations;
  out.converged = head.converged && tail.converged;
  return out;
}

/// Radial quadrature with the acceptance rule error <= tol * max(1, |value|).
template <class F>
QuadratureResult quad_radial(F&& f, double a, double b, double tol = 1e-10) {
  QuadOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol;
  return integrate(std::forward<F>(f), a, b, opt);
}

}  // namespace critball::numkit

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "critball/core.hpp"

namespace critball::numkit {

struct RootResult {
  double root = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};  // final sign-change interval
  std::size_t iterations = 0;
  double residual = 0.0;  // f(root)
};

/// Brent's method (inverse quadratic interpolation with bisection fallback).
///
/// Stops when |f(root)| <= ftol or the bracket width is below xtol. The
/// returned root always lies inside the final bracket.
template <class F>
RootResult brent_root(F&& f, double a, double b, double ftol = 1e-14, double xtol = 0.0,
                      std::size_t max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (std::isnan(fa) || std::isnan(fb)) throw DomainError("brent_root: NaN at bracket end");
  if (fa == 0.0) return {a, {a, a}, 0, 0.0};
  if (fb == 0.0) return {b, {b, b}, 0, 0.0};
  if ((fa > 0) == (fb > 0))
    throw NoSignChangeError("brent_root: no sign change on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  const double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  RootResult out;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    out.iterations = it;
    if (std::abs(fb) <= ftol || std::abs(m) <= tol) break;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
    if (std::isnan(fb)) throw DomainError("brent_root: NaN inside bracket");
  }
  out.root = b;
  out.residual = fb;
  out.bracket = b < c ? std::pair{b, c} : std::pair{c, b};
  if (!(std::abs(fb) <= ftol) && std::abs(c - b) > 2.0 * (2.0 * eps * std::abs(b) + 0.5 * xtol) &&
      out.iterations >= max_iter)
    throw ConvergenceError("brent_root: iteration limit reached");
  return out;
}

}  // namespace critball::numkit

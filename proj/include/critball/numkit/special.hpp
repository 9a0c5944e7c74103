#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "critball/core.hpp"

namespace critball::numkit {

/// Radial bubble moment \f$\int_0^\infty t^p (1+t^2)^{-q}\,dt = \tfrac12 B(\tfrac{p+1}{2}, q-\tfrac{p+1}{2})\f$.
///
/// Every bubble integral in the library (norms of U, its lambda-derivative,
/// products with the regular part) reduces to a combination of these.
inline double bubble_moment(int p, double q) {
  if (p < 0) throw DomainError("bubble_moment: p must be non-negative");
  const double a = 0.5 * (p + 1);
  const double b = q - a;
  if (!(q > 0.0) || !(b > 0.0))
    throw DivergentMomentError("bubble_moment: divergent for p=" + std::to_string(p) +
                               ", q=" + std::to_string(q) + " (need q > (p+1)/2)");
  return 0.5 * std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

enum class BesselKind { j, y };

namespace detail {

// Ratios s_l = jhat_l / jhat_{l-1} of the scaled functions
// jhat_l(x) = (2l+1)!! j_l(x) / x^l, by the downward (Miller) recurrence
//   s_n = (2n+1) / (2n+1 - x^2 s_{n+1} / (2n+3)),
// which is stable where j_l is the minimal solution and needs no division by x.
inline std::vector<double> scaled_j_ratios(int lmax, double x) {
  std::vector<double> s(static_cast<std::size_t>(lmax) + 1, 1.0);
  const int start = lmax + 30 + static_cast<int>(2.0 * std::abs(x));
  double next = 1.0;
  for (int n = start; n >= 1; --n) {
    const double cur = (2.0 * n + 1.0) / (2.0 * n + 1.0 - x * x * next / (2.0 * n + 3.0));
    if (n <= lmax) s[static_cast<std::size_t>(n)] = cur;
    next = cur;
  }
  return s;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
  return std::sin(x) / x;
}

}  // namespace detail

/// Scaled regular spherical Bessel functions jhat_l(x) = (2l+1)!! j_l(x) / x^l for l = 0..lmax.
///
/// jhat_l(0) = 1 and jhat_l stays O(1) for x below the first zero of j_0,
/// so the products used by the Helmholtz series never overflow.
inline std::vector<double> scaled_bessel_j(int lmax, double x) {
  auto s = detail::scaled_j_ratios(lmax, x);
  std::vector<double> out(s.size());
  out[0] = detail::sinc(x);
  for (std::size_t l = 1; l < out.size(); ++l) out[l] = out[l - 1] * s[l];
  return out;
}

/// Scaled irregular spherical Bessel functions yhat_l(x) = x^{l+1} y_l(x) / (2l-1)!!
/// with (-1)!! = 1, by upward recurrence. yhat_l(0) = -1.
inline std::vector<double> scaled_bessel_y(int lmax, double x) {
  std::vector<double> out(static_cast<std::size_t>(lmax) + 1);
  out[0] = -std::cos(x);
  if (lmax >= 1) out[1] = -std::cos(x) - x * std::sin(x);
  for (int l = 1; l < lmax; ++l) {
    out[static_cast<std::size_t>(l) + 1] =
        out[static_cast<std::size_t>(l)] -
        out[static_cast<std::size_t>(l) - 1] * x * x / ((2.0 * l + 1.0) * (2.0 * l - 1.0));
  }
  return out;
}

/// Spherical Bessel function of the first (j) or second (y) kind.
///
/// j_l uses upward recurrence when x > l and Miller's downward recurrence,
/// normalised against whichever of j_0, j_1 is larger, below the turning
/// point. y_l always recurs upward. Throws OverflowError when y_l exceeds
/// the double range (small x, large l).
inline double sph_bessel(BesselKind kind, int l, double x) {
  if (l < 0) throw DomainError("sph_bessel: negative order");
  if (kind == BesselKind::j) {
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    const double j0 = std::sin(x) / x;
    if (l == 0) return j0;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    if (l == 1) return j1;
    if (x > l) {
      double jm = j0, jc = j1;
      for (int n = 1; n < l; ++n) {
        const double jn = (2.0 * n + 1.0) / x * jc - jm;
        jm = jc;
        jc = jn;
      }
      return jc;
    }
    // r_n = j_n / j_{n-1} by the continued-fraction recurrence, then
    // multiply up from the better-conditioned of j_0 and j_1.
    const int start = l + 30 + static_cast<int>(x);
    double next = 0.0;
    std::vector<double> r(static_cast<std::size_t>(l) + 1, 0.0);
    for (int n = start; n >= 1; --n) {
      const double cur = x / (2.0 * n + 1.0 - x * next);
      if (n <= l) r[static_cast<std::size_t>(n)] = cur;
      next = cur;
    }
    double value;
    int from;
    if (std::abs(j1) >= std::abs(j0)) {
      value = j1;
      from = 2;
    } else {
      value = j0;
      from = 1;
    }
    for (int n = from; n <= l; ++n) value *= r[static_cast<std::size_t>(n)];
    return value;
  }
  if (!(x > 0.0)) throw DomainError("sph_bessel: y_l requires x > 0");
  double ym = -std::cos(x) / x;
  if (l == 0) return ym;
  double yc = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 1; n < l; ++n) {
    const double yn = (2.0 * n + 1.0) / x * yc - ym;
    ym = yc;
    yc = yn;
    if (!std::isfinite(yc))
      throw OverflowError("sph_bessel: y_" + std::to_string(l) + "(" + std::to_string(x) +
                          ") overflows");
  }
  return yc;
}

/// Derivative via f_l' = f_{l-1} - (l+1) f_l / x (f_0' = -f_1).
inline double sph_bessel_derivative(BesselKind kind, int l, double x) {
  if (l == 0) return -sph_bessel(kind, 1, x);
  return sph_bessel(kind, l - 1, x) - (l + 1.0) * sph_bessel(kind, l, x) / x;
}

/// Legendre polynomials P_0..P_lmax at c.
inline std::vector<double> legendre_p(int lmax, double c) {
  std::vector<double> p(static_cast<std::size_t>(lmax) + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = c;
  for (int l = 1; l < lmax; ++l) {
    p[static_cast<std::size_t>(l) + 1] =
        ((2.0 * l + 1.0) * c * p[static_cast<std::size_t>(l)] - l * p[static_cast<std::size_t>(l) - 1]) /
        (l + 1.0);
  }
  return p;
}

}  // namespace critball::numkit

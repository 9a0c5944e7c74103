#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "critball/core.hpp"

namespace critball::greenfn {

/// Ball of radius R centred at the origin.
class BallDomain {
 public:
  explicit BallDomain(double R = 1.0) : R_(R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("R", "radius must be positive and finite");
  }
  double radius() const noexcept { return R_; }
  /// d(x) = R - |x|; positive exactly for interior points.
  double distance_to_boundary(const Point& x) const { return R_ - norm(x); }
  bool contains(const Point& x) const { return distance_to_boundary(x) > 0.0; }
  /// First Dirichlet eigenvalue of -Laplace on the ball.
  double first_dirichlet_eigenvalue() const { return pi * pi / (R_ * R_); }

 private:
  double R_;
};

/// Radial coefficient: a constant or a table interpolated by modified Akima cubics.
class RadialCoefficient {
 public:
  static RadialCoefficient constant(double c) {
    if (!std::isfinite(c)) throw ValidationError("value", "coefficient must be finite");
    RadialCoefficient rc;
    rc.c_ = c;
    return rc;
  }

  static RadialCoefficient table(std::vector<double> r, std::vector<double> values) {
    if (r.size() != values.size()) throw ValidationError("values", "length differs from abscissae");
    if (r.size() < 4) throw ValidationError("abscissae", "cubic table needs at least 4 points");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw ValidationError("abscissae", "must be strictly increasing");
    if (r.front() < 0.0) throw ValidationError("abscissae", "must be non-negative");
    for (double v : values)
      if (!std::isfinite(v)) throw ValidationError("values", "must be finite");
    RadialCoefficient rc;
    rc.r_ = r;
    rc.v_ = values;
    rc.spline_ = std::make_shared<const Spline>(std::move(r), std::move(values));
    return rc;
  }

  bool is_constant() const noexcept { return !spline_; }
  double constant_value() const {
    if (!is_constant()) throw DomainError("RadialCoefficient: not constant");
    return c_;
  }
  const std::vector<double>& abscissae() const noexcept { return r_; }
  const std::vector<double>& values() const noexcept { return v_; }

  double operator()(double r) const { return spline_ ? (*spline_)(r) : c_; }
  double derivative(double r) const { return spline_ ? spline_->prime(r) : 0.0; }

  double min_value() const {
    if (!spline_) return c_;
    // Akima cubics do not overshoot much; sample densely to bound the minimum.
    double m = *std::min_element(v_.begin(), v_.end());
    for (std::size_t i = 0; i + 1 < r_.size(); ++i)
      for (int j = 1; j < 16; ++j) m = std::min(m, (*spline_)(r_[i] + (r_[i + 1] - r_[i]) * j / 16.0));
    return m;
  }

  /// The table must cover [0, R].
  void check_covers(double R) const {
    if (!spline_) return;
    if (r_.front() > 0.0 || r_.back() < R)
      throw ValidationError("abscissae", "table must cover [0, R]");
  }

  /// Coercivity of -Laplace + a on the ball: a > -pi^2/R^2 (pointwise sufficient).
  void check_coercive(const BallDomain& dom, const std::string& field = "a") const {
    check_covers(dom.radius());
    if (!(min_value() > -dom.first_dirichlet_eigenvalue()))
      throw ValidationError(field, "coefficient violates coercivity bound a > -pi^2/R^2");
  }

  bool operator==(const RadialCoefficient& o) const {
    return c_ == o.c_ && r_ == o.r_ && v_ == o.v_;
  }

 private:
  using Spline = boost::math::interpolators::makima<std::vector<double>>;
  RadialCoefficient() = default;
  double c_ = 0.0;
  std::vector<double> r_, v_;
  std::shared_ptr<const Spline> spline_;
};

}  // namespace critball::greenfn

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace critball {

inline constexpr double pi = std::numbers::pi;

/// Sharp Sobolev constant in three dimensions, 3 (pi/2)^{4/3}.
inline const double sobolev_constant = 3.0 * std::pow(pi / 2.0, 4.0 / 3.0);

using Point = std::array<double, 3>;

inline double norm(const Point& p) { return std::hypot(p[0], p[1], p[2]); }

inline Point operator-(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can catch the whole family at a boundary (the CLI maps them onto
// exit codes).

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (coincident points, boundary points...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DivergentMomentError : public DomainError {
 public:
  using DomainError::DomainError;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class NoSignChangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Step size underflow in the ODE integrator.
class StiffnessError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// j_l(kR) vanishes: the Helmholtz operator hits a Dirichlet eigenvalue.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// Operation called outside the parameter regime where it is meaningful.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 protected:
  struct Verbatim {};
  // `message` is used as is; for subclasses that format their own location.
  ValidationError(Verbatim, std::string field, const std::string& message) : Error(message), field_(std::move(field)) {}

 private:
  std::string field_;
};

}  // namespace critball

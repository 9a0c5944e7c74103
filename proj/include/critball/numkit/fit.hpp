#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "critball/core.hpp"

namespace critball::numkit {

struct LeastSquaresFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;  // zero when the system is square
  double residual_rms = 0.0;
  double condition = 0.0;  // 2-norm condition number of the column-scaled design
};

/// Linear least squares X c ~ y by column-pivoted QR on a column-equilibrated
/// design. Rank deficiency raises InsufficientDataError.
inline LeastSquaresFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = X.rows(), p = X.cols();
  if (n < p || p == 0)
    throw InsufficientDataError("least_squares: " + std::to_string(n) + " rows for " +
                                std::to_string(p) + " unknowns");
  Eigen::VectorXd colscale = X.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (colscale[j] == 0.0) throw InsufficientDataError("least_squares: zero column");
  const Eigen::MatrixXd Xs = X * colscale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  qr.setThreshold(1e-13);
  if (qr.rank() < p) throw InsufficientDataError("least_squares: rank-deficient design");
  LeastSquaresFit out;
  const Eigen::VectorXd cs = qr.solve(y);
  out.coefficients = cs.cwiseQuotient(colscale);
  const Eigen::VectorXd res = y - X * out.coefficients;
  out.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(n));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs);
  const auto& sv = svd.singularValues();
  out.condition = sv[0] / sv[sv.size() - 1];
  out.standard_errors = Eigen::VectorXd::Zero(p);
  if (n > p) {
    const double sigma2 = res.squaredNorm() / static_cast<double>(n - p);
    const Eigen::MatrixXd XtX = Xs.transpose() * Xs;
    const Eigen::MatrixXd cov = sigma2 * XtX.inverse();
    for (Eigen::Index j = 0; j < p; ++j) out.standard_errors[j] = std::sqrt(cov(j, j)) / colscale[j];
  }
  return out;
}

/// Fit of y(x) against arbitrary basis functions.
inline LeastSquaresFit basis_fit(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<std::function<double(double)>>& basis) {
  if (x.size() != y.size()) throw DomainError("basis_fit: size mismatch");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd Y(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    Y[static_cast<Eigen::Index>(i)] = y[i];
    for (std::size_t j = 0; j < basis.size(); ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = basis[j](x[i]);
  }
  return least_squares(X, Y);
}

struct RichardsonFit {
  double limit = 0.0;      // L
  double slope = 0.0;      // c
  double quadratic = 0.0;  // c2 (0 for the linear model)
  double residual = 0.0;   // RMS misfit
  double limit_stderr = 0.0;
  double slope_stderr = 0.0;
};

/// Extrapolation y = L + c x (+ c2 x^2) to x -> 0 by least squares.
/// Needs at least three pairs with distinct abscissae.
inline RichardsonFit richardson_fit(const std::vector<double>& x, const std::vector<double>& y,
                                    bool quadratic = false) {
  if (x.size() != y.size()) throw DomainError("richardson_fit: size mismatch");
  const std::size_t need = quadratic ? 3 : 2;
  if (x.size() < 3 || std::set<double>(x.begin(), x.end()).size() < std::max<std::size_t>(need, 3))
    throw InsufficientDataError("richardson_fit: need at least 3 pairs with distinct abscissae");
  std::vector<std::function<double(double)>> basis{[](double) { return 1.0; },
                                                   [](double t) { return t; }};
  if (quadratic) basis.push_back([](double t) { return t * t; });
  const auto fit = basis_fit(x, y, basis);
  RichardsonFit out;
  out.limit = fit.coefficients[0];
  out.slope = fit.coefficients[1];
  if (quadratic) out.quadratic = fit.coefficients[2];
  out.residual = fit.residual_rms;
  out.limit_stderr = fit.standard_errors[0];
  out.slope_stderr = fit.standard_errors[1];
  return out;
}

}  // namespace critball::numkit

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "critball/bubble/bubble.hpp"
#include "critball/core.hpp"
#include "critball/greenfn/domain.hpp"

namespace critball::asympt {

struct CoercivityReport {
  double lambda = 0.0;
  std::size_t samples = 0;
  double min_ratio = 0.0;   // min over random samples in T-perp
  double span_min = 0.0;    // exact minimum over the whole test space in T-perp
  double unprojected_pu = 0.0;  // ratio at v = PU (not orthogonal to T)
};

namespace detail {

// Radial test functions vanishing at R: bubble-like profiles over a ladder of
// scales around 1/lambda plus low Dirichlet modes. Index 0 is PU, 1 is d_lambda PU.
struct TestSpace {
  std::vector<double> nodes, weights;  // quadrature for 4 pi int (.) r^2 dr
  Eigen::MatrixXd val, der;            // basis x nodes
};

inline TestSpace build_test_space(double lam, double R) {
  TestSpace ts;
  using GL = boost::math::quadrature::gauss<double, 20>;
  std::vector<double> edges{0.0};
  for (double m = 0.1; m / lam < R; m *= 2.0) edges.push_back(m / lam);
  edges.push_back(R);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1], c = 0.5 * (a + b), h = 0.5 * (b - a);
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (x[i] == 0.0 && sgn < 0) continue;
        const double r = c + sgn * h * x[i];
        ts.nodes.push_back(r);
        ts.weights.push_back(4.0 * pi * h * w[i] * r * r);
      }
    }
  }
  std::vector<std::function<double(double)>> f, df;
  f.emplace_back([=](double r) { return bubble::u_radial(lam, r) - bubble::u_radial(lam, R); });
  df.emplace_back([=](double r) { return bubble::du_dr(lam, r); });
  f.emplace_back([=](double r) { return bubble::dlambda_radial(lam, r) - bubble::dlambda_radial(lam, R); });
  df.emplace_back([=](double r) { return bubble::dlambda_dr(lam, r); });
  for (double k = 0.125; k <= 8.0; k *= 2.0) {
    const double mu = k * lam;
    for (int p : {1, 3}) {
      // (1 + mu^2 r^2)^{-p/2} minus its boundary value.
      f.emplace_back([=](double r) { return std::pow(1 + mu * mu * r * r, -0.5 * p) - std::pow(1 + mu * mu * R * R, -0.5 * p); });
      df.emplace_back([=](double r) { return -p * mu * mu * r * std::pow(1 + mu * mu * r * r, -0.5 * p - 1); });
    }
  }
  for (int n = 1; n <= 6; ++n) {
    const double kn = n * pi / R;
    f.emplace_back([=](double r) { return r > 0 ? std::sin(kn * r) / (kn * r) : 1.0; });
    df.emplace_back([=](double r) { return r > 0 ? (kn * r * std::cos(kn * r) - std::sin(kn * r)) / (kn * r * r) : 0.0; });
  }
  const auto nb = static_cast<Eigen::Index>(f.size()), nn = static_cast<Eigen::Index>(ts.nodes.size());
  ts.val.resize(nb, nn);
  ts.der.resize(nb, nn);
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < nn; ++j) {
      ts.val(i, j) = f[static_cast<std::size_t>(i)](ts.nodes[static_cast<std::size_t>(j)]);
      ts.der(i, j) = df[static_cast<std::size_t>(i)](ts.nodes[static_cast<std::size_t>(j)]);
    }
  return ts;
}

}  // namespace detail

/// Rayleigh quotient of the linearised form
///   Q(v) = int |grad v|^2 + a v^2 - 15 U^4 v^2,   ratio Q(v) / int |grad v|^2,
/// over radial test functions projected onto the Dirichlet-orthogonal
/// complement of span{PU, d_lambda PU}. Samples are Gaussian combinations of a
/// fixed test space drawn from a seeded generator.
inline CoercivityReport coercivity_probe(double lam, const greenfn::RadialCoefficient& a, double R,
                                         std::size_t samples = 200, std::uint64_t seed = 20240917) {
  const auto ts = detail::build_test_space(lam, R);
  const Eigen::Index nb = ts.val.rows();
  Eigen::VectorXd wq(static_cast<Eigen::Index>(ts.weights.size())), pot(wq.size());
  for (Eigen::Index j = 0; j < wq.size(); ++j) {
    const double r = ts.nodes[static_cast<std::size_t>(j)];
    wq(j) = ts.weights[static_cast<std::size_t>(j)];
    pot(j) = a(r) - 15.0 * std::pow(bubble::u_radial(lam, r), 4);
  }
  const Eigen::MatrixXd A = ts.der * wq.asDiagonal() * ts.der.transpose();
  const Eigen::MatrixXd Q = A + ts.val * (wq.cwiseProduct(pot)).asDiagonal() * ts.val.transpose();

  // Projector onto the complement of the first two basis functions, in coefficients.
  const Eigen::Matrix2d g = A.topLeftCorner(2, 2);
  const Eigen::MatrixXd coupling = g.ldlt().solve(A.topRows(2));  // 2 x nb
  auto project = [&](Eigen::VectorXd c) {
    const Eigen::Vector2d t = coupling * c;
    c.head(2) -= t;
    return c;
  };

  CoercivityReport rep;
  rep.lambda = lam;
  rep.samples = samples;
  rep.unprojected_pu = Q(0, 0) / A(0, 0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nb);
    for (Eigen::Index i = 2; i < nb; ++i) c(i) = n01(rng);
    c = project(c);
    rep.min_ratio = std::min(rep.min_ratio, c.dot(Q * c) / c.dot(A * c));
  }

  // Exact minimum over the projected test space: basis of the complement is
  // e_i - (coupling column i) for i >= 2.
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(nb, nb).rightCols(nb - 2);
  B.topRows(2) = -coupling.rightCols(nb - 2);
  const Eigen::MatrixXd Ap = B.transpose() * A * B, Qp = B.transpose() * Q * B;
  // Whiten Ap to avoid an ill-conditioned generalized problem.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(Ap);
  const double cut = 1e-12 * ea.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ea.eigenvalues().size(); ++i)
    if (ea.eigenvalues()(i) > cut) keep.push_back(i);
  Eigen::MatrixXd W(Ap.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    W.col(static_cast<Eigen::Index>(k)) = ea.eigenvectors().col(keep[k]) / std::sqrt(ea.eigenvalues()(keep[k]));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(W.transpose() * Qp * W);
  rep.span_min = eq.eigenvalues().minCoeff();
  return rep;
}

}  // namespace critball::asympt

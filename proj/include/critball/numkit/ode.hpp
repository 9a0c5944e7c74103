#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "critball/core.hpp"
#include "critball/numkit/detail/dop853_tableau.hpp"

namespace critball::numkit {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double first_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// Accepted steps of an integration together with their 7th-order dense
/// interpolants. Nodes are strictly increasing; evaluating at a node returns
/// the stored state exactly.
template <std::size_t N>
class OdeTrajectory {
 public:
  using StateT = State<N>;

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<StateT>& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double t_begin() const { return nodes_.front(); }
  double t_end() const { return nodes_.back(); }
  const StateT& back() const { return states_.back(); }

  StateT operator()(double t) const {
    if (nodes_.empty()) throw DomainError("OdeTrajectory: empty");
    if (t < nodes_.front() || t > nodes_.back())
      throw DomainError("OdeTrajectory: abscissa outside integrated span");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.begin()) return states_.front();
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (nodes_[k] == t || k + 1 == nodes_.size()) return states_[k];
    return segments_[k].eval(t, states_[k]);
  }

  // Internal construction interface used by the integrator.
  struct Segment {
    double t0 = 0.0, h = 0.0;
    std::array<StateT, detail::dop853::kInterpolatorPower> F{};

    StateT eval(double t, const StateT& y0) const {
      const double x = (t - t0) / h;
      StateT y{};
      for (std::size_t i = 0; i < F.size(); ++i) {
        const auto& f = F[F.size() - 1 - i];
        const double mult = (i % 2 == 0) ? x : (1.0 - x);
        for (std::size_t j = 0; j < N; ++j) y[j] = (y[j] + f[j]) * mult;
      }
      for (std::size_t j = 0; j < N; ++j) y[j] += y0[j];
      return y;
    }
  };

  void start(double t, const StateT& y) {
    nodes_.assign(1, t);
    states_.assign(1, y);
    segments_.clear();
  }
  void append(double t, const StateT& y, const Segment& seg) {
    nodes_.push_back(t);
    states_.push_back(y);
    segments_.push_back(seg);
  }
  void truncate_last(double t, const StateT& y) {
    // Shortens the final step; its interpolant stays valid on the shorter span.
    nodes_.back() = t;
    states_.back() = y;
  }

 private:
  std::vector<double> nodes_;
  std::vector<StateT> states_;
  std::vector<Segment> segments_;
};

/// Scalar event g(t, y); a hit is a sign change of g across a step,
/// optionally restricted to rising (+1) or falling (-1) crossings.
template <std::size_t N>
struct OdeEvent {
  std::function<double(double, const State<N>&)> g;
  bool terminal = false;
  int direction = 0;
};

template <std::size_t N>
struct EventHit {
  std::size_t event = 0;
  double t = 0.0;
  State<N> y{};
};

template <std::size_t N>
struct OdeResult {
  OdeTrajectory<N> trajectory;
  std::vector<EventHit<N>> hits;
  bool terminated = false;  // stopped by a terminal event
  std::size_t rhs_evaluations = 0;
  std::size_t rejected_steps = 0;
};

namespace detail {

template <std::size_t N>
double rms(const State<N>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(N));
}

// Bisection-safeguarded secant on the dense interpolant.
template <std::size_t N, class G, class D>
double locate_event(const G& g, const D& dense, double ta, double ga, double tb, double gb) {
  for (int it = 0; it < 200; ++it) {
    double tm = ta - ga * (tb - ta) / (gb - ga);
    if (!(tm > ta && tm < tb) || it % 3 == 2) tm = 0.5 * (ta + tb);
    const double gm = g(tm, dense(tm));
    if (gm == 0.0) return tm;
    if ((gm > 0) == (ga > 0)) {
      ta = tm;
      ga = gm;
    } else {
      tb = tm;
      gb = gm;
    }
    if (tb - ta <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tb)))
      break;
  }
  return std::abs(ga) < std::abs(gb) ? ta : tb;
}

}  // namespace detail

/// Explicit Dormand-Prince 8(5,3) integration of y' = f(t, y) on [t0, t1]
/// with 7th-order dense output and event location. Step control follows the
/// usual DOP853 policy (safety 0.9, factor clamp [0.2, 10], exponent -1/8).
/// Throws StiffnessError when the step size underflows.
template <std::size_t N, class Rhs>
OdeResult<N> ode_solve(Rhs&& f, double t0, const State<N>& y0, double t1,
                       const OdeOptions& opt = {},
                       const std::vector<OdeEvent<N>>& events = {}) {
  namespace tab = detail::dop853;
  using StateT = State<N>;
  if (!(t1 > t0)) throw DomainError("ode_solve: need t1 > t0");
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  constexpr double kExponent = -1.0 / 8.0;
  const double eps = std::numeric_limits<double>::epsilon();

  OdeResult<N> res;
  auto& traj = res.trajectory;
  traj.start(t0, y0);
  auto call = [&](double t, const StateT& y) {
    ++res.rhs_evaluations;
    return f(t, y);
  };

  double t = t0;
  StateT y = y0;
  StateT fy = call(t, y);

  auto scale_of = [&](const StateT& a, const StateT& b) {
    StateT s;
    for (std::size_t j = 0; j < N; ++j)
      s[j] = opt.atol + std::max(std::abs(a[j]), std::abs(b[j])) * opt.rtol;
    return s;
  };

  double h = opt.first_step;
  if (h <= 0.0) {
    const StateT sc = scale_of(y, y);
    StateT tmp;
    for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] / sc[j];
    const double d0 = detail::rms(tmp);
    for (std::size_t j = 0; j < N; ++j) tmp[j] = fy[j] / sc[j];
    const double d1 = detail::rms(tmp);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t1 - t0);
    StateT y1;
    for (std::size_t j = 0; j < N; ++j) y1[j] = y[j] + h0 * fy[j];
    const StateT f1 = call(t + h0, y1);
    for (std::size_t j = 0; j < N; ++j) tmp[j] = (f1[j] - fy[j]) / sc[j];
    const double d2 = detail::rms(tmp) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15)
                          ? std::max(1e-6, h0 * 1e-3)
                          : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
    h = std::min({100.0 * h0, h1, t1 - t0});
  }
  h = std::min(h, opt.max_step);

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t, y);

  std::array<StateT, tab::kStagesExtended> K{};
  bool rejected = false;
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (t >= t1) break;
    const double min_step = 10.0 * eps * std::max(std::abs(t), std::abs(t1 - t0) * 1e-3);
    StateT y_new{}, f_new{};
    double h_used = 0.0;
    for (;;) {
      if (h < min_step)
        throw StiffnessError("ode_solve: step size underflow at t=" + std::to_string(t));
      h_used = std::min(h, t1 - t);
      const double t_new = (h_used == t1 - t) ? t1 : t + h_used;
      h_used = t_new - t;
      K[0] = fy;
      for (int s = 1; s < tab::kStages; ++s) {
        StateT ys = y;
        for (int r = 0; r < s; ++r) {
          const double a = tab::A[s][r];
          if (a == 0.0) continue;
          for (std::size_t j = 0; j < N; ++j) ys[j] += h_used * a * K[r][j];
        }
        K[s] = call(t + tab::C[s] * h_used, ys);
      }
      y_new = y;
      for (int r = 0; r < tab::kStages; ++r)
        for (std::size_t j = 0; j < N; ++j) y_new[j] += h_used * tab::B[r] * K[r][j];
      f_new = call(t_new, y_new);
      K[tab::kStages] = f_new;

      const StateT sc = scale_of(y, y_new);
      double e5 = 0.0, e3 = 0.0;
      bool finite = true;
      for (std::size_t j = 0; j < N; ++j) {
        double a5 = 0.0, a3 = 0.0;
        for (int r = 0; r <= tab::kStages; ++r) {
          a5 += tab::E5[r] * K[r][j];
          a3 += tab::E3[r] * K[r][j];
        }
        a5 /= sc[j];
        a3 /= sc[j];
        e5 += a5 * a5;
        e3 += a3 * a3;
        finite = finite && std::isfinite(y_new[j]) && std::isfinite(f_new[j]);
      }
      double err = 0.0;
      if (!finite) {
        err = std::numeric_limits<double>::infinity();
      } else if (e5 > 0.0 || e3 > 0.0) {
        err = h_used * e5 / std::sqrt((e5 + 0.01 * e3) * static_cast<double>(N));
      }
      if (err < 1.0) {
        double factor = (err == 0.0) ? kMaxFactor
                                     : std::min(kMaxFactor, kSafety * std::pow(err, kExponent));
        if (rejected) factor = std::min(1.0, factor);
        h = std::min(h_used * factor, opt.max_step);
        rejected = false;
        break;
      }
      const double factor =
          std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, kExponent)) : kMinFactor;
      h = h_used * factor;
      rejected = true;
      ++res.rejected_steps;
    }

    // Dense-output coefficients.
    typename OdeTrajectory<N>::Segment seg;
    seg.t0 = t;
    seg.h = h_used;
    for (int s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
      StateT ys = y;
      for (int r = 0; r < s; ++r) {
        const double a = tab::A[s][r];
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < N; ++j) ys[j] += h_used * a * K[r][j];
      }
      K[s] = call(t + tab::C[s] * h_used, ys);
    }
    for (std::size_t j = 0; j < N; ++j) {
      const double dy = y_new[j] - y[j];
      seg.F[0][j] = dy;
      seg.F[1][j] = h_used * fy[j] - dy;
      seg.F[2][j] = 2.0 * dy - h_used * (f_new[j] + fy[j]);
    }
    for (int d = 0; d < tab::kInterpolatorPower - 3; ++d) {
      for (std::size_t j = 0; j < N; ++j) {
        double acc = 0.0;
        for (int r = 0; r < tab::kStagesExtended; ++r) acc += tab::D[d][r] * K[r][j];
        seg.F[3 + d][j] = h_used * acc;
      }
    }

    const double t_new = t + h_used;
    const StateT y_old = y;
    traj.append(t_new, y_new, seg);

    // Events on the accepted step.
    std::optional<EventHit<N>> stop;
    auto dense = [&](double tt) { return seg.eval(tt, y_old); };
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g_new = events[e].g(t_new, y_new);
      const double g_old = g_prev[e];
      g_prev[e] = g_new;
      const bool up = g_old < 0.0 && g_new >= 0.0;
      const bool down = g_old > 0.0 && g_new <= 0.0;
      if (!(up || down)) continue;
      if ((events[e].direction > 0 && !up) || (events[e].direction < 0 && !down)) continue;
      const double te = detail::locate_event<N>(events[e].g, dense, t, g_old, t_new, g_new);
      EventHit<N> hit{e, te, dense(te)};
      res.hits.push_back(hit);
      if (events[e].terminal && (!stop || te < stop->t)) stop = hit;
    }
    if (stop) {
      const double ts = stop->t;
      std::erase_if(res.hits, [ts](const EventHit<N>& h) { return h.t > ts; });
      traj.truncate_last(stop->t, stop->y);
      res.terminated = true;
      return res;
    }
    t = t_new;
    y = y_new;
    fy = f_new;
  }
  if (t < t1) throw ConvergenceError("ode_solve: maximum number of steps exceeded");
  return res;
}

}  // namespace critball::numkit

#pragma once

// BFGS with a strong-Wolfe line search.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaugekit/error.hpp"

namespace gaugekit {

/// Returns f(x); fills *grad when non-null.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct OptimizerOptions {
  int max_iterations = 2000;
  double gtol = 1e-8;           // stop when |grad|_2 falls below
  double c1 = 1e-4, c2 = 0.9;   // Wolfe constants
  int max_line_search = 40;
};

struct OptimizerResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> history;  // best value after each iteration
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

namespace detail {

struct LinePoint {
  double a, f, d;  // step, value, directional derivative
  Eigen::VectorXd g;
};

// minimizer of the cubic through (a,fa,da),(b,fb,db), clamped into the bracket interior
inline double cubic_step(const LinePoint& lo, const LinePoint& hi) {
  const double d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (lo.a - hi.a);
  const double disc = d1 * d1 - lo.d * hi.d;
  double t = 0.5 * (lo.a + hi.a);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), hi.a - lo.a);
    const double denom = hi.d - lo.d + 2.0 * d2;
    if (denom != 0.0) t = hi.a - (hi.a - lo.a) * (hi.d + d2 - d1) / denom;
  }
  const double left = std::min(lo.a, hi.a), right = std::max(lo.a, hi.a), w = right - left;
  if (!std::isfinite(t) || t < left + 0.1 * w || t > right - 0.1 * w) t = 0.5 * (lo.a + hi.a);
  return t;
}

}  // namespace detail

inline OptimizerResult bfgs(const Objective& fn, Eigen::VectorXd x0, const OptimizerOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  OptimizerResult r;
  auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    ++r.evaluations;
    const double f = fn(x, &g);
    if (!std::isfinite(f) || !g.allFinite()) throw NonFiniteError("optimizer: non-finite objective or gradient");
    return f;
  };

  Eigen::VectorXd x = std::move(x0), g(n);
  double f = eval(x, g);
  r.x = x;
  r.value = f;
  r.gradient_norm = g.norm();
  if (n == 0 || r.gradient_norm < opt.gtol) {
    r.converged = true;
    r.status = "converged";
    return r;
  }
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool first = true;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::VectorXd p = -hinv * g;
    double d0 = g.dot(p);
    if (!(d0 < 0.0)) {  // lost descent: restart curvature
      hinv.setIdentity();
      p = -g;
      d0 = -g.squaredNorm();
    }
    const detail::LinePoint start{0.0, f, d0, g};
    double a = first ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;

    auto probe = [&](double step) {
      detail::LinePoint q{step, 0.0, 0.0, Eigen::VectorXd(n)};
      q.f = eval(x + step * p, q.g);
      q.d = q.g.dot(p);
      return q;
    };
    // rounding allowance on f, otherwise steps near the optimum tie and get rejected
    const double noise = 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    auto armijo = [&](const detail::LinePoint& q) { return q.f <= f + opt.c1 * q.a * d0 + noise; };
    auto curvature = [&](const detail::LinePoint& q) {
      return std::abs(q.d) <= -opt.c2 * d0 || q.g.norm() < opt.gtol;
    };

    std::optional<detail::LinePoint> accepted;
    auto zoom = [&](detail::LinePoint lo, detail::LinePoint hi) {
      for (int k = 0; k < opt.max_line_search; ++k) {
        const auto q = probe(detail::cubic_step(lo, hi));
        if (!armijo(q) || q.f > lo.f + noise) {
          hi = q;
        } else {
          if (curvature(q)) return std::optional<detail::LinePoint>(q);
          if (q.d * (hi.a - lo.a) >= 0.0) hi = lo;
          lo = q;
        }
        if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, std::abs(lo.a))) break;
      }
      // best sufficient-decrease point found
      return lo.a > 0.0 ? std::optional<detail::LinePoint>(lo) : std::nullopt;
    };

    detail::LinePoint prev = start;
    for (int k = 0; k < opt.max_line_search && !accepted; ++k) {
      const auto q = probe(a);
      if (!armijo(q) || (k > 0 && q.f > prev.f + noise)) {
        accepted = zoom(prev, q);
        break;
      }
      if (curvature(q)) {
        accepted = q;
        break;
      }
      if (q.d >= 0.0) {
        accepted = zoom(q, prev);
        break;
      }
      prev = q;
      a *= 2.0;
    }

    r.iterations = it;
    if (!accepted) {
      r.status = "line search failed";
      r.history.push_back(r.history.empty() ? r.value : r.history.back());
      break;
    }
    const Eigen::VectorXd s = accepted->a * p;
    const Eigen::VectorXd y = accepted->g - g;
    const double f_old = f;
    x += s;
    f = accepted->f;
    g = accepted->g;
    // ties at rounding level go to the smaller gradient
    if (f < r.value || (f <= r.value + noise && g.norm() < r.gradient_norm)) {
      r.value = f;
      r.x = x;
      r.gradient_norm = g.norm();
    }
    r.history.push_back(r.history.empty() ? std::min(r.value, start.f) : std::min(r.history.back(), f));
    if (g.norm() < opt.gtol) {
      r.converged = true;
      r.status = "converged";
      break;
    }
    if (std::abs(f_old - f) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f))
        && s.norm() <= 1e-14 * std::max(1.0, x.norm())) {
      r.status = "no progress";
      break;
    }
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (first) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      hinv = v * hinv * v.transpose() + rho * s * s.transpose();
    }
    first = false;
  }
  if (r.status.empty()) r.status = "iteration limit";
  return r;
}

}  // namespace gaugekit

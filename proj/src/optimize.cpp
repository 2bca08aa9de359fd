#include "renyisc/optimize.hpp"

#include <cmath>

namespace renyisc {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

}  // namespace

BfgsResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options,
                         const std::function<bool(Eigen::VectorXd&)>& renormalize) {
  const Eigen::Index n = x0.size();
  BfgsResult r;
  r.x = std::move(x0);
  Eigen::VectorXd g(n);
  r.value = f(r.x, &g);
  r.gradient_norm = g.norm();
  if (n == 0 || r.gradient_norm <= options.gradient_tolerance) {
    r.converged = true;
    return r;
  }

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  int small_steps = 0;
  Eigen::VectorXd g_new(n);
  for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
    Eigen::VectorXd p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
      fresh = true;
    }
    // First step of a fresh model: keep the trial displacement O(1).
    double step = fresh ? std::min(1.0, 1.0 / std::max(p.norm(), 1e-300)) : 1.0;
    double f_new = 0.0;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      x_new = r.x + step * p;
      f_new = f(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= r.value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) {
        // No descent possible along -grad at working precision.
        r.converged = true;
        return r;
      }
      hinv.setIdentity();
      fresh = true;
      continue;
    }

    const Eigen::VectorXd s = x_new - r.x;
    const Eigen::VectorXd y = g_new - g;
    const double change = r.value - f_new;
    r.x = std::move(x_new);
    r.value = f_new;
    g = g_new;
    r.gradient_norm = g.norm();

    if (renormalize && renormalize(r.x)) {
      r.value = f(r.x, &g);
      r.gradient_norm = g.norm();
      hinv.setIdentity();
      fresh = true;
    } else {
      const double sy = s.dot(y);
      if (sy > 1e-14 * s.norm() * y.norm()) {
        if (fresh) hinv *= sy / y.squaredNorm();
        const double rho = 1.0 / sy;
        const Eigen::VectorXd hy = hinv * y;
        hinv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
        fresh = false;
      }
    }

    if (r.gradient_norm <= options.gradient_tolerance) {
      r.converged = true;
      ++r.iterations;
      return r;
    }
    small_steps = (std::abs(change) <= options.value_tolerance) ? small_steps + 1 : 0;
    if (small_steps >= 2) {
      r.converged = true;
      ++r.iterations;
      return r;
    }
  }
  return r;
}

}  // namespace renyisc

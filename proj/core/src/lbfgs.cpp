#include "eed/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "eed/error.hpp"

namespace eed {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Correction {
  std::vector<double> s;  // x_{k+1} - x_k
  std::vector<double> y;  // g_{k+1} - g_k
  double rho = 0.0;       // 1 / (y . s)
};

}  // namespace

LbfgsReport lbfgs_minimize(const ObjectiveFn& objective, std::span<double> w,
                           const LbfgsOptions& options) {
  const size_t dim = w.size();
  LbfgsReport report;

  std::vector<double> grad(dim, 0.0);
  double f = objective(w, grad);
  if (!std::isfinite(f)) fail("objective is not finite at the initial point");
  report.objective_trace.push_back(f);
  report.gradient_inf_norm = inf_norm(grad);

  std::deque<Correction> history;
  std::vector<double> direction(dim), w_next(dim), grad_next(dim);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (report.gradient_inf_norm < options.gradient_tolerance) {
      report.converged = true;
      break;
    }

    // Two-loop recursion: direction = -H * grad.
    std::copy(grad.begin(), grad.end(), direction.begin());
    std::vector<double> alpha(history.size());
    for (size_t i = history.size(); i-- > 0;) {
      const auto& c = history[i];
      alpha[i] = c.rho * dot(c.s, direction);
      for (size_t j = 0; j < dim; ++j) direction[j] -= alpha[i] * c.y[j];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double yy = dot(last.y, last.y);
      if (yy > 0) {
        const double gamma = dot(last.s, last.y) / yy;
        for (double& d : direction) d *= gamma;
      }
    }
    for (size_t i = 0; i < history.size(); ++i) {
      const auto& c = history[i];
      const double beta = c.rho * dot(c.y, direction);
      for (size_t j = 0; j < dim; ++j) direction[j] += (alpha[i] - beta) * c.s[j];
    }
    for (double& d : direction) d = -d;

    double dg = dot(direction, grad);
    if (!(dg < 0)) {
      // not a descent direction: fall back to steepest descent
      for (size_t j = 0; j < dim; ++j) direction[j] = -grad[j];
      dg = -dot(grad, grad);
      history.clear();
      if (!(dg < 0)) break;  // zero gradient
    }

    // Backtracking Armijo line search.
    double step = history.empty() ? std::min(1.0, 1.0 / std::max(1e-12, inf_norm(grad)))
                                  : 1.0;
    double f_next = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (size_t j = 0; j < dim; ++j) w_next[j] = w[j] + step * direction[j];
      f_next = objective(w_next, grad_next);
      if (std::isfinite(f_next) && f_next <= f + options.armijo_c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // numerically stuck; keep the best point found

    Correction c;
    c.s.resize(dim);
    c.y.resize(dim);
    for (size_t j = 0; j < dim; ++j) {
      c.s[j] = w_next[j] - w[j];
      c.y[j] = grad_next[j] - grad[j];
    }
    const double ys = dot(c.y, c.s);
    if (ys > 1e-12) {
      c.rho = 1.0 / ys;
      history.push_back(std::move(c));
      if (history.size() > static_cast<size_t>(options.memory)) history.pop_front();
    }

    std::copy(w_next.begin(), w_next.end(), w.begin());
    std::swap(grad, grad_next);
    f = f_next;
    report.objective_trace.push_back(f);
    report.gradient_inf_norm = inf_norm(grad);
    report.iterations = iter + 1;
  }

  if (report.gradient_inf_norm < options.gradient_tolerance) report.converged = true;
  report.final_objective = f;
  return report;
}

}  // namespace eed

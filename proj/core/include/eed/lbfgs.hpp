#pragma once

#include <functional>
#include <span>
#include <vector>

namespace eed {

/// Objective callback: writes the gradient at w into `grad` and returns f(w).
using ObjectiveFn = std::function<double(std::span<const double> w, std::span<double> grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;  // on the gradient infinity norm
  int max_line_search = 50;
  double armijo_c1 = 1e-4;
};

struct LbfgsReport {
  int iterations = 0;
  double final_objective = 0.0;
  double gradient_inf_norm = 0.0;
  bool converged = false;
  /// Objective after every accepted step, starting with the initial value.
  std::vector<double> objective_trace;
};

/// Limited-memory BFGS minimization with Armijo backtracking line search.
/// `w` holds the initial point and receives the final one. Deterministic:
/// identical inputs produce identical iterates.
LbfgsReport lbfgs_minimize(const ObjectiveFn& objective, std::span<double> w,
                           const LbfgsOptions& options = {});

}  // namespace eed

#pragma once

#include <Eigen/Dense>
#include <string>

#include "pmgt/errors.hpp"
#include "pmgt/problem.hpp"

namespace pmgt {

// Centralized minimizer of h = f + r with its optimal value.
struct ReferenceSolution {
  Eigen::VectorXd x_star;
  double h_star = 0.0;
  std::string method;
  long iterations = 0;
};

// Proximal gradient on the averaged objective with step 1/L, iterated until
// the fixed-point residual |x - prox(x - grad/L)| drops below tol.
inline ReferenceSolution solve_reference(const Problem& p, double tol = 1e-12,
                                         long max_iterations = 10'000'000) {
  if (!(p.strong_convexity > 0))
    throw input_error("solve_reference: problem must be strongly convex");
  const double eta = 1.0 / p.smoothness;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p.d);
  double residual = 0.0;
  for (long it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd next = p.reg.prox(x - eta * p.average_grad(x), eta);
    residual = (next - x).norm();
    x = std::move(next);
    if (residual <= tol) {
      const double h_star = p.composite_value(x);
      return {std::move(x), h_star, "proximal_gradient", it + 1};
    }
  }
  throw convergence_error("solve_reference: residual " + std::to_string(residual) +
                          " above tol after " + std::to_string(max_iterations) + " iterations");
}

}  // namespace pmgt

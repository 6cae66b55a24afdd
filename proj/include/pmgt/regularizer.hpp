#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "pmgt/errors.hpp"
#include "pmgt/field.hpp"

namespace pmgt {

// Coordinate-wise soft thresholding, the closed-form prox of t * |.|_1.
inline Eigen::VectorXd prox_l1(const Eigen::VectorXd& x, double threshold) {
  if (threshold < 0) throw input_error("prox_l1: threshold must be >= 0");
  return x.array().sign() * (x.array().abs() - threshold).max(0.0);
}

enum class RegKind { none, l1 };

// Non-smooth convex term r(x) with value and prox oracles.
struct Regularizer {
  RegKind kind = RegKind::none;
  double scale = 0.0;  // c in r(x) = c * |x|_1

  static Regularizer none() { return {RegKind::none, 0.0}; }
  static Regularizer l1(double c) {
    if (c < 0) throw input_error("l1 regularizer scale must be >= 0");
    return {RegKind::l1, c};
  }

  double value(const Eigen::VectorXd& x) const {
    return kind == RegKind::l1 ? scale * x.lpNorm<1>() : 0.0;
  }

  // argmin_z r(z) + |z - x|^2 / (2 eta)
  Eigen::VectorXd prox(const Eigen::VectorXd& x, double eta) const {
    return kind == RegKind::l1 ? prox_l1(x, eta * scale) : x;
  }
};

// Row i of the output is prox_{eta,r}(row i of the input): the aggregated
// operator decomposes row-wise, so it is applied exactly that way.
inline AgentField aggregated_prox(const AgentField& x, double eta, const Regularizer& r) {
  AgentField out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out.row(i) = r.prox(x.row(i).transpose(), eta).transpose();
  return out;
}

}  // namespace pmgt

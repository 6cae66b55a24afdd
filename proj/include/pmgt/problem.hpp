#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "pmgt/errors.hpp"
#include "pmgt/regularizer.hpp"

namespace pmgt {

enum class LossKind { logistic, least_squares };

inline std::string to_string(LossKind k) {
  return k == LossKind::logistic ? "logistic" : "least_squares";
}

namespace detail {

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// 1 / (1 + exp(-z)) without overflow.
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

// Finite-sum problem over m agents with n samples each:
//   h(x) = (1/m) sum_i (1/n) sum_j f_{i,j}(x) + r(x)
// Component oracles plus the smoothness/strong-convexity pair (L, mu).
// L bounds every component gradient's Lipschitz constant; mu lower-bounds the
// strong convexity of the averaged smooth part.
class Problem {
 public:
  LossKind kind = LossKind::least_squares;
  std::vector<Eigen::MatrixXd> features;  // per agent, n x d
  std::vector<Eigen::VectorXd> labels;    // per agent, n
  double sigma = 0.0;                     // ridge coefficient
  double smoothness = 0.0;                // L
  double strong_convexity = 0.0;          // mu
  Regularizer reg;

  int m = 0, n = 0, d = 0;

  double component_value(int i, int j, const Eigen::VectorXd& x) const {
    const double z = features[i].row(j).dot(x);
    const double b = labels[i](j);
    const double ridge = 0.5 * sigma * x.squaredNorm();
    if (kind == LossKind::logistic) return detail::softplus(-b * z) + ridge;
    const double r = z - b;
    return 0.5 * r * r + ridge;
  }

  Eigen::VectorXd component_grad(int i, int j, const Eigen::VectorXd& x) const {
    const double z = features[i].row(j).dot(x);
    const double b = labels[i](j);
    if (kind == LossKind::logistic)
      return (-b * detail::sigmoid(-b * z)) * features[i].row(j).transpose() + sigma * x;
    return (z - b) * features[i].row(j).transpose() + sigma * x;
  }

  // nabla f_i(x) = (1/n) sum_j nabla f_{i,j}(x)
  Eigen::VectorXd local_full_grad(int i, const Eigen::VectorXd& x) const {
    Eigen::VectorXd margins = features[i] * x;
    Eigen::VectorXd coeff(n);
    if (kind == LossKind::logistic) {
      for (int j = 0; j < n; ++j) {
        const double b = labels[i](j);
        coeff(j) = -b * detail::sigmoid(-b * margins(j));
      }
    } else {
      coeff = margins - labels[i];
    }
    return features[i].transpose() * coeff / static_cast<double>(n) + sigma * x;
  }

  Eigen::VectorXd average_grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < m; ++i) g += local_full_grad(i, x);
    return g / static_cast<double>(m);
  }

  double average_loss(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd margins = features[i] * x;
      for (int j = 0; j < n; ++j) {
        const double b = labels[i](j);
        if (kind == LossKind::logistic)
          acc += detail::softplus(-b * margins(j));
        else
          acc += 0.5 * (margins(j) - b) * (margins(j) - b);
      }
    }
    return acc / static_cast<double>(m * n) + 0.5 * sigma * x.squaredNorm();
  }

  // h(x) = f(x) + r(x)
  double composite_value(const Eigen::VectorXd& x) const { return average_loss(x) + reg.value(x); }
};

inline double condition_number(const Problem& p) {
  if (!(p.strong_convexity > 0)) throw input_error("condition_number: problem is not strongly convex");
  return p.smoothness / p.strong_convexity;
}

namespace detail {

inline void check_partition_shape(const std::vector<Eigen::MatrixXd>& features,
                                  const std::vector<Eigen::VectorXd>& labels) {
  if (features.empty() || features.size() != labels.size())
    throw input_error("problem: per-agent features/labels mismatch");
  const auto n = features.front().rows();
  const auto d = features.front().cols();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].rows() != n || features[i].cols() != d || labels[i].size() != n)
      throw input_error("problem: agents must hold equally sized datasets");
  }
}

}  // namespace detail

// f_{i,j}(x) = log(1 + exp(-b <a, x>)) + (sigma/2) |x|^2.
// L = max |a|^2 / 4 + sigma; mu is taken as sigma (a valid lower bound).
inline Problem logistic_problem(std::vector<Eigen::MatrixXd> features,
                                std::vector<Eigen::VectorXd> labels, double sigma,
                                Regularizer reg = Regularizer::none()) {
  detail::check_partition_shape(features, labels);
  if (!(sigma > 0)) throw input_error("logistic_problem: sigma must be > 0 for strong convexity");
  Problem p;
  p.kind = LossKind::logistic;
  p.m = static_cast<int>(features.size());
  p.n = static_cast<int>(features.front().rows());
  p.d = static_cast<int>(features.front().cols());
  double max_sq = 0.0;
  for (int i = 0; i < p.m; ++i) {
    for (int j = 0; j < p.n; ++j) {
      const double b = labels[i](j);
      if (b != 1.0 && b != -1.0)
        throw input_error("logistic_problem: labels must be in {-1,+1}, got " +
                          std::to_string(b) + " (agent " + std::to_string(i) + ", sample " +
                          std::to_string(j) + ")");
      max_sq = std::max(max_sq, features[i].row(j).squaredNorm());
    }
  }
  p.features = std::move(features);
  p.labels = std::move(labels);
  p.sigma = sigma;
  p.smoothness = max_sq / 4.0 + sigma;
  p.strong_convexity = sigma;
  p.reg = reg;
  return p;
}

// f_{i,j}(x) = (<a, x> - b)^2 / 2 + (sigma/2) |x|^2.
// L = max |a|^2 + sigma; mu is the exact smallest eigenvalue of the averaged
// Hessian (1/mn) sum a a^T + sigma I.
inline Problem least_squares_problem(std::vector<Eigen::MatrixXd> features,
                                     std::vector<Eigen::VectorXd> labels, double sigma,
                                     Regularizer reg = Regularizer::none()) {
  detail::check_partition_shape(features, labels);
  if (sigma < 0) throw input_error("least_squares_problem: sigma must be >= 0");
  Problem p;
  p.kind = LossKind::least_squares;
  p.m = static_cast<int>(features.size());
  p.n = static_cast<int>(features.front().rows());
  p.d = static_cast<int>(features.front().cols());
  double max_sq = 0.0;
  Eigen::MatrixXd hessian = sigma * Eigen::MatrixXd::Identity(p.d, p.d);
  for (int i = 0; i < p.m; ++i) {
    for (int j = 0; j < p.n; ++j) max_sq = std::max(max_sq, features[i].row(j).squaredNorm());
    hessian += features[i].transpose() * features[i] / static_cast<double>(p.m * p.n);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian, Eigen::EigenvaluesOnly);
  p.features = std::move(features);
  p.labels = std::move(labels);
  p.sigma = sigma;
  p.smoothness = max_sq + sigma;
  p.strong_convexity = es.eigenvalues().minCoeff();
  p.reg = reg;
  return p;
}

// Concatenates all agents' samples into a single-agent problem (the
// centralized view of the same objective).
inline Problem pool_problem(const Problem& p) {
  Eigen::MatrixXd A(p.m * p.n, p.d);
  Eigen::VectorXd b(p.m * p.n);
  for (int i = 0; i < p.m; ++i) {
    A.middleRows(static_cast<Eigen::Index>(i) * p.n, p.n) = p.features[i];
    b.segment(static_cast<Eigen::Index>(i) * p.n, p.n) = p.labels[i];
  }
  Problem out = p;
  out.features = {std::move(A)};
  out.labels = {std::move(b)};
  out.m = 1;
  out.n = p.m * p.n;
  return out;
}

}  // namespace pmgt

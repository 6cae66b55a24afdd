#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "pmgt/errors.hpp"

namespace pmgt {

// An m x d matrix holding one d-vector per agent; row i belongs to agent i.
using AgentField = Eigen::MatrixXd;

// Replicates a single vector into all m rows.
inline AgentField replicate_rows(const Eigen::VectorXd& v, int m) {
  return Eigen::VectorXd::Ones(m) * v.transpose();
}

inline Eigen::VectorXd row_mean(const AgentField& x) {
  return x.colwise().mean().transpose();
}

// x - 1 * xbar^T, the disagreement component.
inline AgentField consensus_residual(const AgentField& x) {
  return x.rowwise() - x.colwise().mean();
}

inline void ensure_finite(const AgentField& x, const std::string& what) {
  if (!x.allFinite()) throw numerical_error(what + " produced non-finite values");
}

// Gossip-round counter. One round means one multiplication by W, i.e. every
// agent exchanges one d-vector with its neighbours. Owned by the (single
// threaded) driver; final counts must be exact regardless of scheduling.
struct CommBudget {
  std::uint64_t rounds_used = 0;
  void add(std::uint64_t rounds) { rounds_used += rounds; }
};

}  // namespace pmgt

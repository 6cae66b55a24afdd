#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmgt/estimators.hpp"
#include "pmgt/field.hpp"
#include "pmgt/problem.hpp"

namespace pmgt {

// z = [ |x - 1 xbar|^2 / m,  eta^2 |s - 1 sbar|^2 / m ]
inline std::pair<double, double> consensus_errors(const AgentField& x, const AgentField& s,
                                                  double eta) {
  const double m = static_cast<double>(x.rows());
  const double zx = consensus_residual(x).squaredNorm() / m;
  const double zs = eta * eta * consensus_residual(s).squaredNorm() / m;
  return {zx, zs};
}

// Gradients of every component at a fixed point, laid out like a SAGA table.
inline std::vector<Eigen::MatrixXd> component_grads_at(const Problem& p,
                                                       const Eigen::VectorXd& x) {
  std::vector<Eigen::MatrixXd> out(p.m);
  for (int i = 0; i < p.m; ++i) {
    out[i].resize(p.n, p.d);
    for (int j = 0; j < p.n; ++j) out[i].row(j) = p.component_grad(i, j, x).transpose();
  }
  return out;
}

// Mean squared distance of the stored anchor gradients from their values at
// the minimizer.
inline double delta_saga(const SagaState& state, const std::vector<Eigen::MatrixXd>& grads_at_star) {
  double acc = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < state.grad_table.size(); ++i) {
    acc += (state.grad_table[i] - grads_at_star[i]).squaredNorm();
    count += state.grad_table[i].rows();
  }
  return acc / static_cast<double>(count);
}

// Same quantity for LSVRG; evaluates every component gradient at the current
// reference points (instrumentation cost, excluded from eval counters).
inline double delta_lsvrg(const LsvrgState& state, const Problem& p,
                          const std::vector<Eigen::MatrixXd>& grads_at_star) {
  double acc = 0.0;
  for (int i = 0; i < p.m; ++i)
    for (int j = 0; j < p.n; ++j)
      acc += (p.component_grad(i, j, state.w[i]).transpose() - grads_at_star[i].row(j))
                 .squaredNorm();
  return acc / static_cast<double>(p.m * p.n);
}

// V = |xbar - x*|^2 + 4 n eta^2 Delta
inline double lyapunov(const Eigen::VectorXd& x_bar, const Eigen::VectorXd& x_star, double delta,
                       double eta, int n) {
  return (x_bar - x_star).squaredNorm() + 4.0 * n * eta * eta * delta;
}

// max( |x - 1 xbar|^2 / m, |xbar - x*|^2 ) < eps, strictly.
inline bool epsilon_reached(const AgentField& x, const Eigen::VectorXd& x_star, double eps) {
  const double zx = consensus_residual(x).squaredNorm() / static_cast<double>(x.rows());
  const double dist = (row_mean(x) - x_star).squaredNorm();
  return std::max(zx, dist) < eps;
}

// Per-iteration contraction factor max(1 - 1/(24 kappa), 1 - 1/(4 n)).
inline double theoretical_rate(double kappa, int n) {
  return std::max(1.0 - 1.0 / (24.0 * kappa), 1.0 - 1.0 / (4.0 * static_cast<double>(n)));
}

// Combined cost with communication weighted by tau (per-agent quantities).
inline double weighted_cost(double grad_evals, double comm_rounds, double tau) {
  return grad_evals + tau * comm_rounds;
}

// One recorded iteration. grad_evals counts component-gradient evaluations
// per agent (averaged across agents, so fractional for LSVRG); comm_rounds
// counts gossip rounds. Both are cumulative costs paid to REACH iterate t.
// Optional fields stay empty when the quantity is undefined for the run
// (no tracker, no variance-reduction memory, or no reference solution).
struct DiagnosticsRow {
  long t = 0;
  double consensus_x = 0.0;
  std::optional<double> consensus_s;
  std::optional<double> tracking_err;
  std::optional<double> delta;
  std::optional<double> lyapunov;
  std::optional<double> subopt;   // h(xbar) - h*; raw h(xbar) when no reference
  std::optional<double> dist_sq;  // |xbar - x*|^2
  double grad_evals = 0.0;
  std::uint64_t comm_rounds = 0;
};

struct RunSummary {
  std::string algorithm;
  int m = 0, n = 0, d = 0;
  double smoothness = 0.0, strong_convexity = 0.0, kappa = 0.0;
  double lambda2 = 0.0;
  int K = 0;
  double eta = 0.0, p_refresh = 0.0;
  int batch = 1;
  long T = 0;
  std::uint64_t seed = 0;
  bool has_reference = false;
};

struct RunRecord {
  RunSummary summary;
  std::vector<DiagnosticsRow> rows;
  AgentField final_x;
  long stop_iteration = 0;  // first index satisfying the epsilon rule, else T
};

}  // namespace pmgt

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <utility>
#include <vector>

#include "pmgt/consensus.hpp"
#include "pmgt/errors.hpp"
#include "pmgt/field.hpp"
#include "pmgt/problem.hpp"
#include "pmgt/rng.hpp"

namespace pmgt {

// A local estimator draw: the direction v_i plus its component-gradient cost.
struct Draw {
  Eigen::VectorXd v;
  long grad_evals = 0;
};

// Per-agent SAGA memory. grad_table stores the gradients at the anchor points
// (not the anchors themselves); table_mean caches the row average and is
// maintained incrementally.
struct SagaState {
  std::vector<Eigen::MatrixXd> grad_table;   // per agent, n x d
  std::vector<Eigen::VectorXd> table_mean;   // per agent, d

  // Fills every entry with the gradient at the agent's current iterate.
  // Costs n evaluations per agent; the caller accounts for them.
  static SagaState init(const Problem& p, const AgentField& x0) {
    SagaState s;
    s.grad_table.resize(p.m);
    s.table_mean.resize(p.m);
    for (int i = 0; i < p.m; ++i) {
      s.grad_table[i].resize(p.n, p.d);
      const Eigen::VectorXd xi = x0.row(i).transpose();
      for (int j = 0; j < p.n; ++j)
        s.grad_table[i].row(j) = p.component_grad(i, j, xi).transpose();
      s.table_mean[i] = s.grad_table[i].colwise().mean().transpose();
    }
    return s;
  }

  double worst_mean_drift() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < grad_table.size(); ++i) {
      const Eigen::VectorXd exact = grad_table[i].colwise().mean().transpose();
      worst = std::max(worst, (exact - table_mean[i]).norm());
    }
    return worst;
  }
};

// Per-agent loopless-SVRG memory: reference point w with its cached local
// full gradient, refreshed with probability p_refresh after each draw.
struct LsvrgState {
  std::vector<Eigen::VectorXd> w;
  std::vector<Eigen::VectorXd> full_grad_at_w;
  double p_refresh = 0.0;

  static LsvrgState init(const Problem& p, const AgentField& x0, double p_refresh) {
    if (!(p_refresh > 0.0 && p_refresh <= 1.0))
      throw input_error("lsvrg: refresh probability must lie in (0, 1]");
    LsvrgState s;
    s.p_refresh = p_refresh;
    s.w.resize(p.m);
    s.full_grad_at_w.resize(p.m);
    for (int i = 0; i < p.m; ++i) {
      s.w[i] = x0.row(i).transpose();
      s.full_grad_at_w[i] = p.local_full_grad(i, s.w[i]);
    }
    return s;
  }
};

namespace detail {

// Floyd's sampling: exactly `batch` rng draws, distinct indices, then sorted
// so gradient evaluation order is deterministic.
inline std::vector<int> sample_without_replacement(AgentRng& rng, int n, int batch) {
  std::vector<int> out;
  out.reserve(batch);
  for (int j = n - batch; j < n; ++j) {
    const int t = rng.next_index(j + 1);
    if (std::find(out.begin(), out.end(), t) != out.end())
      out.push_back(j);
    else
      out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// SAGA estimator: v = mean_k [ g_{j_k}(x) - table[j_k] ] + table_mean, then
// the sampled table entries are replaced with the fresh gradients. One
// component evaluation per sampled index.
inline Draw saga_draw(const Problem& p, int agent, const Eigen::VectorXd& x_i, SagaState& state,
                      AgentRng& rng, int batch = 1) {
  if (batch < 1 || batch > p.n) throw input_error("saga_draw: batch must lie in [1, n]");
  auto& table = state.grad_table[agent];
  auto& mean = state.table_mean[agent];
  const auto indices = detail::sample_without_replacement(rng, p.n, batch);
  const Eigen::VectorXd mean_before = mean;  // correction terms use the pre-draw table
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p.d);
  for (int j : indices) {
    const Eigen::VectorXd g = p.component_grad(agent, j, x_i);
    const Eigen::VectorXd diff = g - table.row(j).transpose();
    v += diff;
    mean += diff / static_cast<double>(p.n);
    table.row(j) = g.transpose();
  }
  v = v / static_cast<double>(batch) + mean_before;
  return {std::move(v), batch};
}

// LSVRG estimator: v = mean_k [ g_{j_k}(x) - g_{j_k}(w) ] + full_grad(w) with
// the current w; afterwards w is refreshed to x with probability p_refresh
// (compute-then-maybe-refresh; reversing the order changes the estimator).
// Costs 2 evaluations per sampled index plus n when the refresh fires.
inline Draw lsvrg_draw(const Problem& p, int agent, const Eigen::VectorXd& x_i, LsvrgState& state,
                       AgentRng& rng, int batch = 1) {
  if (batch < 1 || batch > p.n) throw input_error("lsvrg_draw: batch must lie in [1, n]");
  const auto indices = detail::sample_without_replacement(rng, p.n, batch);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p.d);
  for (int j : indices)
    v += p.component_grad(agent, j, x_i) - p.component_grad(agent, j, state.w[agent]);
  v = v / static_cast<double>(batch) + state.full_grad_at_w[agent];
  long evals = 2L * batch;
  if (rng.next_real() < state.p_refresh) {
    state.w[agent] = x_i;
    state.full_grad_at_w[agent] = p.local_full_grad(agent, x_i);
    evals += p.n;
  }
  return {std::move(v), evals};
}

// Plain stochastic gradient, one component per draw.
inline Draw sgd_draw(const Problem& p, int agent, const Eigen::VectorXd& x_i, AgentRng& rng) {
  const int j = rng.next_index(p.n);
  return {p.component_grad(agent, j, x_i), 1};
}

// Exact local gradient, n evaluations.
inline Draw full_gradient(const Problem& p, int agent, const Eigen::VectorXd& x_i) {
  return {p.local_full_grad(agent, x_i), p.n};
}

// Gradient tracking: s_new = FastMix(s_prev + v_new - v_prev, K). Preserves
// the identity mean(s) == mean(v) whenever it held at the previous step.
inline AgentField track_gradients(const AgentField& s_prev, const AgentField& v_new,
                                  const AgentField& v_prev, const GossipMatrix& W, int K,
                                  CommBudget& budget) {
  return fastmix(s_prev + v_new - v_prev, W, K, budget);
}

}  // namespace pmgt

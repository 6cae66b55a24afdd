#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "pmgt/errors.hpp"
#include "pmgt/field.hpp"
#include "pmgt/topology.hpp"

namespace pmgt {

// Chebyshev-accelerated gossip: x^{k+1} = (1+eta_w) W x^k - eta_w x^{k-1}
// with x^0 = x^{-1} = input, run for exactly K multiplications by W.
// Column sums (and so the network average) are preserved by every step.
inline AgentField fastmix(const AgentField& x, const GossipMatrix& W, int K, CommBudget& budget) {
  if (K < 1) throw input_error("fastmix: K must be >= 1");
  if (x.rows() != W.m) throw input_error("fastmix: field/matrix dimension mismatch");
  const double gap = std::sqrt(1.0 - W.lambda2 * W.lambda2);
  const double eta_w = (1.0 - gap) / (1.0 + gap);  // 0 when lambda2 == 0
  AgentField prev = x;
  AgentField cur = x;
  for (int k = 0; k < K; ++k) {
    AgentField next = (1.0 + eta_w) * (W.weights * cur) - eta_w * prev;
    if (!next.allFinite())
      throw numerical_error("fastmix: non-finite values at round " + std::to_string(k));
    prev = std::move(cur);
    cur = std::move(next);
  }
  budget.add(static_cast<std::uint64_t>(K));
  return cur;
}

// One plain gossip round x <- W x. Used by the DSGD / GT-DSGD baselines.
inline AgentField gossip_once(const AgentField& x, const GossipMatrix& W, CommBudget& budget) {
  if (x.rows() != W.m) throw input_error("gossip_once: field/matrix dimension mismatch");
  budget.add(1);
  return W.weights * x;
}

// K = ceil( ln(41 max(24 kappa, 4 n)) / sqrt(1 - lambda2) ), clamped to [1, 1e6].
inline int choose_K(double lambda2, double kappa, int n) {
  if (!(lambda2 < 1.0)) throw topology_error("choose_K: lambda2 must be < 1");
  const double raw = std::log(41.0 * std::max(24.0 * kappa, 4.0 * static_cast<double>(n))) /
                     std::sqrt(1.0 - lambda2);
  const double clamped = std::min(std::max(std::ceil(raw), 1.0), 1e6);
  return static_cast<int>(clamped);
}

}  // namespace pmgt

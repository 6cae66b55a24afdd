#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmgt/errors.hpp"
#include "pmgt/rng.hpp"

namespace pmgt {

// Undirected simple graph on m nodes.
struct Adjacency {
  int m = 0;
  std::set<std::pair<int, int>> edges;  // pairs stored with first < second

  void add_edge(int i, int j) {
    if (i == j) throw input_error("self-loop rejected: (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
    edges.emplace(std::min(i, j), std::max(i, j));
  }

  std::vector<int> component_of(int start) const {
    std::vector<char> seen(m, 0);
    std::vector<int> stack{start}, comp;
    seen[start] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (const auto& [a, b] : edges) {
        int v = (a == u) ? b : (b == u ? a : -1);
        if (v >= 0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    return comp;
  }

  bool connected() const {
    if (m <= 1) return true;
    return static_cast<int>(component_of(0).size()) == m;
  }
};

// Symmetric doubly-stochastic mixing matrix with its mixing rate cached.
// lambda2 is the second-largest singular value of weights.
struct GossipMatrix {
  Eigen::MatrixXd weights;
  double lambda2 = 0.0;
  int m = 0;
};

// Second-largest singular value. For the symmetric matrices handled here the
// singular values are the absolute eigenvalues.
inline double mixing_rate(const Eigen::MatrixXd& W) {
  if (W.rows() <= 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
  Eigen::VectorXd abs_ev = es.eigenvalues().cwiseAbs();
  std::sort(abs_ev.data(), abs_ev.data() + abs_ev.size(), std::greater<double>());
  return abs_ev(1);
}

inline double mixing_rate(const GossipMatrix& W) { return mixing_rate(W.weights); }

// Per-condition report for the gossip-matrix assumptions:
// symmetry, row stochasticity, 0 <= W <= I, and simplicity of the eigenvalue 1.
struct GossipValidation {
  struct Check {
    std::string name;
    bool pass = false;
    double violation = 0.0;  // measured magnitude of the worst violation
  };
  Check symmetric;
  Check row_stochastic;
  Check spectrum_in_unit_interval;
  Check unit_eigenvalue_simple;

  bool all_pass() const {
    return symmetric.pass && row_stochastic.pass && spectrum_in_unit_interval.pass &&
           unit_eigenvalue_simple.pass;
  }
  std::string to_string() const {
    std::ostringstream os;
    for (const Check* c :
         {&symmetric, &row_stochastic, &spectrum_in_unit_interval, &unit_eigenvalue_simple})
      os << c->name << ": " << (c->pass ? "pass" : "FAIL") << " (violation " << c->violation
         << ")\n";
    return os.str();
  }
};

inline GossipValidation validate_gossip(const Eigen::MatrixXd& W) {
  GossipValidation r;
  const double sym = (W - W.transpose()).cwiseAbs().maxCoeff();
  r.symmetric = {"symmetric", sym <= 1e-12, sym};

  const double row = (W.rowwise().sum().array() - 1.0).abs().maxCoeff();
  r.row_stochastic = {"row sums equal 1", row <= 1e-12, row};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double spectrum_violation = std::max(std::max(-lo, hi - 1.0), 0.0);
  r.spectrum_in_unit_interval = {"0 <= W <= I", spectrum_violation <= 1e-10, spectrum_violation};

  const double l2 = mixing_rate(W);
  r.unit_eigenvalue_simple = {"null(I - W) = span(1)", l2 < 1.0 - 1e-10, l2};
  return r;
}

namespace detail {

inline GossipMatrix finish_gossip(Eigen::MatrixXd W) {
  GossipMatrix g;
  g.m = static_cast<int>(W.rows());
  g.lambda2 = mixing_rate(W);
  g.weights = std::move(W);
  return g;
}

}  // namespace detail

// W = I - L / lambda1(L) for the combinatorial Laplacian L of a connected graph.
inline GossipMatrix build_from_laplacian(const Adjacency& adj) {
  if (adj.m < 1) throw input_error("build_from_laplacian: need at least one node");
  if (adj.m == 1) return {Eigen::MatrixXd::Ones(1, 1), 0.0, 1};
  if (!adj.connected()) {
    auto comp = adj.component_of(0);
    std::ostringstream os;
    os << "disconnected graph: component {";
    for (std::size_t i = 0; i < comp.size(); ++i) os << (i ? "," : "") << comp[i];
    os << "} of size " << comp.size() << " is isolated from the remaining " << adj.m - comp.size()
       << " node(s)";
    throw topology_error(os.str());
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(adj.m, adj.m);
  for (const auto& [i, j] : adj.edges) {
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
    L(i, i) += 1.0;
    L(j, j) += 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  const double lam1 = es.eigenvalues().maxCoeff();
  Eigen::MatrixXd W = Eigen::MatrixXd::Identity(adj.m, adj.m) - L / lam1;
  W = 0.5 * (W + W.transpose());  // scrub rounding asymmetry
  auto g = detail::finish_gossip(std::move(W));
  auto rep = validate_gossip(g.weights);
  if (!rep.all_pass())
    throw topology_error("build_from_laplacian produced an invalid gossip matrix:\n" +
                         rep.to_string());
  return g;
}

inline Adjacency complete_graph(int m) {
  Adjacency a;
  a.m = m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) a.add_edge(i, j);
  return a;
}

inline Adjacency ring_graph(int m) {
  Adjacency a;
  a.m = m;
  if (m >= 2)
    for (int i = 0; i < m; ++i) a.add_edge(i, (i + 1) % m);
  return a;
}

inline Adjacency path_graph(int m) {
  Adjacency a;
  a.m = m;
  for (int i = 0; i + 1 < m; ++i) a.add_edge(i, i + 1);
  return a;
}

// Agent i is linked to (i +- 2^k) mod m for every 2^k <= m - 1; weights are
// uniform 1/(deg+1) over self plus neighbours. Note: for some m this matrix
// has small negative eigenvalues, so it is row-stochastic and symmetric but
// not positive semidefinite; lambda2 is still its second singular value and
// is computed numerically, never from a closed form.
inline GossipMatrix build_exp2_ring(int m) {
  if (m < 1) throw input_error("build_exp2_ring: need at least one node");
  if (m == 1) return {Eigen::MatrixXd::Ones(1, 1), 0.0, 1};
  std::vector<std::set<int>> nb(m);
  for (std::int64_t hop = 1; hop <= m - 1; hop *= 2) {
    for (int i = 0; i < m; ++i) {
      nb[i].insert(static_cast<int>((i + hop) % m));
      nb[i].insert(static_cast<int>(((i - hop) % m + m) % m));
    }
  }
  const double w = 1.0 / (static_cast<double>(nb[0].size()) + 1.0);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    W(i, i) = w;
    for (int j : nb[i]) W(i, j) = w;
  }
  auto g = detail::finish_gossip(std::move(W));
  if (g.lambda2 >= 1.0 - 1e-10)
    throw topology_error("exp2-ring mixing rate is not strictly below 1");
  return g;
}

// Random simple graph; resamples until connected. Deterministic in seed.
inline Adjacency build_erdos_renyi(int m, double edge_prob, std::uint64_t seed,
                                   int max_retries = 1000) {
  if (m < 2) throw input_error("build_erdos_renyi: need m >= 2");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0))
    throw input_error("build_erdos_renyi: edge_prob must lie in (0, 1]");
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    AgentRng rng(seed, static_cast<std::uint64_t>(attempt));
    Adjacency a;
    a.m = m;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (rng.next_real() < edge_prob) a.add_edge(i, j);
    if (a.connected()) return a;
  }
  throw topology_error("erdos_renyi: no connected sample after " + std::to_string(max_retries) +
                       " attempts; increase edge_prob");
}

// Strictly validated user-supplied weights.
inline GossipMatrix gossip_from_weights(Eigen::MatrixXd W) {
  if (W.rows() != W.cols()) throw input_error("gossip matrix must be square");
  auto rep = validate_gossip(W);
  if (!rep.all_pass()) throw topology_error("invalid gossip matrix:\n" + rep.to_string());
  return detail::finish_gossip(std::move(W));
}

}  // namespace pmgt

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmgt/consensus.hpp"
#include "pmgt/errors.hpp"
#include "pmgt/estimators.hpp"
#include "pmgt/field.hpp"
#include "pmgt/metrics.hpp"
#include "pmgt/problem.hpp"
#include "pmgt/reference.hpp"
#include "pmgt/regularizer.hpp"
#include "pmgt/rng.hpp"
#include "pmgt/topology.hpp"

namespace pmgt {

enum class Algorithm {
  pmgt_saga,
  pmgt_lsvrg,
  dsgd,
  gt_dsgd,
  decentralized_prox_fullgrad,
  centralized_saga,
  centralized_lsvrg,
};

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::pmgt_saga: return "pmgt_saga";
    case Algorithm::pmgt_lsvrg: return "pmgt_lsvrg";
    case Algorithm::dsgd: return "dsgd";
    case Algorithm::gt_dsgd: return "gt_dsgd";
    case Algorithm::decentralized_prox_fullgrad: return "decentralized_prox_fullgrad";
    case Algorithm::centralized_saga: return "centralized_saga";
    case Algorithm::centralized_lsvrg: return "centralized_lsvrg";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  for (Algorithm a : {Algorithm::pmgt_saga, Algorithm::pmgt_lsvrg, Algorithm::dsgd,
                      Algorithm::gt_dsgd, Algorithm::decentralized_prox_fullgrad,
                      Algorithm::centralized_saga, Algorithm::centralized_lsvrg})
    if (to_string(a) == s) return a;
  throw input_error("unknown algorithm: " + s);
}

struct RunConfig {
  Algorithm algorithm = Algorithm::pmgt_saga;
  double eta = 0.0;     // <= 0 resolves to 1/(12 L)
  int K = 0;            // <= 0 resolves via choose_K (pmgt family only)
  double p = 0.0;       // <= 0 resolves to 1/n (lsvrg only)
  long T = 0;
  std::uint64_t seed = 0;
  int batch = 1;
  long record_every = 1;
  double epsilon = 0.0;  // > 0: stop once the epsilon rule holds (needs a reference)
};

inline bool is_pmgt(Algorithm a) {
  return a == Algorithm::pmgt_saga || a == Algorithm::pmgt_lsvrg ||
         a == Algorithm::decentralized_prox_fullgrad;
}

inline bool is_centralized(Algorithm a) {
  return a == Algorithm::centralized_saga || a == Algorithm::centralized_lsvrg;
}

// Fills eta/K/p defaults and validates ranges.
inline RunConfig resolve(const Problem& p, const GossipMatrix& W, RunConfig c) {
  if (c.T < 0) throw input_error("run config: T must be >= 0");
  if (c.record_every < 1) throw input_error("run config: record_every must be >= 1");
  const int n_eff = is_centralized(c.algorithm) ? p.m * p.n : p.n;
  if (c.batch < 1 || c.batch > n_eff) throw input_error("run config: batch must lie in [1, n]");
  if (c.eta <= 0.0) c.eta = 1.0 / (12.0 * p.smoothness);
  if (is_pmgt(c.algorithm)) {
    if (c.K <= 0) c.K = choose_K(W.lambda2, condition_number(p), p.n);
  } else {
    c.K = 0;
  }
  if (c.algorithm == Algorithm::pmgt_lsvrg || c.algorithm == Algorithm::centralized_lsvrg) {
    if (c.p <= 0.0) c.p = 1.0 / static_cast<double>(n_eff);
    if (c.p > 1.0) throw input_error("run config: p must lie in (0, 1]");
  } else {
    c.p = 0.0;
  }
  return c;
}

// Full mutable state of a decentralized run.
struct IterationState {
  AgentField x;       // iterates, one row per agent
  AgentField s;       // gradient trackers
  AgentField v_prev;  // local estimators from the previous iteration
  std::optional<SagaState> saga;
  std::optional<LsvrgState> lsvrg;
  CommBudget budget;
  long grad_evals_total = 0;  // summed over agents
  RngStreams rng{0, 0};
};

// x^0 = 0 for every agent; v^{-1} = s^{-1} = nabla F(x^0) for the pmgt
// family. Filling the SAGA table (or the LSVRG cache) and forming nabla F
// reuse the same n evaluations per agent, so init costs n per agent.
inline IterationState init_state(const Problem& p, const GossipMatrix& W, const RunConfig& cfg) {
  (void)W;
  IterationState st;
  st.x = AgentField::Zero(p.m, p.d);
  st.rng = RngStreams(cfg.seed, p.m);
  switch (cfg.algorithm) {
    case Algorithm::pmgt_saga: {
      st.saga = SagaState::init(p, st.x);
      st.v_prev.resize(p.m, p.d);
      for (int i = 0; i < p.m; ++i) st.v_prev.row(i) = st.saga->table_mean[i].transpose();
      st.s = st.v_prev;
      st.grad_evals_total = static_cast<long>(p.m) * p.n;
      break;
    }
    case Algorithm::pmgt_lsvrg: {
      st.lsvrg = LsvrgState::init(p, st.x, cfg.p);
      st.v_prev.resize(p.m, p.d);
      for (int i = 0; i < p.m; ++i) st.v_prev.row(i) = st.lsvrg->full_grad_at_w[i].transpose();
      st.s = st.v_prev;
      st.grad_evals_total = static_cast<long>(p.m) * p.n;
      break;
    }
    case Algorithm::decentralized_prox_fullgrad: {
      st.v_prev.resize(p.m, p.d);
      for (int i = 0; i < p.m; ++i)
        st.v_prev.row(i) = p.local_full_grad(i, st.x.row(i).transpose()).transpose();
      st.s = st.v_prev;
      st.grad_evals_total = static_cast<long>(p.m) * p.n;
      break;
    }
    case Algorithm::dsgd: {
      st.s = AgentField::Zero(p.m, p.d);
      st.v_prev = AgentField::Zero(p.m, p.d);
      break;
    }
    case Algorithm::gt_dsgd: {
      st.v_prev.resize(p.m, p.d);
      for (int i = 0; i < p.m; ++i) {
        auto dr = sgd_draw(p, i, st.x.row(i).transpose(), st.rng.agent(i));
        st.v_prev.row(i) = dr.v.transpose();
        st.grad_evals_total += dr.grad_evals;
      }
      st.s = st.v_prev;
      break;
    }
    default:
      throw input_error("init_state: centralized algorithms use CentralizedVr");
  }
  return st;
}

// One local estimator round: fills v (one row per agent) and counts evals.
inline AgentField draw_estimators(IterationState& st, const Problem& p, const RunConfig& cfg) {
  AgentField v(p.m, p.d);
  for (int i = 0; i < p.m; ++i) {
    const Eigen::VectorXd xi = st.x.row(i).transpose();
    Draw dr;
    switch (cfg.algorithm) {
      case Algorithm::pmgt_saga:
        dr = saga_draw(p, i, xi, *st.saga, st.rng.agent(i), cfg.batch);
        break;
      case Algorithm::pmgt_lsvrg:
        dr = lsvrg_draw(p, i, xi, *st.lsvrg, st.rng.agent(i), cfg.batch);
        break;
      case Algorithm::decentralized_prox_fullgrad:
        dr = full_gradient(p, i, xi);
        break;
      default:
        throw input_error("draw_estimators: not a pmgt-family algorithm");
    }
    v.row(i) = dr.v.transpose();
    st.grad_evals_total += dr.grad_evals;
  }
  return v;
}

// One PMGT-VR iteration: draw v^t, track s^t, then
// x^{t+1} = FastMix(prox_row(x^t - eta s^t), K). Costs exactly 2K rounds.
inline void pmgt_vr_step(IterationState& st, const Problem& p, const GossipMatrix& W,
                         const RunConfig& cfg) {
  AgentField v = draw_estimators(st, p, cfg);
  st.s = track_gradients(st.s, v, st.v_prev, W, cfg.K, st.budget);
  st.x = fastmix(aggregated_prox(st.x - cfg.eta * st.s, cfg.eta, p.reg), W, cfg.K, st.budget);
  st.v_prev = std::move(v);
}

// x^{t+1} = W x^t - eta * (one stochastic gradient per agent); one round.
// The descent term carries the stepsize even though some write-ups omit it.
inline void dsgd_step(IterationState& st, const Problem& p, const GossipMatrix& W,
                      const RunConfig& cfg) {
  AgentField g(p.m, p.d);
  for (int i = 0; i < p.m; ++i) {
    auto dr = sgd_draw(p, i, st.x.row(i).transpose(), st.rng.agent(i));
    g.row(i) = dr.v.transpose();
    st.grad_evals_total += dr.grad_evals;
  }
  st.x = gossip_once(st.x, W, st.budget) - cfg.eta * g;
  ensure_finite(st.x, "dsgd_step");
}

// Single-gossip gradient tracking with stochastic gradients; two rounds per
// iteration. v^t is stored so the tracker update telescopes and
// mean(s) == mean(v) is maintained exactly.
inline void gt_dsgd_step(IterationState& st, const Problem& p, const GossipMatrix& W,
                         const RunConfig& cfg) {
  st.x = gossip_once(st.x, W, st.budget) - cfg.eta * st.s;
  ensure_finite(st.x, "gt_dsgd_step");
  AgentField v(p.m, p.d);
  for (int i = 0; i < p.m; ++i) {
    auto dr = sgd_draw(p, i, st.x.row(i).transpose(), st.rng.agent(i));
    v.row(i) = dr.v.transpose();
    st.grad_evals_total += dr.grad_evals;
  }
  st.s = gossip_once(st.s, W, st.budget) + v - st.v_prev;
  st.v_prev = std::move(v);
}

// Straight-line centralized prox-SAGA / prox-LSVRG on the pooled dataset.
// Deliberately independent of the decentralized machinery (no FastMix, no
// tracking); shares only the rng draw protocol so trajectories can be
// compared against m = 1 decentralized runs.
class CentralizedVr {
 public:
  CentralizedVr(const Problem& pooled, const RunConfig& cfg)
      : p_(pooled), cfg_(cfg), rng_(cfg.seed, 1), x_(Eigen::VectorXd::Zero(pooled.d)) {
    if (pooled.m != 1) throw input_error("CentralizedVr: expected a pooled (m = 1) problem");
    const int n = p_.n;
    if (cfg_.algorithm == Algorithm::centralized_saga) {
      table_.resize(n, p_.d);
      for (int j = 0; j < n; ++j) table_.row(j) = p_.component_grad(0, j, x_).transpose();
      mean_ = table_.colwise().mean().transpose();
    } else if (cfg_.algorithm == Algorithm::centralized_lsvrg) {
      w_ = x_;
      full_grad_w_ = p_.local_full_grad(0, w_);
    } else {
      throw input_error("CentralizedVr: not a centralized algorithm");
    }
    grad_evals_ = n;
  }

  void step() {
    const int n = p_.n;
    Eigen::VectorXd v;
    if (cfg_.algorithm == Algorithm::centralized_saga) {
      const auto idx = detail::sample_without_replacement(rng_.agent(0), n, cfg_.batch);
      const Eigen::VectorXd mean_before = mean_;
      v = Eigen::VectorXd::Zero(p_.d);
      for (int j : idx) {
        const Eigen::VectorXd g = p_.component_grad(0, j, x_);
        const Eigen::VectorXd diff = g - table_.row(j).transpose();
        v += diff;
        mean_ += diff / static_cast<double>(n);
        table_.row(j) = g.transpose();
      }
      v = v / static_cast<double>(cfg_.batch) + mean_before;
      grad_evals_ += cfg_.batch;
    } else {
      const auto idx = detail::sample_without_replacement(rng_.agent(0), n, cfg_.batch);
      v = Eigen::VectorXd::Zero(p_.d);
      for (int j : idx) v += p_.component_grad(0, j, x_) - p_.component_grad(0, j, w_);
      v = v / static_cast<double>(cfg_.batch) + full_grad_w_;
      grad_evals_ += 2L * cfg_.batch;
      if (rng_.agent(0).next_real() < cfg_.p) {
        w_ = x_;
        full_grad_w_ = p_.local_full_grad(0, x_);
        grad_evals_ += n;
      }
    }
    x_ = p_.reg.prox(x_ - cfg_.eta * v, cfg_.eta);
    if (!x_.allFinite()) throw numerical_error("centralized step produced non-finite values");
  }

  const Eigen::VectorXd& iterate() const { return x_; }
  long grad_evals() const { return grad_evals_; }
  const Problem& pooled() const { return p_; }
  const Eigen::MatrixXd& saga_table() const { return table_; }
  const Eigen::VectorXd& lsvrg_w() const { return w_; }

 private:
  Problem p_;
  RunConfig cfg_;
  RngStreams rng_;
  Eigen::VectorXd x_;
  Eigen::MatrixXd table_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd w_, full_grad_w_;
  long grad_evals_ = 0;
};

// A failed run still carries the diagnostics recorded before the failure.
struct run_failure : numerical_error {
  RunRecord partial;
  run_failure(const std::string& msg, RunRecord rec)
      : numerical_error(msg), partial(std::move(rec)) {}
};

namespace detail {

struct Recorder {
  const Problem& p;
  const RunConfig& cfg;
  const ReferenceSolution* ref;
  const std::vector<Eigen::MatrixXd>* gstar;
  int m;

  DiagnosticsRow x_part(long t, const AgentField& x, const IterationState* st,
                        long grad_evals_total, std::uint64_t rounds) const {
    DiagnosticsRow row;
    row.t = t;
    row.consensus_x = consensus_residual(x).squaredNorm() / static_cast<double>(m);
    row.grad_evals = static_cast<double>(grad_evals_total) / static_cast<double>(m);
    row.comm_rounds = rounds;
    const Eigen::VectorXd xbar = row_mean(x);
    std::optional<double> delta;
    if (ref && gstar && st) {
      if (st->saga) delta = delta_saga(*st->saga, *gstar);
      if (st->lsvrg) delta = delta_lsvrg(*st->lsvrg, p, *gstar);
    }
    row.delta = delta;
    if (ref) {
      row.dist_sq = (xbar - ref->x_star).squaredNorm();
      row.subopt = p.composite_value(xbar) - ref->h_star;
      if (delta) row.lyapunov = lyapunov(xbar, ref->x_star, *delta, cfg.eta, p.n);
    } else {
      row.subopt = p.composite_value(xbar);  // raw value; plots subtract min
    }
    return row;
  }

  void s_part(DiagnosticsRow& row, const AgentField& x, const AgentField& s) const {
    auto [zx, zs] = consensus_errors(x, s, cfg.eta);
    (void)zx;
    row.consensus_s = zs;
    row.tracking_err = (row_mean(s) - p.average_grad(row_mean(x))).norm();
  }
};

inline RunRecord run_centralized(const Problem& p, RunConfig cfg, const ReferenceSolution* ref) {
  const Problem pooled = pool_problem(p);
  cfg.p = cfg.p <= 0 ? 1.0 / pooled.n : cfg.p;
  CentralizedVr solver(pooled, cfg);
  std::vector<Eigen::MatrixXd> gstar;
  if (ref) gstar = component_grads_at(pooled, ref->x_star);

  RunRecord rec;
  rec.summary = {to_string(cfg.algorithm), 1,   pooled.n, pooled.d,
                 pooled.smoothness,        pooled.strong_convexity,
                 condition_number(pooled), 0.0, 0,        cfg.eta,
                 cfg.p,                    cfg.batch,     cfg.T,
                 cfg.seed,                 ref != nullptr};
  auto record = [&](long t) {
    DiagnosticsRow row;
    row.t = t;
    row.consensus_x = 0.0;
    row.grad_evals = static_cast<double>(solver.grad_evals());
    row.comm_rounds = 0;
    const Eigen::VectorXd& x = solver.iterate();
    if (ref) {
      row.dist_sq = (x - ref->x_star).squaredNorm();
      row.subopt = pooled.composite_value(x) - ref->h_star;
      double delta = 0.0;
      if (cfg.algorithm == Algorithm::centralized_saga) {
        delta = (solver.saga_table() - gstar[0]).squaredNorm() / static_cast<double>(pooled.n);
      } else {
        for (int j = 0; j < pooled.n; ++j)
          delta += (pooled.component_grad(0, j, solver.lsvrg_w()).transpose() - gstar[0].row(j))
                       .squaredNorm();
        delta /= static_cast<double>(pooled.n);
      }
      row.delta = delta;
      row.lyapunov = lyapunov(x, ref->x_star, delta, cfg.eta, pooled.n);
    } else {
      row.subopt = pooled.composite_value(x);
    }
    rec.rows.push_back(row);
  };

  long stop = cfg.T;
  for (long t = 0; t < cfg.T; ++t) {
    if (cfg.epsilon > 0 && ref &&
        (solver.iterate() - ref->x_star).squaredNorm() < cfg.epsilon) {
      stop = t;
      break;
    }
    if (t % cfg.record_every == 0) record(t);
    solver.step();
  }
  record(stop);
  rec.stop_iteration = stop;
  rec.final_x = solver.iterate().transpose();
  return rec;
}

}  // namespace detail

// Runs T iterations of the configured algorithm, recording diagnostics every
// record_every iterations plus a final row. Deterministic in (config, seed).
// On numerical failure throws run_failure carrying the partial record.
inline RunRecord run(const Problem& p, const GossipMatrix& W, RunConfig cfg,
                     const ReferenceSolution* ref = nullptr,
                     const std::vector<Eigen::MatrixXd>* grads_at_star = nullptr) {
  cfg = resolve(p, W, cfg);
  if (is_centralized(cfg.algorithm)) return detail::run_centralized(p, cfg, ref);

  std::vector<Eigen::MatrixXd> gstar_local;
  if (ref && !grads_at_star &&
      (cfg.algorithm == Algorithm::pmgt_saga || cfg.algorithm == Algorithm::pmgt_lsvrg)) {
    gstar_local = component_grads_at(p, ref->x_star);
    grads_at_star = &gstar_local;
  }

  IterationState st = init_state(p, W, cfg);
  detail::Recorder recorder{p, cfg, ref, grads_at_star, p.m};

  RunRecord rec;
  rec.summary = {to_string(cfg.algorithm),
                 p.m,
                 p.n,
                 p.d,
                 p.smoothness,
                 p.strong_convexity,
                 condition_number(p),
                 W.lambda2,
                 cfg.K,
                 cfg.eta,
                 cfg.p,
                 cfg.batch,
                 cfg.T,
                 cfg.seed,
                 ref != nullptr};

  long stop = cfg.T;
  long t = 0;
  try {
    for (; t < cfg.T; ++t) {
      if (cfg.epsilon > 0 && ref && epsilon_reached(st.x, ref->x_star, cfg.epsilon)) {
        stop = t;
        break;
      }
      const bool recording = (t % cfg.record_every == 0);
      DiagnosticsRow row;
      if (recording)
        row = recorder.x_part(t, st.x, &st, st.grad_evals_total, st.budget.rounds_used);
      switch (cfg.algorithm) {
        case Algorithm::dsgd:
          dsgd_step(st, p, W, cfg);
          break;
        case Algorithm::gt_dsgd:
          // row t pairs x^t with s^t, both current before the step
          if (recording) recorder.s_part(row, st.x, st.s);
          gt_dsgd_step(st, p, W, cfg);
          break;
        default: {
          if (recording) {
            const AgentField x_snapshot = st.x;
            pmgt_vr_step(st, p, W, cfg);
            recorder.s_part(row, x_snapshot, st.s);  // s^t belongs to iterate x^t
          } else {
            pmgt_vr_step(st, p, W, cfg);
          }
        }
      }
      if (recording) rec.rows.push_back(row);
    }
  } catch (const numerical_error& e) {
    rec.final_x = st.x;
    throw run_failure(std::string(e.what()) + " [algorithm " + to_string(cfg.algorithm) +
                          ", iteration " + std::to_string(t) + "]",
                      std::move(rec));
  }

  DiagnosticsRow last =
      recorder.x_part(stop, st.x, &st, st.grad_evals_total, st.budget.rounds_used);
  if (cfg.algorithm != Algorithm::dsgd) recorder.s_part(last, st.x, st.s);
  rec.rows.push_back(last);
  rec.stop_iteration = stop;
  rec.final_x = st.x;
  return rec;
}

}  // namespace pmgt

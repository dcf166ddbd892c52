#include "dcg/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

namespace dcg {

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// handled by exactly one worker and writes only its own slot, so the result
// is independent of the thread count.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) guarded(i);
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Vector> neighbor_blocks(const Graph& g, const BlockVector& x, std::size_t i) {
  std::vector<Vector> out;
  out.reserve(g.degree(i));
  for (std::size_t j : g.neighbors(i)) out.emplace_back(x.block(j));
  return out;
}

BlockVector direction(const ConsensusProblem& p, const IterateState& st, double r,
                      bool composite) {
  if (st.x.block_count() != p.node_count() || st.x.block_dim() != p.block_dim())
    throw DimensionError("iterate shape does not match the problem");
  BlockVector g(p.node_count(), p.block_dim());
  for (std::size_t i = 0; i < p.node_count(); ++i) {
    const Vector own = st.x.block(i);
    const auto nbrs = neighbor_blocks(p.graph(), st.x, i);
    g.block(i) = node_direction({own, nbrs, p.objective(i), composite ? &p.y_set(i) : nullptr}, r);
  }
  return g;
}

IterateState advance(const ConsensusProblem& p, const IterateState& st, const SolverConfig& cfg,
                     bool composite, StepStats* stats, const RunHooks* hooks) {
  if (st.k < 1) throw DomainError("iteration counter must start at 1");
  if (st.x.block_count() != p.node_count() || st.x.block_dim() != p.block_dim())
    throw DimensionError("iterate shape does not match the problem");
  const std::size_t n = p.node_count();
  const double alpha = step_size(st.k);
  const double r = penalty(st.k, cfg.r0);
  const bool inexact = cfg.mode == OracleMode::inexact;
  const double eps_total =
      inexact ? eps_budget(st.k, cfg.kappa, p.beta(), cfg.r0, p.laplacian_norm(), p.delta(),
                           composite)
              : 0.0;
  const double eps_node = eps_total / static_cast<double>(n);

  std::vector<Vector> dirs(n);
  std::vector<LmoResult> results(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const Vector own = st.x.block(i);
    const auto nbrs = neighbor_blocks(p.graph(), st.x, i);
    dirs[i] = node_direction({own, nbrs, p.objective(i), composite ? &p.y_set(i) : nullptr}, r);
    if (!dirs[i].allFinite())
      throw DomainError("non-finite direction at node " + std::to_string(i + 1) + ", k = " +
                        std::to_string(st.k));
    results[i] = lmo_inexact(p.x_set(i), dirs[i], eps_node);
  });

  IterateState next{st.x, st.k + 1};
  for (std::size_t i = 0; i < n; ++i) {
    if (hooks && hooks->on_lmo) hooks->on_lmo({i, st.k, dirs[i], results[i], eps_node});
    if (stats) {
      ++stats->lmo_calls;
      if (inexact) {
        const double ratio = eps_node > 0.0 ? results[i].certified_gap / eps_node
                                            : (results[i].certified_gap > 0.0 ? INFINITY : 0.0);
        stats->max_budget_ratio = std::max(stats->max_budget_ratio, ratio);
        if (results[i].certified_gap > eps_node) ++stats->budget_violations;
      }
    }
    auto xi = next.x.block(i);
    xi += alpha * (results[i].point - xi);
  }
  if (stats) stats->eps_total = eps_total;
  return next;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigError("r0 must be > 0");
  if (max_iter < 0) throw ConfigError("max_iter must be >= 0");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be >= 0");
  if (mode == OracleMode::inexact && !(kappa > 0.0))
    throw ConfigError("kappa must be > 0 in inexact mode");
  if (init == InitKind::explicit_point && !initial_point)
    throw ConfigError("explicit initialization requires an initial point");
}

double step_size(long k) {
  if (k < 1) throw DomainError("step_size: k must be >= 1");
  return 2.0 / (static_cast<double>(k) + 1.0);
}

double penalty(long k, double r0) {
  if (k < 1) throw DomainError("penalty: k must be >= 1");
  if (!(r0 > 0.0)) throw DomainError("penalty: r0 must be > 0");
  return r0 * std::sqrt(static_cast<double>(k) + 1.0);
}

double eps_budget(long k, double kappa, double beta, double r0, double laplacian_norm, double delta,
                  bool composite) {
  if (k < 1) throw DomainError("eps_budget: k must be >= 1");
  const double root = std::sqrt(static_cast<double>(k) + 1.0);
  const double lap = composite ? laplacian_norm + 1.0 : laplacian_norm;
  return kappa * (beta / root + lap * r0) * delta / root;
}

Vector node_direction(const NodeInputs& in, double r) {
  Vector lap = Vector::Zero(in.own.size());
  for (const Vector& nb : in.neighbor_blocks) lap += in.own - nb;
  if (in.y_set) lap += in.own - project(*in.y_set, in.own);
  Vector g = in.objective.gradient(in.own);
  if (g.size() != in.own.size()) throw DimensionError("gradient has the wrong dimension");
  g += r * lap;
  return g;
}

BlockVector rc_direction(const ConsensusProblem& p, const IterateState& st, double r) {
  return direction(p, st, r, false);
}

BlockVector rc_co_direction(const ConsensusProblem& p, const IterateState& st, double r) {
  if (!p.composite()) throw CapabilityError("rc_co_direction: problem has no composite sets");
  return direction(p, st, r, true);
}

IterateState rc_step(const ConsensusProblem& p, const IterateState& st, const SolverConfig& cfg,
                     StepStats* stats, const RunHooks* hooks) {
  return advance(p, st, cfg, false, stats, hooks);
}

IterateState rc_co_step(const ConsensusProblem& p, const IterateState& st,
                        const SolverConfig& cfg, StepStats* stats, const RunHooks* hooks) {
  if (!p.composite()) throw CapabilityError("rc_co_step: problem has no composite sets");
  return advance(p, st, cfg, true, stats, hooks);
}

BlockVector initial_point(const ConsensusProblem& p, const SolverConfig& cfg) {
  switch (cfg.init) {
    case InitKind::canonical:
      return p.canonical_point();
    case InitKind::lmo_of_ones: {
      BlockVector x(p.node_count(), p.block_dim());
      const Vector ones = Vector::Ones(static_cast<Eigen::Index>(p.block_dim()));
      for (std::size_t i = 0; i < p.node_count(); ++i) x.block(i) = lmo(p.x_set(i), ones);
      return x;
    }
    case InitKind::explicit_point: {
      if (!cfg.initial_point) throw ConfigError("explicit initialization requires a point");
      const BlockVector& x = *cfg.initial_point;
      if (x.block_count() != p.node_count() || x.block_dim() != p.block_dim())
        throw ConfigError("initial point shape does not match the problem");
      for (std::size_t i = 0; i < p.node_count(); ++i)
        if (!contains(p.x_set(i), x.block(i), 1e-9))
          throw ConfigError("initial point block " + std::to_string(i + 1) + " is outside X");
      return x;
    }
  }
  throw ConfigError("unknown initialization");
}

Trace run(const ConsensusProblem& p, const SolverConfig& cfg, const RunOptions& opts,
          const RunHooks& hooks) {
  cfg.validate();
  const bool composite = p.composite();
  const bool inexact = cfg.mode == OracleMode::inexact;
  const BoundParams bp = bound_params(p, cfg.r0, opts.rho, inexact ? cfg.kappa : 0.0);
  auto budget_at = [&](long k) {
    return inexact ? eps_budget(k, cfg.kappa, p.beta(), cfg.r0, p.laplacian_norm(), p.delta(),
                                composite)
                   : 0.0;
  };

  Trace trace;
  IterateState st{initial_point(p, cfg), 1};
  auto record = [&] {
    trace.records.push_back(make_record(p, st.x, st.k, bp, opts.f_star, budget_at(st.k)));
    if (hooks.on_record) hooks.on_record(st);
  };
  record();

  StepStats stats;
  for (long step = 0; step < cfg.max_iter; ++step) {
    try {
      st = composite ? rc_co_step(p, st, cfg, &stats, &hooks) : rc_step(p, st, cfg, &stats, &hooks);
    } catch (const std::exception& e) {
      trace.error = "iteration k = " + std::to_string(st.k) + ": " + e.what();
      break;
    }
    if ((st.k - 1) % cfg.log_every == 0) record();
  }
  trace.lmo_calls = stats.lmo_calls;
  trace.max_budget_ratio = stats.max_budget_ratio;
  trace.budget_violations = stats.budget_violations;
  return trace;
}

}  // namespace dcg

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "dcg/diagnostics.hpp"
#include "dcg/problem.hpp"

namespace dcg {

enum class OracleMode { exact, inexact };
enum class InitKind { canonical, lmo_of_ones, explicit_point };

struct SolverConfig {
  double r0 = 1.0;
  long max_iter = 1000;
  OracleMode mode = OracleMode::exact;
  /// Inexactness factor; required > 0 in inexact mode.
  double kappa = 0.0;
  InitKind init = InitKind::canonical;
  std::optional<BlockVector> initial_point;
  long log_every = 1;
  std::uint64_t seed = 0;
  /// Worker threads for the per-node work in one round. Results do not
  /// depend on this value.
  int threads = 1;

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

/// Current iterate x^k. k starts at 1.
struct IterateState {
  BlockVector x;
  long k = 1;
};

/// alpha^k = 2 / (k + 1).
double step_size(long k);

/// r^k = r0 sqrt(k + 1).
double penalty(long k, double r0);

/// Total LMO inexactness allowed at iteration k:
/// kappa (beta/sqrt(k+1) + lap r0) delta / sqrt(k+1), with lap = ||L|| (+1 when composite).
double eps_budget(long k, double kappa, double beta, double r0, double laplacian_norm, double delta,
                  bool composite);

/// Everything node i sees in one round: its own block, the blocks received
/// from its neighbours, and its private data.
struct NodeInputs {
  const Vector& own;
  std::span<const Vector> neighbor_blocks;
  const NodeObjective& objective;
  /// Composite set of this node, if any.
  const SetDescriptor* y_set;
};

/// grad f_i(x_i) + r sum_j (x_i - x_j); plus r (x_i - P_Y(x_i)) when a composite set is given.
Vector node_direction(const NodeInputs& in, double r);

/// Blockwise grad f(x) + r L x.
BlockVector rc_direction(const ConsensusProblem& p, const IterateState& st, double r);

/// Blockwise grad f(x) + r (x - P_Y(x) + L x).
BlockVector rc_co_direction(const ConsensusProblem& p, const IterateState& st, double r);

/// Reported by each oracle call in a step.
struct LmoCall {
  std::size_t node;
  long k;
  const Vector& direction;
  const LmoResult& result;
  /// Per-node inexactness budget, 0 in exact mode.
  double budget;
};

struct RunHooks {
  /// Called with every logged iterate.
  std::function<void(const IterateState&)> on_record;
  /// Called after every oracle call, in node order.
  std::function<void(const LmoCall&)> on_lmo;
};

/// Per-step oracle statistics.
struct StepStats {
  long lmo_calls = 0;
  double max_budget_ratio = 0.0;
  long budget_violations = 0;
  double eps_total = 0.0;
};

/// One (RC) iteration: y_i = lmo(X_i, g_i), x+ = x + alpha^k (y - x).
IterateState rc_step(const ConsensusProblem& p, const IterateState& st, const SolverConfig& cfg,
                     StepStats* stats = nullptr, const RunHooks* hooks = nullptr);

/// One (RC-co) iteration; requires composite sets.
IterateState rc_co_step(const ConsensusProblem& p, const IterateState& st,
                        const SolverConfig& cfg, StepStats* stats = nullptr,
                        const RunHooks* hooks = nullptr);

/// Starting point x^1 selected by cfg.init.
BlockVector initial_point(const ConsensusProblem& p, const SolverConfig& cfg);

struct RunOptions {
  /// Norm of a dual solution for the bound columns (0 when unknown).
  double rho = 0.0;
  /// Reference optimum for lemma1_residual; NaN column without it.
  std::optional<double> f_star;
};

/// Runs max_iter steps of (RC), or (RC-co) when the problem carries
/// composite sets, logging k = 1, 1 + log_every, 1 + 2 log_every, ...
/// Errors during iteration end the run and are reported in Trace::error.
Trace run(const ConsensusProblem& p, const SolverConfig& cfg, const RunOptions& opts = {},
          const RunHooks& hooks = {});

/// Result of the centralized reference solve of min_z sum_i f_i(z) over the
/// shared per-node feasible set.
struct ReferenceSolution {
  Vector z;
  BlockVector x_star;
  double f_star;
  /// Upper bound on f_star - (true optimum); f_star itself is attained by a
  /// feasible consensus point.
  double certificate;
  /// Lower bound on the true optimum.
  double lower_bound;
  long iterations;
};

/// Test-time oracle for the optimum value. Requires identical X_i (and Y_i)
/// on every node.
ReferenceSolution centralized_reference(const ConsensusProblem& p, long iters = 100000);

}  // namespace dcg

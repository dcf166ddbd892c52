#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcg/problem.hpp"

namespace dcg {

/// Constants entering the convergence bounds.
struct BoundParams {
  /// Norm of a dual solution (u*, or the stacked (u*, v*) in composite mode).
  double rho = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double r0 = 1.0;
  double laplacian_norm = 0.0;
  bool composite = false;
  /// Inexactness factor; sigma is scaled by (1 + kappa).
  double kappa = 0.0;
};

BoundParams bound_params(const ConsensusProblem& p, double r0, double rho = 0.0,
                         double kappa = 0.0);

/// beta/sqrt(k) + ||L|| r0, with ||L|| + 1 in composite mode, times (1 + kappa).
double sigma_k(const BoundParams& bp, long k);

/// 2 (rho + sqrt(sigma_k delta)) / sqrt(k).
double consensus_bound(const BoundParams& bp, long k);

/// (2/sqrt(k)) max{sigma_k delta, rho^2 + rho sqrt(sigma_k delta)}.
double gap_bound(const BoundParams& bp, long k);

/// The same bound with delta^2 in the first term, as literally printed in
/// the theorem statements. Recorded alongside, never used for checks.
double gap_bound_literal(const BoundParams& bp, long k);

/// f(x^k) - f* - [2 sigma_k delta / sqrt(k) - (r0 sqrt(k) / 2)(||E^T x||^2 + ||x - P_Y x||^2)].
/// Non-positive whenever f* is exact.
double lemma1_residual(const ConsensusProblem& p, const BlockVector& x, long k, double f_star,
                       const BoundParams& bp);

/// One row of a convergence trace.
struct TraceRecord {
  long k = 0;
  double f_value = 0.0;
  double consensus_err = 0.0;
  double feas_err = 0.0;
  double sigma_k = 0.0;
  double gap_bound = 0.0;
  double gap_bound_lit = 0.0;
  double consensus_bound = 0.0;
  /// NaN when no reference optimum is available.
  double lemma1_residual = 0.0;
  double eps_budget = 0.0;
};

TraceRecord make_record(const ConsensusProblem& p, const BlockVector& x, long k,
                        const BoundParams& bp, std::optional<double> f_star, double eps_budget);

struct Trace {
  std::vector<TraceRecord> records;
  /// Set when the run stopped early; the records up to that point are kept.
  std::optional<std::string> error;
  long lmo_calls = 0;
  /// Largest certified_gap / per-node budget over inexact oracle calls.
  double max_budget_ratio = 0.0;
  /// Inexact calls whose certificate exceeded the per-node budget.
  long budget_violations = 0;
};

enum class TraceColumn {
  f_value,
  consensus_err,
  feas_err,
  sigma_k,
  gap_bound,
  gap_bound_lit,
  consensus_bound,
  lemma1_residual,
  eps_budget,
};

double column_value(const TraceRecord& r, TraceColumn c);
TraceColumn parse_column(std::string_view name);

/// Least-squares slope of log(column) against log(k) over records with
/// k_lo <= k <= k_hi. Needs at least 10 records with positive values.
double rate_fit(const Trace& trace, TraceColumn column, long k_lo, long k_hi);

inline constexpr std::string_view kTraceCsvHeader =
    "k,f,consensus_err,feas_err,sigma_k,gap_bound,gap_bound_lit,consensus_bound,lemma1_residual,"
    "eps_budget";

void write_trace_csv(std::ostream& out, const Trace& trace);
std::string trace_csv(const Trace& trace);

}  // namespace dcg

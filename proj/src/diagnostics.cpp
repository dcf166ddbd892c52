#include "dcg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace dcg {

BoundParams bound_params(const ConsensusProblem& p, double r0, double rho, double kappa) {
  BoundParams bp;
  bp.rho = rho;
  bp.delta = p.delta();
  bp.beta = p.beta();
  bp.r0 = r0;
  bp.laplacian_norm = p.laplacian_norm();
  bp.composite = p.composite();
  bp.kappa = kappa;
  return bp;
}

double sigma_k(const BoundParams& bp, long k) {
  if (k < 1) throw DomainError("sigma_k: k must be >= 1");
  const double lap = bp.composite ? bp.laplacian_norm + 1.0 : bp.laplacian_norm;
  return (1.0 + bp.kappa) * (bp.beta / std::sqrt(static_cast<double>(k)) + lap * bp.r0);
}

double consensus_bound(const BoundParams& bp, long k) {
  const double s = sigma_k(bp, k);
  return 2.0 * (bp.rho + std::sqrt(s * bp.delta)) / std::sqrt(static_cast<double>(k));
}

double gap_bound(const BoundParams& bp, long k) {
  const double s = sigma_k(bp, k);
  const double sd = s * bp.delta;
  return 2.0 * std::max(sd, bp.rho * bp.rho + bp.rho * std::sqrt(sd)) /
         std::sqrt(static_cast<double>(k));
}

double gap_bound_literal(const BoundParams& bp, long k) {
  const double s = sigma_k(bp, k);
  return 2.0 *
         std::max(s * bp.delta * bp.delta, bp.rho * bp.rho + bp.rho * std::sqrt(s * bp.delta)) /
         std::sqrt(static_cast<double>(k));
}

namespace {

double lemma1_bound(const BoundParams& bp, long k, double cons, double feas) {
  const double rk = std::sqrt(static_cast<double>(k));
  return 2.0 * sigma_k(bp, k) * bp.delta / rk - 0.5 * bp.r0 * rk * (cons * cons + feas * feas);
}

}  // namespace

double lemma1_residual(const ConsensusProblem& p, const BlockVector& x, long k, double f_star,
                       const BoundParams& bp) {
  return p.value(x) - f_star - lemma1_bound(bp, k, p.consensus_error(x), p.feasibility_error(x));
}

TraceRecord make_record(const ConsensusProblem& p, const BlockVector& x, long k,
                        const BoundParams& bp, std::optional<double> f_star, double eps_budget) {
  TraceRecord r;
  r.k = k;
  r.f_value = p.value(x);
  r.consensus_err = p.consensus_error(x);
  r.feas_err = p.feasibility_error(x);
  r.sigma_k = sigma_k(bp, k);
  r.gap_bound = gap_bound(bp, k);
  r.gap_bound_lit = gap_bound_literal(bp, k);
  r.consensus_bound = consensus_bound(bp, k);
  r.lemma1_residual = f_star ? r.f_value - *f_star - lemma1_bound(bp, k, r.consensus_err, r.feas_err)
                             : std::numeric_limits<double>::quiet_NaN();
  r.eps_budget = eps_budget;
  return r;
}

double column_value(const TraceRecord& r, TraceColumn c) {
  switch (c) {
    case TraceColumn::f_value: return r.f_value;
    case TraceColumn::consensus_err: return r.consensus_err;
    case TraceColumn::feas_err: return r.feas_err;
    case TraceColumn::sigma_k: return r.sigma_k;
    case TraceColumn::gap_bound: return r.gap_bound;
    case TraceColumn::gap_bound_lit: return r.gap_bound_lit;
    case TraceColumn::consensus_bound: return r.consensus_bound;
    case TraceColumn::lemma1_residual: return r.lemma1_residual;
    case TraceColumn::eps_budget: return r.eps_budget;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

TraceColumn parse_column(std::string_view name) {
  if (name == "f") return TraceColumn::f_value;
  if (name == "consensus_err") return TraceColumn::consensus_err;
  if (name == "feas_err") return TraceColumn::feas_err;
  if (name == "sigma_k") return TraceColumn::sigma_k;
  if (name == "gap_bound") return TraceColumn::gap_bound;
  if (name == "gap_bound_lit") return TraceColumn::gap_bound_lit;
  if (name == "consensus_bound") return TraceColumn::consensus_bound;
  if (name == "lemma1_residual") return TraceColumn::lemma1_residual;
  if (name == "eps_budget") return TraceColumn::eps_budget;
  throw DomainError("unknown trace column '" + std::string(name) + "'");
}

double rate_fit(const Trace& trace, TraceColumn column, long k_lo, long k_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  for (const auto& r : trace.records) {
    if (r.k < k_lo || r.k > k_hi) continue;
    const double v = column_value(r, column);
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("rate_fit: non-positive value at k = " + std::to_string(r.k));
    const double lx = std::log(static_cast<double>(r.k));
    const double ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 10)
    throw DomainError("rate_fit: need at least 10 records in range, have " +
                      std::to_string(count));
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw DomainError("rate_fit: degenerate k range");
  return (n * sxy - sx * sy) / denom;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_double(r.f_value) << ',' << format_double(r.consensus_err) << ','
        << format_double(r.feas_err) << ',' << format_double(r.sigma_k) << ','
        << format_double(r.gap_bound) << ',' << format_double(r.gap_bound_lit) << ','
        << format_double(r.consensus_bound) << ',' << format_double(r.lemma1_residual) << ','
        << format_double(r.eps_budget) << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

}  // namespace dcg

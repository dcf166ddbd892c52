// Centralized reference solve used as a test oracle for f*.
//
// The reduced problem is min_z F(z) = sum_i f_i(z) over z in X (and Y). The
// returned value is bracketed: f_star = F(z) for a feasible z, and the
// certificate is f_star minus a proven lower bound. Lower bounds come from
// Frank-Wolfe duality gaps and, for composite sets, from the Lagrangian dual
// of the splitting w = z, w in Y, z in X, with multipliers taken from ADMM.
//
// Euclidean projections used here (nuclear ball by dense eigendecomposition,
// l1 ball by sorting) are test-oracle machinery; the distributed iterations
// never call them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dcg/algorithms.hpp"

namespace dcg {

namespace {

struct Smooth {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz;
};

Smooth reduced_objective(const ConsensusProblem& p) {
  return {[&p](const Vector& z) {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.node_count(); ++i) sum += p.objective(i).value(z);
            return sum;
          },
          [&p](const Vector& z) {
            Vector g = Vector::Zero(z.size());
            for (std::size_t i = 0; i < p.node_count(); ++i) g += p.objective(i).gradient(z);
            return g;
          },
          std::max(static_cast<double>(p.node_count()) * p.beta(), 1e-12)};
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> a(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) a[static_cast<std::size_t>(j)] = std::abs(v(j));
  std::sort(a.begin(), a.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    cumulative += a[k];
    const double t = (cumulative - radius) / static_cast<double>(k + 1);
    if (a[k] - t > 0.0) tau = t;
  }
  Vector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::max(std::abs(v(j)) - tau, 0.0);
    out(j) = v(j) < 0.0 ? -mag : mag;
  }
  return out;
}

// Euclidean projection onto any compact variant.
Vector project_any(const SetDescriptor& s, const Vector& v) {
  if (s.supports_projection()) return project(s, v);
  if (const auto* b = std::get_if<L1Ball>(&s.variant())) return project_l1_ball(v, b->radius);
  const auto& nb = std::get<NuclearBallSym>(s.variant());
  const Matrix m = as_matrix(v, nb.side);
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector lam = project_l1_ball(eig.eigenvalues(), nb.radius);
  Matrix out = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  out = 0.5 * (out + out.transpose());
  return flatten(out);
}

struct Bracket {
  Vector z;      // best visited point
  double upper;  // its objective value
  double lower;  // best objective - duality gap over visited points
  long iterations;
};

bool settled(double upper, double lower, double rel) {
  return upper - lower <= rel * std::max(1.0, std::abs(upper));
}

// Accelerated projected gradient. Every visited point contributes its
// Frank-Wolfe gap to the lower bound; the upper bound is the best value seen.
Bracket minimize_over(const Smooth& f, const SetDescriptor& s, const Vector& start, long iters,
                      double rel_tol) {
  Vector z = project_any(s, start);
  Vector prev = z;
  Bracket b{z, f.value(z), -std::numeric_limits<double>::infinity(), 0};
  double t = 1.0;
  for (long it = 0; it < iters; ++it) {
    const Vector g = f.gradient(z);
    const double fz = f.value(z);
    const double gap = g.dot(z - lmo(s, g));
    b.lower = std::max(b.lower, fz - std::max(gap, 0.0));
    if (fz < b.upper) {
      b.upper = fz;
      b.z = z;
    }
    b.iterations = it + 1;
    if (settled(b.upper, b.lower, rel_tol)) break;
    // FISTA step from the extrapolated point, with a restart on ascent.
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Vector yk = z + ((t - 1.0) / t_next) * (z - prev);
    Vector next = project_any(s, yk - f.gradient(yk) / f.lipschitz);
    prev = z;
    if (f.value(next) > fz) {
      next = project_any(s, z - g / f.lipschitz);
      t = 1.0;
    } else {
      t = t_next;
    }
    z = std::move(next);
  }
  const double fz = f.value(z);
  if (fz < b.upper) {
    b.upper = fz;
    b.z = z;
  }
  return b;
}

// Largest t in [0,1] with anchor + t (z - anchor) in X, by bisection.
Vector pull_into(const SetDescriptor& x, const Vector& anchor, const Vector& z) {
  if (contains(x, z, 0.0)) return z;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (contains(x, anchor + mid * (z - anchor), 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return anchor + lo * (z - anchor);
}

// Point of X cap Y near w (w approximately in both), given anchor in X cap Y.
Vector feasible_near(const SetDescriptor& xs, const SetDescriptor& ys, const Vector& anchor,
                     Vector w) {
  if (const auto* nb = std::get_if<NuclearBallSym>(&xs.variant())) {
    // Iterates carry rounding-level asymmetry; the membership test is exact.
    const Matrix m = as_matrix(w, nb->side);
    w = flatten(Matrix(0.5 * (m + m.transpose())));
  }
  if (!contains(ys, w, 0.0)) w = project(ys, w);
  // The segment from anchor to w stays in Y by convexity.
  return pull_into(xs, anchor, w);
}

bool all_equal(const std::vector<SetDescriptor>& sets) {
  return std::all_of(sets.begin(), sets.end(), [&](const auto& s) { return s == sets.front(); });
}

constexpr double kTarget = 1e-10;

// min F over X cap Y by ADMM on (w in Y, z in X, w = z). Returns the bracket
// [dual bound, value of a feasible point].
Bracket split_solve(const Smooth& F, const SetDescriptor& xs, const SetDescriptor& ys, long iters) {
  const Vector anchor = xs.center();
  if (!contains(ys, anchor, 0.0))
    throw CapabilityError("centralized_reference: centre of X is not in Y");
  const double rho = F.lipschitz;
  Vector z = anchor, w = anchor, u = Vector::Zero(anchor.size());
  Bracket best{anchor, F.value(anchor), -std::numeric_limits<double>::infinity(), 0};
  constexpr long kCheckEvery = 25;

  for (long it = 0; it < iters; ++it) {
    // w-update: argmin_{w in Y} F(w) + rho/2 ||w - z + u||^2.
    const Vector shift = z - u;
    const Smooth prox{[&](const Vector& v) { return F.value(v) + 0.5 * rho * (v - shift).squaredNorm(); },
                      [&](const Vector& v) { return Vector(F.gradient(v) + rho * (v - shift)); },
                      F.lipschitz + rho};
    w = minimize_over(prox, ys, w, 200, 1e-14).z;
    z = project_any(xs, w + u);
    u += w - z;
    best.iterations = it + 1;

    if ((it + 1) % kCheckEvery != 0 && it + 1 != iters) continue;
    const Vector cand = feasible_near(xs, ys, anchor, w);
    const double fc = F.value(cand);
    if (fc < best.upper) {
      best.upper = fc;
      best.z = cand;
    }
    // Dual bound q(lambda) = min_{w in Y} F(w) + <lambda, w> + min_{z in X} <-lambda, z>.
    const Vector lambda = rho * u;
    const Smooth tilted{[&](const Vector& v) { return F.value(v) + lambda.dot(v); },
                        [&](const Vector& v) { return Vector(F.gradient(v) + lambda); },
                        F.lipschitz};
    const Bracket inner = minimize_over(tilted, ys, w, 2000, 1e-15);
    const LmoResult lin = lmo_inexact(xs, Vector(-lambda), 0.0);
    const double q = inner.lower + (-lambda).dot(lin.point) - lin.certified_gap;
    best.lower = std::max(best.lower, q);
    if (settled(best.upper, best.lower, kTarget)) break;
  }
  return best;
}

}  // namespace

ReferenceSolution centralized_reference(const ConsensusProblem& p, long iters) {
  if (!all_equal(p.x_sets()))
    throw CapabilityError("centralized_reference: unsupported heterogeneous X sets");
  if (p.composite() && !all_equal(*p.y_sets()))
    throw CapabilityError("centralized_reference: unsupported heterogeneous Y sets");

  const Smooth F = reduced_objective(p);
  const SetDescriptor& xs = p.x_set(0);
  const bool has_y = p.composite() && p.y_set(0).is_compact();

  Bracket b;
  if (!has_y) {
    b = minimize_over(F, xs, xs.center(), iters, kTarget);
  } else if (std::holds_alternative<Box>(xs.variant()) &&
             std::holds_alternative<Box>(p.y_set(0).variant())) {
    const auto& bx = std::get<Box>(xs.variant());
    const auto& by = std::get<Box>(p.y_set(0).variant());
    const Vector lo = bx.lower.cwiseMax(by.lower);
    const Vector hi = bx.upper.cwiseMin(by.upper);
    if ((lo.array() > hi.array()).any())
      throw DomainError("centralized_reference: X and Y do not intersect");
    const SetDescriptor both = SetDescriptor::box(lo, hi);
    b = minimize_over(F, both, both.center(), iters, kTarget);
  } else {
    b = split_solve(F, xs, p.y_set(0), iters);
  }

  return ReferenceSolution{b.z,
                           BlockVector::replicate(b.z, p.node_count()),
                           b.upper,
                           std::max(0.0, b.upper - b.lower),
                           b.lower,
                           b.iterations};
}

}  // namespace dcg

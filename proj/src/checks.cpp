#include "dcg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dcg/algorithms.hpp"
#include "dcg/errors.hpp"
#include "dcg/rng.hpp"

namespace dcg {

namespace {

// Collects the first failure of a property over many samples.
class Property {
 public:
  explicit Property(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::string& what) {
    ++samples_;
    if (ok || failed_) return;
    failed_ = true;
    detail_ = what;
  }

  CheckResult result() const {
    return {name_, !failed_,
            failed_ ? detail_ : std::to_string(samples_) + " samples"};
  }

 private:
  std::string name_;
  bool failed_ = false;
  long samples_ = 0;
  std::string detail_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Vector normal_vector(Rng& rng, std::size_t dim) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.normal();
  return v;
}

// Random direction with occasional exact zeros and ties, to hit the tie-breaking rules.
Vector direction(Rng& rng, std::size_t dim, long sample) {
  Vector c = normal_vector(rng, dim);
  if (sample % 7 == 3 && dim > 1) c(0) = 0.0;
  if (sample % 11 == 5 && dim > 1) c(1) = c(0);
  if (sample % 97 == 13) c.setZero();
  return c;
}

Vector feasible_sample(const SetDescriptor& s, Rng& rng) {
  const std::size_t d = s.dim();
  const double scale = rng.uniform();
  return std::visit(
      [&](const auto& v) -> Vector {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          Vector x(v.lower.size());
          for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = rng.uniform(v.lower(j), v.upper(j));
          return x;
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          const Vector g = normal_vector(rng, d);
          return g * (v.radius * scale / std::max(g.lpNorm<1>(), 1e-300));
        } else if constexpr (std::is_same_v<T, L2Ball>) {
          const Vector g = normal_vector(rng, d);
          return g * (v.radius * scale / std::max(g.norm(), 1e-300));
        } else if constexpr (std::is_same_v<T, Simplex>) {
          Vector x(static_cast<Eigen::Index>(d));
          for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = -std::log(1.0 - rng.uniform());
          return x / x.sum();
        } else if constexpr (std::is_same_v<T, NuclearBallSym>) {
          const Matrix g = as_matrix(normal_vector(rng, d), v.side);
          const Matrix sym = 0.5 * (g + g.transpose());
          return flatten(Matrix(sym * (v.radius * scale / std::max(nuclear_norm(sym), 1e-300))));
        } else {
          return normal_vector(rng, d);
        }
      },
      s.variant());
}

SetDescriptor random_set(const std::string& family, Rng& rng, long sample) {
  const auto d = static_cast<std::size_t>(1 + sample % 8);
  if (family == "box") {
    Vector lo(static_cast<Eigen::Index>(d)), hi(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      lo(static_cast<Eigen::Index>(j)) = rng.uniform(-2.0, 0.5);
      hi(static_cast<Eigen::Index>(j)) = lo(static_cast<Eigen::Index>(j)) + rng.uniform(0.0, 2.0);
    }
    return SetDescriptor::box(lo, hi);
  }
  if (family == "l1") return SetDescriptor::l1_ball(rng.uniform(0.2, 3.0), d);
  if (family == "l2") return SetDescriptor::l2_ball(rng.uniform(0.2, 3.0), d);
  if (family == "simplex") return SetDescriptor::simplex(d);
  return SetDescriptor::nuclear_ball_sym(rng.uniform(0.2, 3.0), static_cast<std::size_t>(1 + sample % 6));
}

double tolerance(const std::string& family) { return family == "nuclear" ? 1e-7 : 1e-9; }

}  // namespace

double brute_force_min(const SetDescriptor& s, const Vector& c) {
  if (c.size() != static_cast<Eigen::Index>(s.dim()))
    throw DimensionError("brute_force_min: direction has the wrong dimension");
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          const auto d = static_cast<std::size_t>(c.size());
          if (d > 20) throw CapabilityError("brute_force_min: box too large to enumerate");
          double best = std::numeric_limits<double>::infinity();
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
            double value = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const auto e = static_cast<Eigen::Index>(j);
              value += c(e) * ((mask >> j) & 1U ? v.upper(e) : v.lower(e));
            }
            best = std::min(best, value);
          }
          return best;
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          double best = std::numeric_limits<double>::infinity();
          for (Eigen::Index j = 0; j < c.size(); ++j)
            best = std::min({best, v.radius * c(j), -v.radius * c(j)});
          return best;
        } else if constexpr (std::is_same_v<T, L2Ball>) {
          return -v.radius * c.norm();
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return c.minCoeff();
        } else if constexpr (std::is_same_v<T, NuclearBallSym>) {
          const Matrix m = as_matrix(c, v.side);
          Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
          const Vector lam = eig.eigenvalues();
          // <C, +-theta v v^T> = +-theta lambda.
          return std::min(-v.radius * lam.maxCoeff(), v.radius * lam.minCoeff());
        } else {
          throw CapabilityError("brute_force_min: set is unbounded");
        }
      },
      s.variant());
}

std::vector<CheckResult> oracle_suite(const CheckOptions& opts) {
  const LmoFunction oracle = opts.lmo_under_test ? opts.lmo_under_test : LmoFunction(&lmo);
  Rng rng(opts.seed);
  std::vector<CheckResult> out;

  Property feasible("lmo_feasible");
  Property optimal("lmo_optimal_vs_feasible_points");
  for (const std::string family : {"box", "l1", "l2", "simplex", "nuclear"}) {
    Property agree("lmo_matches_brute_force_" + family);
    for (long t = 0; t < opts.directions; ++t) {
      const SetDescriptor s = random_set(family, rng, t);
      const Vector c = direction(rng, s.dim(), t);
      const Vector y = oracle(s, c);
      const double got = c.dot(y);
      const double want = brute_force_min(s, c);
      agree.expect(std::abs(got - want) <= tolerance(family),
                   s.name() + ": <c, lmo> = " + fmt(got) + ", brute force " + fmt(want));
      feasible.expect(contains(s, y, 1e-9), s.name() + ": lmo output outside the set");
      const Vector z = feasible_sample(s, rng);
      optimal.expect(got <= c.dot(z) + tolerance(family),
                     s.name() + ": feasible point beats lmo by " + fmt(got - c.dot(z)));
    }
    out.push_back(agree.result());
  }
  out.push_back(feasible.result());
  out.push_back(optimal.result());

  Property idempotent("projection_idempotent");
  Property nonexpansive("projection_nonexpansive");
  Property variational("projection_variational_inequality");
  for (const std::string family : {"box", "l2", "simplex"}) {
    for (long t = 0; t < opts.directions; ++t) {
      const SetDescriptor s = random_set(family, rng, t);
      const Vector a = 3.0 * normal_vector(rng, s.dim());
      const Vector b = 3.0 * normal_vector(rng, s.dim());
      const Vector pa = project(s, a);
      const Vector pb = project(s, b);
      idempotent.expect((project(s, pa) - pa).norm() <= 1e-12, s.name() + ": P(P(a)) != P(a)");
      nonexpansive.expect((pa - pb).norm() <= (a - b).norm() + 1e-12,
                          s.name() + ": |P(a) - P(b)| > |a - b|");
      const Vector z = feasible_sample(s, rng);
      variational.expect((a - pa).dot(z - pa) <= 1e-9,
                         s.name() + ": <a - P(a), z - P(a)> = " + fmt((a - pa).dot(z - pa)));
    }
  }
  out.push_back(idempotent.result());
  out.push_back(nonexpansive.result());
  out.push_back(variational.result());

  Property structure("nuclear_lmo_symmetric_rank_one");
  Property certificate("nuclear_inexact_certificate");
  for (long t = 0; t < opts.directions; ++t) {
    const SetDescriptor s = random_set("nuclear", rng, t);
    const auto& nb = std::get<NuclearBallSym>(s.variant());
    const Vector c = normal_vector(rng, s.dim());
    const Matrix y = as_matrix(oracle(s, c), nb.side);
    Eigen::JacobiSVD<Matrix> svd(y);
    const Vector sv = svd.singularValues();
    const bool rank_one = sv.size() < 2 || sv(1) <= 1e-9 * nb.radius;
    structure.expect((y - y.transpose()).cwiseAbs().maxCoeff() <= 1e-12 && rank_one &&
                         std::abs(y.norm() - nb.radius) <= 1e-9 * nb.radius,
                     s.name() + ": output not symmetric rank one with Frobenius norm theta");

    const double eps = nb.radius * c.norm() * std::pow(10.0, -rng.uniform(1.0, 6.0));
    const LmoResult r = lmo_inexact(s, c, eps);
    const double gap = c.dot(r.point) - brute_force_min(s, c);
    certificate.expect(r.certified_gap <= eps && gap <= eps + 1e-9,
                       s.name() + ": eps " + fmt(eps) + ", certified " + fmt(r.certified_gap) +
                           ", true gap " + fmt(gap));
  }
  out.push_back(structure.result());
  out.push_back(certificate.result());
  return out;
}

TwoNodeKkt solve_two_node_kkt(const std::array<ScalarBoxNode, 2>& nodes) {
  for (const auto& n : nodes) {
    if (!(n.weight > 0.0)) throw DomainError("solve_two_node_kkt: weights must be > 0");
    if (!(n.lower <= n.upper)) throw DomainError("solve_two_node_kkt: empty box");
  }
  if (std::max(nodes[0].lower, nodes[1].lower) > std::min(nodes[0].upper, nodes[1].upper))
    throw DomainError("solve_two_node_kkt: boxes do not intersect");

  enum Status { interior, at_lower, at_upper };
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto grad = [&](int i, double z) { return 2.0 * nodes[i].weight * (z - nodes[i].target); };

  std::optional<TwoNodeKkt> found;
  for (int s0 = 0; s0 < 3; ++s0) {
    for (int s1 = 0; s1 < 3; ++s1) {
      const std::array<Status, 2> st{static_cast<Status>(s0), static_cast<Status>(s1)};
      // Consensus value implied by the pattern.
      std::optional<double> z;
      bool consistent = true;
      for (int i = 0; i < 2; ++i) {
        if (st[i] == interior) continue;
        const double bound = st[i] == at_lower ? nodes[i].lower : nodes[i].upper;
        if (z && *z != bound) consistent = false;
        z = bound;
      }
      if (!consistent) continue;
      if (!z)
        z = (nodes[0].weight * nodes[0].target + nodes[1].weight * nodes[1].target) /
            (nodes[0].weight + nodes[1].weight);
      if (*z < nodes[0].lower || *z > nodes[0].upper || *z < nodes[1].lower || *z > nodes[1].upper)
        continue;

      // Node 1 (head): -u - g_1 in N_1.  Node 2 (tail): u - g_2 in N_2.
      double lo = -inf, hi = inf;
      const double g0 = grad(0, *z), g1 = grad(1, *z);
      switch (st[0]) {
        case interior: lo = std::max(lo, -g0); hi = std::min(hi, -g0); break;
        case at_lower: lo = std::max(lo, -g0); break;
        case at_upper: hi = std::min(hi, -g0); break;
      }
      switch (st[1]) {
        case interior: lo = std::max(lo, g1); hi = std::min(hi, g1); break;
        case at_lower: hi = std::min(hi, g1); break;
        case at_upper: lo = std::max(lo, g1); break;
      }
      if (lo > hi + 1e-12) continue;
      if (!found) {
        found = TwoNodeKkt{*z, 0.0, lo, hi, 0.0};
      } else {
        found->u_low = std::min(found->u_low, lo);
        found->u_high = std::max(found->u_high, hi);
      }
    }
  }
  if (!found) throw DomainError("solve_two_node_kkt: no consistent active set");
  TwoNodeKkt k = *found;
  for (int i = 0; i < 2; ++i)
    k.f_star += nodes[i].weight * (k.z - nodes[i].target) * (k.z - nodes[i].target);
  k.rho = (k.u_low <= 0.0 && k.u_high >= 0.0) ? 0.0 : std::min(std::abs(k.u_low), std::abs(k.u_high));
  return k;
}

std::vector<CheckResult> bounds_suite(const CheckOptions&) {
  std::vector<CheckResult> out;
  const TwoNodeKkt kkt = solve_two_node_kkt({ScalarBoxNode{1.0, 0.0, 0.0, 1.0},
                                             ScalarBoxNode{1.0, 1.0, 0.0, 1.0}});
  out.push_back({"toy_kkt_closed_form",
                 std::abs(kkt.z - 0.5) <= 1e-15 && std::abs(kkt.f_star - 0.5) <= 1e-15 &&
                     std::abs(kkt.rho - 1.0) <= 1e-15,
                 "z* = " + fmt(kkt.z) + ", f* = " + fmt(kkt.f_star) + ", rho = " + fmt(kkt.rho)});

  const ConsensusProblem toy = quadratic_toy();
  const ReferenceSolution ref = centralized_reference(toy);
  out.push_back({"toy_reference_optimum",
                 std::abs(ref.f_star - kkt.f_star) <= 1e-9 && ref.certificate <= 1e-9,
                 "f* = " + fmt(ref.f_star) + ", certificate " + fmt(ref.certificate)});

  for (const bool inexact : {false, true}) {
    SolverConfig cfg;
    cfg.max_iter = 10000;
    if (inexact) {
      cfg.mode = OracleMode::inexact;
      cfg.kappa = 1.0;
    }
    const Trace trace = run(toy, cfg, RunOptions{kkt.rho, kkt.f_star});
    const std::string tag = inexact ? "_inexact" : "";
    Property consensus("toy_consensus_bound" + tag);
    Property gap("toy_gap_bound" + tag);
    Property lemma("toy_lemma1_residual" + tag);
    for (const TraceRecord& r : trace.records) {
      const std::string at = "k = " + std::to_string(r.k) + ": ";
      consensus.expect(r.consensus_err <= r.consensus_bound + 1e-9,
                       at + fmt(r.consensus_err) + " > " + fmt(r.consensus_bound));
      gap.expect(std::abs(r.f_value - kkt.f_star) <= r.gap_bound + 1e-9,
                 at + fmt(std::abs(r.f_value - kkt.f_star)) + " > " + fmt(r.gap_bound));
      lemma.expect(r.lemma1_residual <= 1e-6, at + "residual " + fmt(r.lemma1_residual));
    }
    consensus.expect(!trace.error, trace.error.value_or(""));
    out.push_back(consensus.result());
    out.push_back(gap.result());
    out.push_back(lemma.result());
    if (inexact)
      out.push_back({"toy_inexact_budget", trace.budget_violations == 0,
                     std::to_string(trace.budget_violations) + " budget violations"});
  }
  return out;
}

}  // namespace dcg

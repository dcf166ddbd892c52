#include "dcg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "dcg/rng.hpp"

namespace dcg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(const SetDescriptor& s, const Vector& c, const char* what) {
  if (static_cast<std::size_t>(c.size()) != s.dim())
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(s.dim()) +
                         " for " + s.name() + ", got " + std::to_string(c.size()));
}

void require_finite(const Vector& c, const char* what) {
  if (!c.allFinite()) throw DomainError(std::string(what) + ": non-finite input");
}

// Lowest index attaining the predicate-best value.
template <class Better>
Eigen::Index best_index(const Vector& c, Better better) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < c.size(); ++j)
    if (better(c(j), c(best))) best = j;
  return best;
}

Vector deterministic_start(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = 1.0 + static_cast<double>(i + 1) / static_cast<double>(n);
  return v.normalized();
}

// Rigorous upper bound on the spectral norm of a symmetric S:
// ||S||^2 = lambda_max(S^2) <= tr(S^{2p})^{1/p}, with p = 2^m reached by
// repeated squaring. The bound is within a factor n^{1/(2p)} of ||S||.
class SpectralBound {
 public:
  explicit SpectralBound(const Matrix& sym) : n_(static_cast<double>(sym.rows())) {
    b_.noalias() = sym * sym;
    const double t = b_.trace();
    b_ /= t;
    log_c_ = std::log(t);
  }

  double upper() const { return std::exp(0.5 * log_c_ / p_); }
  /// tr(S^{2p}) <= n lambda_max^p gives the matching lower bound.
  double lower() const { return std::exp(0.5 * (log_c_ - std::log(n_)) / p_); }

  bool refine() {
    if (squarings_ >= kMaxSquarings) return false;
    Matrix next;
    next.noalias() = b_ * b_;
    b_ = 0.5 * (next + next.transpose());
    const double t = b_.trace();
    b_ /= t;
    log_c_ = 2.0 * log_c_ + std::log(t);
    p_ *= 2.0;
    ++squarings_;
    return true;
  }

 private:
  static constexpr int kMaxSquarings = 48;
  Matrix b_;
  double n_;
  double log_c_ = 0.0;
  double p_ = 1.0;
  int squarings_ = 0;
};

// Dominant-magnitude eigenpair of a symmetric matrix by power iteration on
// its square. Squaring makes a +lambda/-lambda pair one cluster, so the
// iteration does not oscillate; each iterate is then split into its
// components along the two signs and the heavier one is kept.
//
// The search stops once the residual bound 2 theta ||C_s u - rho u|| is within
// budget. A small residual only says that some eigenvalue is close to the
// Rayleigh quotient, not that it is the largest one, so the stop also needs
// the trace-power bound theta (||C_s|| - |rho|) within budget, and the larger
// of the two is reported. A quotient below the bound's lower end marks a
// non-dominant eigenvector and triggers a seeded restart.
LmoResult nuclear_lmo(const NuclearBallSym& s, const Vector& c, double eps,
                      const EigenSearchOptions& opts) {
  const auto n = static_cast<Eigen::Index>(s.side);
  const Matrix raw = as_matrix(c, s.side);
  const Matrix sym = 0.5 * (raw + raw.transpose());
  const double scale = sym.norm();
  if (scale == 0.0) return {Vector::Zero(n * n), 0.0, 0};

  const double theta = s.radius;
  const double accept = eps > 0.0 ? eps : opts.exact_relative_gap * theta * scale;
  double residual_target =
      eps > 0.0 ? eps / (2.0 * theta) : opts.exact_relative_residual * scale;

  std::optional<SpectralBound> bound;
  Rng restart_rng(opts.restart_seed);
  int restarts = 0;
  int iterations = 0;
  Vector v = deterministic_start(n);
  Vector u;
  double rho = 0.0;
  double residual = std::numeric_limits<double>::infinity();

  auto spectral_gap = [&] { return std::max(0.0, theta * (bound->upper() - std::abs(rho))); };
  auto certificate = [&] { return std::max(spectral_gap(), 2.0 * theta * residual); };
  auto restart = [&] {
    v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = restart_rng.normal();
    v.normalize();
    ++restarts;
  };

  while (iterations < opts.max_iterations) {
    ++iterations;
    const Vector w = sym * v;
    const double wnorm = w.norm();
    if (wnorm == 0.0) {
      if (restarts >= opts.max_restarts) break;
      restart();
      continue;
    }
    const Vector wn = w / wnorm;
    Vector cand = v + wn;
    const Vector minus = v - wn;
    if (minus.norm() > cand.norm()) cand = minus;
    cand.normalize();
    const Vector cu = sym * cand;
    u = cand;
    rho = u.dot(cu);
    residual = (cu - rho * u).norm();

    if (residual <= residual_target) {
      if (!bound) bound.emplace(sym);
      bool dominated = false;
      for (;;) {
        if (spectral_gap() <= accept) break;
        if (std::abs(rho) < bound->lower()) {
          dominated = true;
          break;
        }
        if (!bound->refine()) break;
      }
      if (spectral_gap() <= accept) break;
      if (dominated && restarts < opts.max_restarts) {
        restart();
        continue;
      }
      residual_target *= 0.1;
    }
    v = sym * wn;
    const double vnorm = v.norm();
    if (vnorm == 0.0) {
      if (restarts >= opts.max_restarts) break;
      restart();
      continue;
    }
    v /= vnorm;
  }
  if (u.size() == 0) {
    // Every start was annihilated; fall back to a coordinate direction.
    u = Vector::Unit(n, 0);
    rho = sym(0, 0);
    residual = (sym * u - rho * u).norm();
  }
  if (!bound) bound.emplace(sym);
  while (spectral_gap() > accept && bound->refine()) {
  }

  const double sign = rho < 0.0 ? -1.0 : 1.0;
  const Matrix y = (-theta * sign) * (u * u.transpose());
  return {flatten(y), certificate(), iterations};
}

std::vector<double> simplex_projection(const Vector& c) {
  // Sort-based projection onto {x >= 0, sum x = 1}.
  std::vector<double> sorted(c.data(), c.data() + c.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) tau = t;
  }
  std::vector<double> out(static_cast<std::size_t>(c.size()));
  for (Eigen::Index j = 0; j < c.size(); ++j)
    out[static_cast<std::size_t>(j)] = std::max(c(j) - tau, 0.0);
  return out;
}

}  // namespace

SetDescriptor SetDescriptor::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw DimensionError("box bounds differ in length");
  if (lower.size() == 0) throw DomainError("box needs dimension >= 1");
  if (!lower.allFinite() || !upper.allFinite()) throw DomainError("box bounds must be finite");
  if ((lower.array() > upper.array()).any()) throw DomainError("box requires lower <= upper");
  return SetDescriptor(Box{std::move(lower), std::move(upper)});
}

SetDescriptor SetDescriptor::box(std::size_t dim, double lower, double upper) {
  const auto d = static_cast<Eigen::Index>(dim);
  return box(Vector::Constant(d, lower), Vector::Constant(d, upper));
}

SetDescriptor SetDescriptor::l1_ball(double radius, std::size_t dim) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("l1 ball radius must be > 0");
  if (dim == 0) throw DomainError("l1 ball needs dimension >= 1");
  return SetDescriptor(L1Ball{radius, dim});
}

SetDescriptor SetDescriptor::l2_ball(double radius, std::size_t dim) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("l2 ball radius must be > 0");
  if (dim == 0) throw DomainError("l2 ball needs dimension >= 1");
  return SetDescriptor(L2Ball{radius, dim});
}

SetDescriptor SetDescriptor::simplex(std::size_t dim) {
  if (dim == 0) throw DomainError("simplex needs dimension >= 1");
  return SetDescriptor(Simplex{dim});
}

SetDescriptor SetDescriptor::nuclear_ball_sym(double radius, std::size_t side) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw DomainError("nuclear ball radius must be > 0");
  if (side == 0) throw DomainError("nuclear ball needs side >= 1");
  return SetDescriptor(NuclearBallSym{radius, side});
}

SetDescriptor SetDescriptor::whole_space(std::size_t dim) {
  if (dim == 0) throw DomainError("whole space needs dimension >= 1");
  return SetDescriptor(WholeSpace{dim});
}

std::size_t SetDescriptor::dim() const {
  return std::visit(overloaded{
                        [](const Box& b) { return static_cast<std::size_t>(b.lower.size()); },
                        [](const L1Ball& b) { return b.dim; },
                        [](const L2Ball& b) { return b.dim; },
                        [](const Simplex& b) { return b.dim; },
                        [](const NuclearBallSym& b) { return b.side * b.side; },
                        [](const WholeSpace& b) { return b.dim; },
                    },
                    v_);
}

std::string SetDescriptor::name() const {
  return std::visit(overloaded{
                        [](const Box&) { return std::string("box"); },
                        [](const L1Ball&) { return std::string("l1"); },
                        [](const L2Ball&) { return std::string("l2"); },
                        [](const Simplex&) { return std::string("simplex"); },
                        [](const NuclearBallSym&) { return std::string("nuclear"); },
                        [](const WholeSpace&) { return std::string("whole-space"); },
                    },
                    v_);
}

bool SetDescriptor::supports_projection() const {
  return std::holds_alternative<Box>(v_) || std::holds_alternative<L2Ball>(v_) ||
         std::holds_alternative<Simplex>(v_) || std::holds_alternative<WholeSpace>(v_);
}

bool SetDescriptor::operator==(const SetDescriptor& other) const {
  if (v_.index() != other.v_.index()) return false;
  return std::visit(
      overloaded{
          [&](const Box& b) {
            const auto& o = std::get<Box>(other.v_);
            return b.lower == o.lower && b.upper == o.upper;
          },
          [&](const L1Ball& b) {
            const auto& o = std::get<L1Ball>(other.v_);
            return b.radius == o.radius && b.dim == o.dim;
          },
          [&](const L2Ball& b) {
            const auto& o = std::get<L2Ball>(other.v_);
            return b.radius == o.radius && b.dim == o.dim;
          },
          [&](const Simplex& b) { return b.dim == std::get<Simplex>(other.v_).dim; },
          [&](const NuclearBallSym& b) {
            const auto& o = std::get<NuclearBallSym>(other.v_);
            return b.radius == o.radius && b.side == o.side;
          },
          [&](const WholeSpace& b) { return b.dim == std::get<WholeSpace>(other.v_).dim; },
      },
      v_);
}

Vector SetDescriptor::center() const {
  const auto d = static_cast<Eigen::Index>(dim());
  return std::visit(overloaded{
                        [](const Box& b) -> Vector { return 0.5 * (b.lower + b.upper); },
                        [&](const Simplex&) -> Vector {
                          return Vector::Constant(d, 1.0 / static_cast<double>(d));
                        },
                        [&](const auto&) -> Vector { return Vector::Zero(d); },
                    },
                    v_);
}

LmoResult lmo_inexact(const SetDescriptor& s, const Vector& c, double eps,
                      const EigenSearchOptions& opts) {
  require_dim(s, c, "lmo");
  require_finite(c, "lmo");
  if (!(eps >= 0.0)) throw DomainError("lmo_inexact: eps must be >= 0");
  const auto d = c.size();
  return std::visit(
      overloaded{
          [&](const Box& b) -> LmoResult {
            Vector y(d);
            for (Eigen::Index j = 0; j < d; ++j) y(j) = c(j) < 0.0 ? b.upper(j) : b.lower(j);
            return {std::move(y)};
          },
          [&](const L1Ball& b) -> LmoResult {
            Vector y = Vector::Zero(d);
            const Eigen::Index j =
                best_index(c, [](double a, double best) { return std::abs(a) > std::abs(best); });
            if (c(j) != 0.0) y(j) = c(j) > 0.0 ? -b.radius : b.radius;
            return {std::move(y)};
          },
          [&](const L2Ball& b) -> LmoResult {
            const double norm = c.norm();
            if (norm == 0.0) return {Vector::Zero(d)};
            return {Vector((-b.radius / norm) * c)};
          },
          [&](const Simplex&) -> LmoResult {
            Vector y = Vector::Zero(d);
            y(best_index(c, [](double a, double best) { return a < best; })) = 1.0;
            return {std::move(y)};
          },
          [&](const NuclearBallSym& b) -> LmoResult { return nuclear_lmo(b, c, eps, opts); },
          [&](const WholeSpace&) -> LmoResult {
            throw CapabilityError("lmo: whole space is unbounded");
          },
      },
      s.variant());
}

Vector lmo(const SetDescriptor& s, const Vector& c) { return lmo_inexact(s, c, 0.0).point; }

Vector project(const SetDescriptor& s, const Vector& c) {
  require_dim(s, c, "project");
  require_finite(c, "project");
  return std::visit(
      overloaded{
          [&](const Box& b) -> Vector { return c.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const L2Ball& b) -> Vector {
            const double norm = c.norm();
            return norm <= b.radius ? c : Vector((b.radius / norm) * c);
          },
          [&](const Simplex&) -> Vector {
            const auto p = simplex_projection(c);
            return Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
          },
          [&](const WholeSpace&) -> Vector { return c; },
          [&](const auto&) -> Vector {
            throw CapabilityError("project: no projection oracle for " + s.name());
          },
      },
      s.variant());
}

double squared_diameter(const SetDescriptor& s) {
  return std::visit(overloaded{
                        [](const Box& b) { return (b.upper - b.lower).squaredNorm(); },
                        [](const L1Ball& b) { return 4.0 * b.radius * b.radius; },
                        [](const L2Ball& b) { return 4.0 * b.radius * b.radius; },
                        [](const Simplex& b) { return b.dim >= 2 ? 2.0 : 0.0; },
                        [](const NuclearBallSym& b) { return 4.0 * b.radius * b.radius; },
                        [](const WholeSpace&) { return std::numeric_limits<double>::infinity(); },
                    },
                    s.variant());
}

double nuclear_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

bool contains(const SetDescriptor& s, const Vector& x, double tol) {
  require_dim(s, x, "contains");
  if (!(tol >= 0.0)) throw DomainError("contains: tol must be >= 0");
  if (!x.allFinite()) return false;
  return std::visit(
      overloaded{
          [&](const Box& b) {
            return ((x - b.lower).array() >= -tol).all() && ((b.upper - x).array() >= -tol).all();
          },
          [&](const L1Ball& b) { return x.lpNorm<1>() <= b.radius + tol; },
          [&](const L2Ball& b) { return x.norm() <= b.radius + tol; },
          [&](const Simplex&) {
            return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
          },
          [&](const NuclearBallSym& b) {
            const Matrix m = as_matrix(x, b.side);
            if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
            return nuclear_norm(m) <= b.radius + tol;
          },
          [&](const WholeSpace&) { return true; },
      },
      s.variant());
}

}  // namespace dcg

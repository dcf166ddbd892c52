#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "dcg/block_vector.hpp"

namespace dcg {

/// Componentwise interval [lower, upper].
struct Box {
  Vector lower;
  Vector upper;
};

/// {x : ||x||_1 <= radius}.
struct L1Ball {
  double radius;
  std::size_t dim;
};

/// {x : ||x||_2 <= radius}.
struct L2Ball {
  double radius;
  std::size_t dim;
};

/// Probability simplex {x >= 0, sum x = 1}.
struct Simplex {
  std::size_t dim;
};

/// Symmetric side x side matrices with nuclear norm <= radius, flattened
/// column-major into blocks of dimension side^2.
struct NuclearBallSym {
  double radius;
  std::size_t side;
};

/// The whole space R^d. Only meaningful as a composite (projection) set;
/// it turns the composite iteration into the plain one.
struct WholeSpace {
  std::size_t dim;
};

/// Compact convex per-node feasible set. Construct through the factory
/// functions below, which enforce the parameter invariants.
class SetDescriptor {
 public:
  using Variant = std::variant<Box, L1Ball, L2Ball, Simplex, NuclearBallSym, WholeSpace>;

  static SetDescriptor box(Vector lower, Vector upper);
  static SetDescriptor box(std::size_t dim, double lower, double upper);
  static SetDescriptor l1_ball(double radius, std::size_t dim);
  static SetDescriptor l2_ball(double radius, std::size_t dim);
  static SetDescriptor simplex(std::size_t dim);
  static SetDescriptor nuclear_ball_sym(double radius, std::size_t side);
  static SetDescriptor whole_space(std::size_t dim);

  const Variant& variant() const { return v_; }
  std::size_t dim() const;
  std::string name() const;
  bool is_compact() const { return !std::holds_alternative<WholeSpace>(v_); }
  bool supports_projection() const;
  bool supports_lmo() const { return is_compact(); }
  bool operator==(const SetDescriptor& other) const;

  /// Canonical feasible point: box midpoint, ball and nuclear centre 0,
  /// simplex barycentre.
  Vector center() const;

 private:
  explicit SetDescriptor(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Result of an (in)exact linear minimization.
struct LmoResult {
  Vector point;
  /// Upper bound on <c, point> - min_{y in S} <c, y>; zero for closed-form variants.
  double certified_gap = 0.0;
  int iterations = 0;
};

/// Tuning for the nuclear-ball eigenvector search.
struct EigenSearchOptions {
  int max_iterations = 20000;
  int max_restarts = 5;
  /// Residual target relative to ||C||_F used when no gap budget is given.
  double exact_relative_residual = 1e-10;
  /// Certified gap, relative to theta ||C||_F, accepted when no budget is given.
  double exact_relative_gap = 1e-12;
  std::uint64_t restart_seed = 0x5eedULL;
};

/// argmin_{y in S} <c, y> with deterministic tie-breaking.
Vector lmo(const SetDescriptor& s, const Vector& c);

/// Point y in S whose linear objective is within `eps` of the minimum. For
/// the nuclear ball the eigenvector search stops once a trace-power bound on
/// ||C_s||_2 certifies the gap; all other variants are solved exactly.
LmoResult lmo_inexact(const SetDescriptor& s, const Vector& c, double eps,
                      const EigenSearchOptions& opts = {});

/// Euclidean projection. Box, L2Ball, Simplex and WholeSpace only; other
/// variants throw CapabilityError.
Vector project(const SetDescriptor& s, const Vector& c);

/// A valid bound on max_{x,x' in S} ||x - x'||^2.
double squared_diameter(const SetDescriptor& s);

/// Membership test with absolute tolerance `tol`.
bool contains(const SetDescriptor& s, const Vector& x, double tol);

/// Sum of singular values of a square matrix.
double nuclear_norm(const Matrix& m);

/// Reshape a flattened block into a side x side matrix (column-major).
inline Eigen::Map<const Matrix> as_matrix(const Vector& v, std::size_t side) {
  return Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(side),
                                  static_cast<Eigen::Index>(side));
}
inline Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace dcg

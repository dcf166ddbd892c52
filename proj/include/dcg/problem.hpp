#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "dcg/block_vector.hpp"
#include "dcg/graph.hpp"
#include "dcg/oracles.hpp"

namespace dcg {

/// Local objective f_i held by one node.
struct NodeObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  /// beta_i such that f_i and (beta_i/2)||.||^2 - f_i are convex.
  double smoothness = 0.0;
};

/// f_i(x) = weight * ||x - target||^2.
NodeObjective quadratic_objective(Vector target, double weight = 1.0);

/// f_i(x) = <c, x>.
NodeObjective linear_objective(Vector c);

/// minimize sum_i f_i(x_i) s.t. E^T x = 0, x_i in X_i (and x_i in Y_i when
/// composite sets are attached). Immutable once built.
class ConsensusProblem {
 public:
  /// `beta` defaults to the largest per-node smoothness; delta is the sum of
  /// the per-node squared diameters of X_i.
  ConsensusProblem(Graph graph, std::vector<NodeObjective> objectives,
                   std::vector<SetDescriptor> x_sets,
                   std::optional<std::vector<SetDescriptor>> y_sets = std::nullopt,
                   std::optional<double> beta = std::nullopt);

  const Graph& graph() const { return graph_; }
  std::size_t node_count() const { return graph_.node_count(); }
  std::size_t block_dim() const { return block_dim_; }
  const NodeObjective& objective(std::size_t i) const { return objectives_[i]; }
  const SetDescriptor& x_set(std::size_t i) const { return x_sets_[i]; }
  const std::vector<SetDescriptor>& x_sets() const { return x_sets_; }
  bool composite() const { return y_sets_.has_value(); }
  const SetDescriptor& y_set(std::size_t i) const { return (*y_sets_)[i]; }
  const std::optional<std::vector<SetDescriptor>>& y_sets() const { return y_sets_; }

  double beta() const { return beta_; }
  double delta() const { return delta_; }
  double laplacian_norm() const { return laplacian_norm_; }

  double value(const BlockVector& x) const;
  BlockVector gradient(const BlockVector& x) const;

  /// ||x - P_Y(x)||, zero without composite sets.
  double feasibility_error(const BlockVector& x) const;
  /// ||E^T x||.
  double consensus_error(const BlockVector& x) const;

  /// Same problem with the composite sets dropped or replaced.
  ConsensusProblem without_composite() const;
  ConsensusProblem with_composite(std::vector<SetDescriptor> y_sets) const;

  /// The canonical starting point: each X_i's centre.
  BlockVector canonical_point() const;

 private:
  Graph graph_;
  std::vector<NodeObjective> objectives_;
  std::vector<SetDescriptor> x_sets_;
  std::optional<std::vector<SetDescriptor>> y_sets_;
  std::size_t block_dim_;
  double beta_;
  double delta_;
  double laplacian_norm_;
};

/// Two-node path, f_1 = x^2, f_2 = (x-1)^2, X_i = [0,1]. Optimum z = 1/2, f* = 1/2.
ConsensusProblem quadratic_toy();

/// Same template on an arbitrary graph: f_i = weight_i ||x - a_i||^2 over a
/// shared X (and optional shared Y).
ConsensusProblem quadratic_consensus(Graph g, std::vector<Vector> targets,
                                     std::vector<double> weights, const SetDescriptor& x_set,
                                     std::optional<SetDescriptor> y_set = std::nullopt);

}  // namespace dcg

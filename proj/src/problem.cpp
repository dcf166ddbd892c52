#include "dcg/problem.hpp"

#include <algorithm>
#include <cmath>

namespace dcg {

NodeObjective quadratic_objective(Vector target, double weight) {
  if (!(weight > 0.0)) throw DomainError("quadratic objective weight must be > 0");
  NodeObjective f;
  f.value = [target, weight](const Vector& x) { return weight * (x - target).squaredNorm(); };
  f.gradient = [target, weight](const Vector& x) -> Vector { return 2.0 * weight * (x - target); };
  f.smoothness = 2.0 * weight;
  return f;
}

NodeObjective linear_objective(Vector c) {
  NodeObjective f;
  f.value = [c](const Vector& x) { return c.dot(x); };
  f.gradient = [c](const Vector&) -> Vector { return c; };
  f.smoothness = 0.0;
  return f;
}

ConsensusProblem::ConsensusProblem(Graph graph, std::vector<NodeObjective> objectives,
                                   std::vector<SetDescriptor> x_sets,
                                   std::optional<std::vector<SetDescriptor>> y_sets,
                                   std::optional<double> beta)
    : graph_(std::move(graph)),
      objectives_(std::move(objectives)),
      x_sets_(std::move(x_sets)),
      y_sets_(std::move(y_sets)) {
  const std::size_t n = graph_.node_count();
  if (objectives_.size() != n) throw DimensionError("one objective per node required");
  if (x_sets_.size() != n) throw DimensionError("one X set per node required");
  block_dim_ = x_sets_.front().dim();
  for (const auto& s : x_sets_) {
    if (s.dim() != block_dim_) throw DimensionError("all X sets must share a block dimension");
    if (!s.is_compact()) throw DomainError("X sets must be compact");
  }
  if (y_sets_) {
    if (y_sets_->size() != n) throw DimensionError("Y sets must be given for all nodes or none");
    for (const auto& s : *y_sets_) {
      if (s.dim() != block_dim_) throw DimensionError("Y sets must match the block dimension");
      if (!s.supports_projection())
        throw CapabilityError("Y set " + s.name() + " has no projection oracle");
    }
  }
  for (const auto& f : objectives_)
    if (!f.value || !f.gradient) throw DomainError("objective without value or gradient");

  double max_smooth = 0.0;
  for (const auto& f : objectives_) max_smooth = std::max(max_smooth, f.smoothness);
  beta_ = beta.value_or(max_smooth);
  if (!(beta_ > 0.0)) throw DomainError("smoothness constant beta must be > 0");

  delta_ = 0.0;
  for (const auto& s : x_sets_) delta_ += squared_diameter(s);
  if (!(delta_ > 0.0)) throw DomainError("squared diameter delta must be > 0");

  laplacian_norm_ = dcg::laplacian_norm(graph_);
}

double ConsensusProblem::value(const BlockVector& x) const {
  if (x.block_count() != node_count()) throw DimensionError("value: block count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < node_count(); ++i) sum += objectives_[i].value(x.block(i));
  return sum;
}

BlockVector ConsensusProblem::gradient(const BlockVector& x) const {
  if (x.block_count() != node_count()) throw DimensionError("gradient: block count mismatch");
  BlockVector g(node_count(), block_dim_);
  for (std::size_t i = 0; i < node_count(); ++i) g.block(i) = objectives_[i].gradient(x.block(i));
  return g;
}

double ConsensusProblem::feasibility_error(const BlockVector& x) const {
  if (!y_sets_) return 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < node_count(); ++i) {
    const Vector xi = x.block(i);
    sq += (xi - project((*y_sets_)[i], xi)).squaredNorm();
  }
  return std::sqrt(sq);
}

double ConsensusProblem::consensus_error(const BlockVector& x) const {
  return incidence_apply_t(graph_, x).norm();
}

ConsensusProblem ConsensusProblem::without_composite() const {
  return ConsensusProblem(graph_, objectives_, x_sets_, std::nullopt, beta_);
}

ConsensusProblem ConsensusProblem::with_composite(std::vector<SetDescriptor> y_sets) const {
  return ConsensusProblem(graph_, objectives_, x_sets_, std::move(y_sets), beta_);
}

BlockVector ConsensusProblem::canonical_point() const {
  BlockVector x(node_count(), block_dim_);
  for (std::size_t i = 0; i < node_count(); ++i) x.block(i) = x_sets_[i].center();
  return x;
}

ConsensusProblem quadratic_toy() {
  Graph g(2, {{0, 1}});
  Vector a0 = Vector::Constant(1, 0.0);
  Vector a1 = Vector::Constant(1, 1.0);
  return quadratic_consensus(std::move(g), {a0, a1}, {1.0, 1.0}, SetDescriptor::box(1, 0.0, 1.0));
}

ConsensusProblem quadratic_consensus(Graph g, std::vector<Vector> targets,
                                     std::vector<double> weights, const SetDescriptor& x_set,
                                     std::optional<SetDescriptor> y_set) {
  const std::size_t n = g.node_count();
  if (targets.size() != n || weights.size() != n)
    throw DimensionError("quadratic_consensus: one target and weight per node");
  std::vector<NodeObjective> f;
  f.reserve(n);
  for (std::size_t i = 0; i < n; ++i) f.push_back(quadratic_objective(targets[i], weights[i]));
  std::optional<std::vector<SetDescriptor>> ys;
  if (y_set) ys = std::vector<SetDescriptor>(n, *y_set);
  return ConsensusProblem(std::move(g), std::move(f), std::vector<SetDescriptor>(n, x_set),
                          std::move(ys));
}

}  // namespace dcg

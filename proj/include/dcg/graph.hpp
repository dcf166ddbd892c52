#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dcg/block_vector.hpp"

namespace dcg {

/// Oriented edge; the incidence matrix has +1 at `head` and -1 at `tail`.
struct Edge {
  std::size_t head;
  std::size_t tail;
  bool operator==(const Edge&) const = default;
};

using Position = std::array<double, 3>;

/// Undirected connected graph with a fixed edge orientation. Immutable.
class Graph {
 public:
  /// Validates the edge list (no self loops, no duplicate unordered pairs,
  /// indices in range) and connectivity. Throws DomainError or
  /// ConnectivityError.
  Graph(std::size_t node_count, std::vector<Edge> edges,
        std::vector<Position> positions = {});

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Position>& positions() const { return positions_; }
  bool has_positions() const { return !positions_.empty(); }

  /// Neighbours of node i in increasing index order.
  std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }
  bool has_edge(std::size_t i, std::size_t j) const;

  bool operator==(const Graph& other) const;

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  std::vector<Position> positions_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Breadth-first connectivity test on an arbitrary edge list.
bool is_connected(std::size_t node_count, std::span<const Edge> edges);

/// (E^T x)_e = x_head(e) - x_tail(e); one block per edge.
BlockVector incidence_apply_t(const Graph& g, const BlockVector& x);

/// (E z)_i = sum over edges with head i of z_e minus sum over edges with tail i.
BlockVector incidence_apply(const Graph& g, const BlockVector& z);

/// (L x)_i = sum_{j in N(i)} (x_i - x_j), evaluated from neighbour blocks only.
BlockVector laplacian_apply(const Graph& g, const BlockVector& x);

/// Dense node x node Laplacian (the unlifted E E^T).
Matrix laplacian_matrix(const Graph& g);

/// Largest eigenvalue of the unlifted Laplacian. Dense symmetric
/// eigendecomposition up to 64 nodes, power iteration above that.
double laplacian_norm(const Graph& g);

/// Power-iteration estimate of the same quantity, exposed for large graphs
/// and for cross-checking. Relative tolerance 1e-10, iteration cap 1e6.
double laplacian_norm_power(const Graph& g);

/// Geometric graph on uniform points in [0,1]^3 with edges between points at
/// distance <= radius. Disconnected samples are redrawn with seed+1, seed+2,
/// ...; throws ConnectivityError after `max_attempts` failures.
Graph random_geometric_graph(std::uint64_t seed, std::size_t n_nodes, double radius,
                             int max_attempts = 1000);

/// Seed that produced the last successful draw of random_geometric_graph.
struct GeometricSample {
  Graph graph;
  std::uint64_t seed_used;
  int attempts;
};
GeometricSample sample_geometric_graph(std::uint64_t seed, std::size_t n_nodes, double radius,
                                       int max_attempts = 1000);

/// Text format: `nodes N`, then `edge i j` (1-based, i < j), then optional
/// `pos i x y z` lines.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);

std::string format_double(double v);

}  // namespace dcg

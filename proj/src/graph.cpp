#include "dcg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include "dcg/rng.hpp"

namespace dcg {

Graph::Graph(std::size_t node_count, std::vector<Edge> edges, std::vector<Position> positions)
    : node_count_(node_count), edges_(std::move(edges)), positions_(std::move(positions)) {
  if (node_count_ == 0) throw DomainError("graph needs at least one node");
  if (!positions_.empty() && positions_.size() != node_count_)
    throw DomainError("positions must be given for every node");

  std::set<std::pair<std::size_t, std::size_t>> seen;
  adjacency_.resize(node_count_);
  for (const Edge& e : edges_) {
    if (e.head >= node_count_ || e.tail >= node_count_)
      throw DomainError("edge endpoint out of range");
    if (e.head == e.tail) throw DomainError("self-loop at node " + std::to_string(e.head + 1));
    auto key = std::minmax(e.head, e.tail);
    if (!seen.insert(key).second)
      throw DomainError("duplicate edge {" + std::to_string(key.first + 1) + "," +
                        std::to_string(key.second + 1) + "}");
    adjacency_[e.head].push_back(e.tail);
    adjacency_[e.tail].push_back(e.head);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  if (!is_connected(node_count_, edges_)) throw ConnectivityError("graph is not connected");
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  if (i >= node_count_) return false;
  return std::binary_search(adjacency_[i].begin(), adjacency_[i].end(), j);
}

bool Graph::operator==(const Graph& other) const {
  return node_count_ == other.node_count_ && edges_ == other.edges_ &&
         positions_ == other.positions_;
}

bool is_connected(std::size_t node_count, std::span<const Edge> edges) {
  if (node_count == 0) return false;
  std::vector<std::vector<std::size_t>> adj(node_count);
  for (const Edge& e : edges) {
    adj[e.head].push_back(e.tail);
    adj[e.tail].push_back(e.head);
  }
  std::vector<bool> visited(node_count, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  visited[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t w : adj[v]) {
      if (!visited[w]) {
        visited[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == node_count;
}

namespace {

void require_node_blocks(const Graph& g, const BlockVector& x) {
  if (x.block_count() != g.node_count())
    throw DimensionError("expected " + std::to_string(g.node_count()) + " node blocks, got " +
                         std::to_string(x.block_count()));
}

}  // namespace

BlockVector incidence_apply_t(const Graph& g, const BlockVector& x) {
  require_node_blocks(g, x);
  BlockVector out(g.edge_count(), x.block_dim());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edges()[e];
    out.block(e) = x.block(edge.head) - x.block(edge.tail);
  }
  return out;
}

BlockVector incidence_apply(const Graph& g, const BlockVector& z) {
  if (z.block_count() != g.edge_count())
    throw DimensionError("expected " + std::to_string(g.edge_count()) + " edge blocks, got " +
                         std::to_string(z.block_count()));
  BlockVector out(g.node_count(), z.block_dim());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edges()[e];
    out.block(edge.head) += z.block(e);
    out.block(edge.tail) -= z.block(e);
  }
  return out;
}

BlockVector laplacian_apply(const Graph& g, const BlockVector& x) {
  require_node_blocks(g, x);
  BlockVector out(g.node_count(), x.block_dim());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto acc = out.block(i);
    for (std::size_t j : g.neighbors(i)) acc += x.block(i) - x.block(j);
  }
  return out;
}

Matrix laplacian_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Matrix lap = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto h = static_cast<Eigen::Index>(e.head);
    const auto t = static_cast<Eigen::Index>(e.tail);
    lap(h, h) += 1.0;
    lap(t, t) += 1.0;
    lap(h, t) -= 1.0;
    lap(t, h) -= 1.0;
  }
  return lap;
}

double laplacian_norm(const Graph& g) {
  if (g.node_count() > 64) return laplacian_norm_power(g);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian_matrix(g), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double laplacian_norm_power(const Graph& g) {
  const std::size_t n = g.node_count();
  if (g.edge_count() == 0) return 0.0;
  // All-ones spans the nullspace, so the ramp keeps the start away from it.
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    v(static_cast<Eigen::Index>(i)) = 1.0 + static_cast<double>(i + 1) / static_cast<double>(n);
  v.normalize();

  auto apply = [&](const Vector& in) {
    Vector out = Vector::Zero(in.size());
    for (const Edge& e : g.edges()) {
      const auto h = static_cast<Eigen::Index>(e.head);
      const auto t = static_cast<Eigen::Index>(e.tail);
      const double diff = in(h) - in(t);
      out(h) += diff;
      out(t) -= diff;
    }
    return out;
  };

  double rayleigh = 0.0;
  constexpr long kMaxIter = 1'000'000;
  for (long it = 0; it < kMaxIter; ++it) {
    Vector w = apply(v);
    const double next = v.dot(w);
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    const double residual = (w - next * v).norm();
    v = w / wnorm;
    if (residual <= 1e-10 * next || (it > 0 && std::abs(next - rayleigh) <= 1e-14 * next)) {
      return next;
    }
    rayleigh = next;
  }
  throw Error("laplacian_norm_power: power iteration did not converge");
}

GeometricSample sample_geometric_graph(std::uint64_t seed, std::size_t n_nodes, double radius,
                                       int max_attempts) {
  if (n_nodes < 2) throw DomainError("random_geometric_graph needs at least 2 nodes");
  if (!(radius > 0.0)) throw DomainError("random_geometric_graph radius must be > 0");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Rng rng(s);
    std::vector<Position> pos(n_nodes);
    for (auto& p : pos)
      for (double& c : p) c = rng.uniform();
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t j = i + 1; j < n_nodes; ++j) {
        double sq = 0.0;
        for (int c = 0; c < 3; ++c) sq += (pos[i][c] - pos[j][c]) * (pos[i][c] - pos[j][c]);
        if (std::sqrt(sq) <= radius) edges.push_back({i, j});
      }
    }
    if (is_connected(n_nodes, edges))
      return {Graph(n_nodes, std::move(edges), std::move(pos)), s, attempt + 1};
  }
  throw ConnectivityError("no connected geometric graph with radius " + format_double(radius) +
                              " after " + std::to_string(max_attempts) + " attempts",
                          max_attempts);
}

Graph random_geometric_graph(std::uint64_t seed, std::size_t n_nodes, double radius,
                             int max_attempts) {
  return sample_geometric_graph(seed, n_nodes, radius, max_attempts).graph;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "nodes " << g.node_count() << '\n';
  for (const Edge& e : g.edges()) {
    const auto [lo, hi] = std::minmax(e.head, e.tail);
    out << "edge " << lo + 1 << ' ' << hi + 1 << '\n';
  }
  if (g.has_positions()) {
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const Position& p = g.positions()[i];
      out << "pos " << i + 1 << ' ' << format_double(p[0]) << ' ' << format_double(p[1]) << ' '
          << format_double(p[2]) << '\n';
    }
  }
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_nodes = false;
  std::vector<Edge> edges;
  std::vector<Position> pos;
  std::vector<bool> pos_set;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> DomainError {
    return DomainError("graph file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "nodes") {
      if (have_nodes) throw fail("repeated nodes line");
      if (!(ls >> n) || n == 0) throw fail("bad node count");
      have_nodes = true;
      pos.assign(n, Position{});
      pos_set.assign(n, false);
    } else if (tag == "edge") {
      std::size_t i = 0, j = 0;
      if (!have_nodes) throw fail("edge before nodes line");
      if (!(ls >> i >> j)) throw fail("bad edge line");
      if (i < 1 || j > n || i >= j) throw fail("edge must satisfy 1 <= i < j <= N");
      edges.push_back({i - 1, j - 1});
    } else if (tag == "pos") {
      std::size_t i = 0;
      Position p{};
      if (!have_nodes) throw fail("pos before nodes line");
      if (!(ls >> i >> p[0] >> p[1] >> p[2]) || i < 1 || i > n) throw fail("bad pos line");
      pos[i - 1] = p;
      pos_set[i - 1] = true;
    } else {
      // Other tags belong to files that embed a graph (instance dumps).
      continue;
    }
  }
  if (!have_nodes) throw DomainError("graph file has no nodes line");
  const auto set_count = std::count(pos_set.begin(), pos_set.end(), true);
  if (set_count != 0 && static_cast<std::size_t>(set_count) != n)
    throw DomainError("graph file gives positions for only some nodes");
  if (set_count == 0) pos.clear();
  return Graph(n, std::move(edges), std::move(pos));
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open graph file " + path);
  return read_graph(in);
}

}  // namespace dcg

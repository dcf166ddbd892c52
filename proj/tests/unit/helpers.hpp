#pragma once

#include <initializer_list>
#include <vector>

#include "dcg/block_vector.hpp"
#include "dcg/graph.hpp"
#include "dcg/rng.hpp"

namespace dcg::test {

// Node-indexed vector of scalar blocks.
inline BlockVector scalars(std::initializer_list<double> values) {
  BlockVector x(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) x.block(i++)(0) = v;
  return x;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline BlockVector random_blocks(Rng& rng, std::size_t count, std::size_t dim) {
  BlockVector x(count, dim);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < dim; ++j) x.block(i)(static_cast<Eigen::Index>(j)) = rng.normal();
  return x;
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  e.push_back({0, n - 1});
  return Graph(n, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph(n, e);
}

}  // namespace dcg::test

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcg/graph.hpp"
#include "dcg/problem.hpp"

namespace dcg::matcomp {

/// Distributed completion of a noisy pairwise-distance matrix. Node i holds
/// f_i(x) = ||o_i .* (x - d)||_F^2 over symmetric x with ||x||_* <= theta,
/// and the box l_i <= x <= u_i as its composite set.
struct Instance {
  Graph graph;
  /// Symmetric measurement matrix, zero diagonal.
  Matrix d;
  /// Observation masks, one per node; o_i is 1 at (i,j) and (j,i) for j in N(i).
  std::vector<Matrix> masks;
  double theta;
  Matrix lower;
  Matrix upper;
  double noise_std;
  std::uint64_t seed;

  std::size_t side() const { return static_cast<std::size_t>(d.rows()); }
};

struct BuildOptions {
  std::size_t n_nodes = 10;
  double radius = 0.6;
  double noise_std = 0.1;
  /// Nuclear-ball radius; defaults to ||d||_* of the generated measurement.
  std::optional<double> theta;
  /// Off-diagonal entries of every u_i.
  double upper_offdiag = 3.0;
};

Instance build_instance(std::uint64_t seed, const BuildOptions& opts = {});

/// 2 o_i .* (x - d), with x given flattened column-major.
Vector gradient(const Instance& inst, std::size_t node, const Vector& x);
double objective(const Instance& inst, std::size_t node, const Vector& x);

/// X_i = symmetric nuclear ball, Y_i = box [l_i, u_i], beta = 2, Frobenius
/// geometry on flattened blocks.
ConsensusProblem assemble_problem(const Instance& inst);

/// Graph file followed by `theta`, `noise_std`, `seed`, the `d` block and one
/// `mask i` block per node, matrices as row-major text rows.
void write_instance(std::ostream& out, const Instance& inst);
Instance read_instance(std::istream& in);

}  // namespace dcg::matcomp

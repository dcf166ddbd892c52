#include "dcg/matcomp.hpp"

#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "dcg/rng.hpp"

namespace dcg::matcomp {

namespace {

// Noise stream kept separate from the position stream of the graph sampler.
constexpr std::uint64_t kNoiseStream = 0x9E3779B97F4A7C15ULL;

Matrix observation_mask(const Graph& g, std::size_t node) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Matrix o = Matrix::Zero(n, n);
  const auto i = static_cast<Eigen::Index>(node);
  for (std::size_t j : g.neighbors(node)) {
    o(i, static_cast<Eigen::Index>(j)) = 1.0;
    o(static_cast<Eigen::Index>(j), i) = 1.0;
  }
  return o;
}

void require_block(const Instance& inst, std::size_t node, const Vector& x) {
  if (node >= inst.masks.size()) throw DimensionError("matcomp: node index out of range");
  const auto n = static_cast<Eigen::Index>(inst.side());
  if (x.size() != n * n) throw DimensionError("matcomp: block must have side^2 entries");
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace

Instance build_instance(std::uint64_t seed, const BuildOptions& opts) {
  if (opts.theta && !(*opts.theta > 0.0)) throw DomainError("matcomp: theta must be > 0");
  if (!(opts.noise_std >= 0.0)) throw DomainError("matcomp: noise_std must be >= 0");
  GeometricSample sample = sample_geometric_graph(seed, opts.n_nodes, opts.radius);
  const Graph& g = sample.graph;
  const auto n = static_cast<Eigen::Index>(g.node_count());

  Rng noise(sample.seed_used ^ kNoiseStream);
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& pi = g.positions()[static_cast<std::size_t>(i)];
      const auto& pj = g.positions()[static_cast<std::size_t>(j)];
      double sq = 0.0;
      for (int c = 0; c < 3; ++c) sq += (pi[c] - pj[c]) * (pi[c] - pj[c]);
      const double xi = opts.noise_std > 0.0 ? opts.noise_std * noise.normal() : 0.0;
      d(i, j) = std::sqrt(sq) + xi;
      d(j, i) = d(i, j);
    }
  }

  std::vector<Matrix> masks;
  masks.reserve(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) masks.push_back(observation_mask(g, i));

  Matrix upper = Matrix::Constant(n, n, opts.upper_offdiag);
  upper.diagonal().setZero();

  const double theta = opts.theta.value_or(nuclear_norm(d));
  if (!(theta > 0.0)) throw DomainError("matcomp: measurement has zero nuclear norm");
  return Instance{std::move(sample.graph), std::move(d),         std::move(masks),
                  theta,                   Matrix::Zero(n, n),   std::move(upper),
                  opts.noise_std,          sample.seed_used};
}

Vector gradient(const Instance& inst, std::size_t node, const Vector& x) {
  require_block(inst, node, x);
  const auto side = inst.side();
  const Matrix g = 2.0 * inst.masks[node].cwiseProduct(as_matrix(x, side) - inst.d);
  return flatten(g);
}

double objective(const Instance& inst, std::size_t node, const Vector& x) {
  require_block(inst, node, x);
  return inst.masks[node].cwiseProduct(as_matrix(x, inst.side()) - inst.d).squaredNorm();
}

ConsensusProblem assemble_problem(const Instance& inst) {
  const std::size_t n = inst.graph.node_count();
  const std::size_t side = inst.side();
  auto shared = std::make_shared<const Instance>(inst);
  std::vector<NodeObjective> f;
  std::vector<SetDescriptor> xs;
  std::vector<SetDescriptor> ys;
  for (std::size_t i = 0; i < n; ++i) {
    NodeObjective obj;
    obj.value = [shared, i](const Vector& x) { return objective(*shared, i, x); };
    obj.gradient = [shared, i](const Vector& x) { return gradient(*shared, i, x); };
    obj.smoothness = 2.0;
    f.push_back(std::move(obj));
    xs.push_back(SetDescriptor::nuclear_ball_sym(inst.theta, side));
    ys.push_back(SetDescriptor::box(flatten(inst.lower), flatten(inst.upper)));
  }
  return ConsensusProblem(inst.graph, std::move(f), std::move(xs), std::move(ys), 2.0);
}

void write_instance(std::ostream& out, const Instance& inst) {
  write_graph(out, inst.graph);
  out << "theta " << format_double(inst.theta) << '\n';
  out << "noise_std " << format_double(inst.noise_std) << '\n';
  out << "seed " << inst.seed << '\n';
  if (inst.side() > 1) out << "upper_offdiag " << format_double(inst.upper(0, 1)) << '\n';
  out << "d\n";
  write_matrix(out, inst.d);
  for (std::size_t i = 0; i < inst.masks.size(); ++i) {
    out << "mask " << i + 1 << '\n';
    write_matrix(out, inst.masks[i]);
  }
}

Instance read_instance(std::istream& in) {
  std::stringstream graph_part;
  std::string line;
  double theta = 0.0, noise_std = 0.0, upper_offdiag = 3.0;
  std::uint64_t seed = 0;
  std::vector<std::string> rest;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "nodes" || tag == "edge" || tag == "pos") {
      graph_part << line << '\n';
    } else if (tag == "theta") {
      ls >> theta;
    } else if (tag == "noise_std") {
      ls >> noise_std;
    } else if (tag == "upper_offdiag") {
      ls >> upper_offdiag;
    } else if (tag == "seed") {
      ls >> seed;
    } else if (!tag.empty()) {
      rest.push_back(line);
    }
  }
  Graph g = read_graph(graph_part);
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::size_t cursor = 0;
  auto read_block = [&](const std::string& header) {
    if (cursor >= rest.size() || rest[cursor] != header)
      throw DomainError("instance file: expected '" + header + "'");
    ++cursor;
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (cursor >= rest.size()) throw DomainError("instance file: truncated matrix");
      std::istringstream row(rest[cursor++]);
      for (Eigen::Index c = 0; c < n; ++c)
        if (!(row >> m(r, c))) throw DomainError("instance file: short matrix row");
    }
    return m;
  };
  Matrix d = read_block("d");
  std::vector<Matrix> masks;
  for (Eigen::Index i = 0; i < n; ++i) masks.push_back(read_block("mask " + std::to_string(i + 1)));
  if (!(theta > 0.0)) throw DomainError("instance file: missing or invalid theta");
  Matrix upper = Matrix::Constant(n, n, upper_offdiag);
  upper.diagonal().setZero();
  return Instance{std::move(g), std::move(d), std::move(masks), theta, Matrix::Zero(n, n),
                  std::move(upper), noise_std, seed};
}

}  // namespace dcg::matcomp

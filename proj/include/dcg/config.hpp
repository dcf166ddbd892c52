#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dcg/algorithms.hpp"
#include "dcg/oracles.hpp"
#include "dcg/problem.hpp"

namespace dcg {

/// A set written as `box LO HI`, `l1 R`, `l2 R`, `simplex`, `nuclear R` or
/// `whole`. Box bounds are scalars applied to every coordinate.
struct SetSpec {
  std::string kind = "box";
  double a = 0.0;
  double b = 1.0;

  bool operator==(const SetSpec&) const = default;
  SetDescriptor build(std::size_t dim) const;
  std::string to_string() const;
  static SetSpec parse(const std::string& text);
};

/// Graph written as `path N`, `cycle N`, `complete N`, `geometric N R` or `file PATH`.
struct GraphSpec {
  std::string kind = "path";
  std::size_t nodes = 2;
  double radius = 0.0;
  std::string path;

  bool operator==(const GraphSpec&) const = default;
  Graph build(std::uint64_t seed) const;
  std::string to_string() const;
  static GraphSpec parse(const std::string& text);
};

/// Everything `dcg run` reads from a config file.
///
///   [problem]  type, nodes, radius, noise_std, theta, upper_offdiag (matcomp);
///              graph, dim, x_set, y_set (custom)
///   [solver]   algorithm, r0, max_iter, mode, kappa, init, log_every, seed, threads
///   [output]   trace
///   [bounds]   rho
struct RunConfig {
  std::string problem = "quadratic-toy";

  std::size_t nodes = 10;
  double radius = 0.6;
  double noise_std = 0.1;
  std::optional<double> theta;
  double upper_offdiag = 3.0;

  GraphSpec graph;
  std::size_t dim = 1;
  SetSpec x_set;
  std::optional<SetSpec> y_set;

  /// rc drops composite sets; rc-co adds the whole-space sentinel when the
  /// problem has none. Empty means: rc-co when the problem is composite.
  std::string algorithm;
  double r0 = 1.0;
  long max_iter = 1000;
  std::string mode = "exact";
  double kappa = 0.0;
  std::string init = "canonical";
  long log_every = 1;
  std::uint64_t seed = 0;
  int threads = 1;

  std::string trace_path;
  std::optional<double> rho;

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
  SolverConfig solver() const;
};

/// Throws ConfigError on syntax errors, unknown sections or keys, and bad values.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig read_config_file(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// The problem selected by the config, with the algorithm's composite rule applied.
ConsensusProblem build_problem(const RunConfig& cfg);

}  // namespace dcg

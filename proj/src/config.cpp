#include "dcg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "dcg/errors.hpp"
#include "dcg/matcomp.hpp"
#include "dcg/rng.hpp"

namespace dcg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& text, const std::string& key) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  return v;
}

template <class Int>
Int to_integer(const std::string& text, const std::string& key) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

bool is_perfect_square(std::size_t n, std::size_t* side) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side) *side = r;
  return r * r == n;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem",
       {"type", "nodes", "radius", "noise_std", "theta", "upper_offdiag", "graph", "dim", "x_set",
        "y_set"}},
      {"solver",
       {"algorithm", "r0", "max_iter", "mode", "kappa", "init", "log_every", "seed", "threads"}},
      {"output", {"trace"}},
      {"bounds", {"rho"}},
  };
  return keys;
}

void assign(RunConfig& c, const std::string& section, const std::string& key,
            const std::string& value) {
  const std::string name = section + "." + key;
  if (section == "problem") {
    if (key == "type") c.problem = value;
    else if (key == "nodes") c.nodes = to_integer<std::size_t>(value, name);
    else if (key == "radius") c.radius = to_double(value, name);
    else if (key == "noise_std") c.noise_std = to_double(value, name);
    else if (key == "theta") c.theta = to_double(value, name);
    else if (key == "upper_offdiag") c.upper_offdiag = to_double(value, name);
    else if (key == "graph") c.graph = GraphSpec::parse(value);
    else if (key == "dim") c.dim = to_integer<std::size_t>(value, name);
    else if (key == "x_set") c.x_set = SetSpec::parse(value);
    else if (key == "y_set") c.y_set = SetSpec::parse(value);
  } else if (section == "solver") {
    if (key == "algorithm") c.algorithm = value;
    else if (key == "r0") c.r0 = to_double(value, name);
    else if (key == "max_iter") c.max_iter = to_integer<long>(value, name);
    else if (key == "mode") c.mode = value;
    else if (key == "kappa") c.kappa = to_double(value, name);
    else if (key == "init") c.init = value;
    else if (key == "log_every") c.log_every = to_integer<long>(value, name);
    else if (key == "seed") c.seed = to_integer<std::uint64_t>(value, name);
    else if (key == "threads") c.threads = to_integer<int>(value, name);
  } else if (section == "output") {
    c.trace_path = value;
  } else if (section == "bounds") {
    c.rho = to_double(value, name);
  }
}

}  // namespace

SetDescriptor SetSpec::build(std::size_t dim) const {
  if (kind == "box") return SetDescriptor::box(dim, a, b);
  if (kind == "l1") return SetDescriptor::l1_ball(a, dim);
  if (kind == "l2") return SetDescriptor::l2_ball(a, dim);
  if (kind == "simplex") return SetDescriptor::simplex(dim);
  if (kind == "whole") return SetDescriptor::whole_space(dim);
  if (kind == "nuclear") {
    std::size_t side = 0;
    if (!is_perfect_square(dim, &side)) throw ConfigError("nuclear set needs dim = side^2");
    return SetDescriptor::nuclear_ball_sym(a, side);
  }
  throw ConfigError("unknown set kind '" + kind + "'");
}

std::string SetSpec::to_string() const {
  if (kind == "box") return "box " + format_double(a) + " " + format_double(b);
  if (kind == "l1" || kind == "l2" || kind == "nuclear") return kind + " " + format_double(a);
  return kind;
}

SetSpec SetSpec::parse(const std::string& text) {
  const auto w = split_words(text);
  if (w.empty()) throw ConfigError("empty set specification");
  SetSpec s;
  s.kind = w[0];
  std::size_t params = 0;
  if (s.kind == "box") params = 2;
  else if (s.kind == "l1" || s.kind == "l2" || s.kind == "nuclear") params = 1;
  else if (s.kind != "simplex" && s.kind != "whole")
    throw ConfigError("unknown set kind '" + s.kind + "'");
  if (w.size() != params + 1)
    throw ConfigError("set '" + s.kind + "' takes " + std::to_string(params) + " parameter(s)");
  if (params >= 1) s.a = to_double(w[1], "set parameter");
  if (params >= 2) s.b = to_double(w[2], "set parameter");
  if (s.kind == "box" && !(s.a <= s.b)) throw ConfigError("box needs lower <= upper");
  if (params == 1 && !(s.a > 0.0)) throw ConfigError("set radius must be > 0");
  return s;
}

Graph GraphSpec::build(std::uint64_t seed) const {
  if (kind == "file") return read_graph_file(path);
  if (kind == "geometric") return random_geometric_graph(seed, nodes, radius);
  std::vector<Edge> edges;
  if (kind == "path" || kind == "cycle") {
    for (std::size_t i = 0; i + 1 < nodes; ++i) edges.push_back({i, i + 1});
    if (kind == "cycle" && nodes > 2) edges.push_back({0, nodes - 1});
  } else if (kind == "complete") {
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t j = i + 1; j < nodes; ++j) edges.push_back({i, j});
  } else {
    throw ConfigError("unknown graph kind '" + kind + "'");
  }
  return Graph(nodes, std::move(edges));
}

std::string GraphSpec::to_string() const {
  if (kind == "file") return "file " + path;
  if (kind == "geometric") return "geometric " + std::to_string(nodes) + " " + format_double(radius);
  return kind + " " + std::to_string(nodes);
}

GraphSpec GraphSpec::parse(const std::string& text) {
  const auto w = split_words(text);
  if (w.empty()) throw ConfigError("empty graph specification");
  GraphSpec g;
  g.kind = w[0];
  if (g.kind == "file") {
    g.path = trim(trim(text).substr(4));
    if (g.path.empty()) throw ConfigError("graph file path missing");
    return g;
  }
  const std::size_t params = g.kind == "geometric" ? 2 : 1;
  if (g.kind != "geometric" && g.kind != "path" && g.kind != "cycle" && g.kind != "complete")
    throw ConfigError("unknown graph kind '" + g.kind + "'");
  if (w.size() != params + 1)
    throw ConfigError("graph '" + g.kind + "' takes " + std::to_string(params) + " parameter(s)");
  g.nodes = to_integer<std::size_t>(w[1], "graph nodes");
  if (g.nodes < 1) throw ConfigError("graph needs at least one node");
  if (params == 2) {
    g.radius = to_double(w[2], "graph radius");
    if (!(g.radius > 0.0)) throw ConfigError("graph radius must be > 0");
  }
  return g;
}

void RunConfig::validate() const {
  if (problem != "matcomp" && problem != "quadratic-toy" && problem != "custom")
    throw ConfigError("problem.type must be matcomp, quadratic-toy or custom");
  if (!algorithm.empty() && algorithm != "rc" && algorithm != "rc-co")
    throw ConfigError("solver.algorithm must be rc or rc-co");
  if (mode != "exact" && mode != "inexact") throw ConfigError("solver.mode must be exact or inexact");
  if (init != "canonical" && init != "lmo-ones")
    throw ConfigError("solver.init must be canonical or lmo-ones");
  if (problem == "matcomp") {
    if (nodes < 1) throw ConfigError("problem.nodes must be >= 1");
    if (!(radius > 0.0)) throw ConfigError("problem.radius must be > 0");
    if (!(noise_std >= 0.0)) throw ConfigError("problem.noise_std must be >= 0");
    if (theta && !(*theta > 0.0)) throw ConfigError("problem.theta must be > 0");
    if (!(upper_offdiag >= 0.0)) throw ConfigError("problem.upper_offdiag must be >= 0");
  }
  if (problem == "custom") {
    if (dim < 1) throw ConfigError("problem.dim must be >= 1");
    if (x_set.kind == "whole") throw ConfigError("problem.x_set must be compact");
    if (x_set.kind == "nuclear" && !is_perfect_square(dim, nullptr))
      throw ConfigError("problem.dim must be a perfect square for a nuclear set");
    if (y_set && y_set->kind != "box" && y_set->kind != "l2" && y_set->kind != "simplex" &&
        y_set->kind != "whole")
      throw ConfigError("problem.y_set must support projection (box, l2, simplex, whole)");
  }
  if (rho && !(*rho >= 0.0)) throw ConfigError("bounds.rho must be >= 0");
  solver().validate();
}

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.r0 = r0;
  s.max_iter = max_iter;
  s.mode = mode == "inexact" ? OracleMode::inexact : OracleMode::exact;
  s.kappa = kappa;
  s.init = init == "lmo-ones" ? InitKind::lmo_of_ones : InitKind::canonical;
  s.log_every = log_every;
  s.seed = seed;
  s.threads = threads;
  return s;
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().contains(section))
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside a section");
    if (key.empty() || value.empty()) throw ConfigError(where + "expected 'key = value'");
    if (!known_keys().at(section).contains(key))
      throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      assign(c, section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "type = " << c.problem << '\n';
  out << "nodes = " << c.nodes << '\n';
  out << "radius = " << format_double(c.radius) << '\n';
  out << "noise_std = " << format_double(c.noise_std) << '\n';
  if (c.theta) out << "theta = " << format_double(*c.theta) << '\n';
  out << "upper_offdiag = " << format_double(c.upper_offdiag) << '\n';
  out << "graph = " << c.graph.to_string() << '\n';
  out << "dim = " << c.dim << '\n';
  out << "x_set = " << c.x_set.to_string() << '\n';
  if (c.y_set) out << "y_set = " << c.y_set->to_string() << '\n';
  out << "\n[solver]\n";
  if (!c.algorithm.empty()) out << "algorithm = " << c.algorithm << '\n';
  out << "r0 = " << format_double(c.r0) << '\n';
  out << "max_iter = " << c.max_iter << '\n';
  out << "mode = " << c.mode << '\n';
  out << "kappa = " << format_double(c.kappa) << '\n';
  out << "init = " << c.init << '\n';
  out << "log_every = " << c.log_every << '\n';
  out << "seed = " << c.seed << '\n';
  out << "threads = " << c.threads << '\n';
  if (!c.trace_path.empty()) out << "\n[output]\ntrace = " << c.trace_path << '\n';
  if (c.rho) out << "\n[bounds]\nrho = " << format_double(*c.rho) << '\n';
  return out.str();
}

ConsensusProblem build_problem(const RunConfig& cfg) {
  cfg.validate();
  auto problem = [&]() -> ConsensusProblem {
    if (cfg.problem == "quadratic-toy") return quadratic_toy();
    if (cfg.problem == "matcomp") {
      matcomp::BuildOptions opts;
      opts.n_nodes = cfg.nodes;
      opts.radius = cfg.radius;
      opts.noise_std = cfg.noise_std;
      opts.theta = cfg.theta;
      opts.upper_offdiag = cfg.upper_offdiag;
      return matcomp::assemble_problem(matcomp::build_instance(cfg.seed, opts));
    }
    Graph g = cfg.graph.build(cfg.seed);
    Rng rng(cfg.seed);
    std::vector<Vector> targets;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      Vector a(static_cast<Eigen::Index>(cfg.dim));
      for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = rng.uniform();
      targets.push_back(std::move(a));
    }
    const std::size_t n = g.node_count();
    std::optional<SetDescriptor> y;
    if (cfg.y_set) y = cfg.y_set->build(cfg.dim);
    return quadratic_consensus(std::move(g), std::move(targets), std::vector<double>(n, 1.0),
                               cfg.x_set.build(cfg.dim), y);
  }();
  if (cfg.algorithm == "rc" && problem.composite()) return problem.without_composite();
  if (cfg.algorithm == "rc-co" && !problem.composite())
    return problem.with_composite(std::vector<SetDescriptor>(
        problem.node_count(), SetDescriptor::whole_space(problem.block_dim())));
  return problem;
}

}  // namespace dcg

#include <cmath>
#include <stdexcept>

#include "dcg/algorithms.hpp"
#include "dcg/matcomp.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace dcg;
using namespace dcg::test;

namespace {

NodeObjective zero_objective(std::size_t dim) {
  NodeObjective f;
  f.value = [](const Vector&) { return 0.0; };
  f.gradient = [dim](const Vector&) { return Vector::Zero(static_cast<Eigen::Index>(dim)); };
  f.smoothness = 1.0;
  return f;
}

ConsensusProblem random_quadratic(std::uint64_t seed, const SetDescriptor& x,
                                  std::optional<SetDescriptor> y = std::nullopt) {
  Rng rng(seed);
  Graph g = random_geometric_graph(seed, 6, 0.8);
  std::vector<Vector> targets;
  for (std::size_t i = 0; i < 6; ++i) targets.push_back(2.0 * random_blocks(rng, 1, x.dim()).block(0));
  return quadratic_consensus(std::move(g), targets, std::vector<double>(6, 1.0), x, y);
}

SolverConfig config(long iters) {
  SolverConfig c;
  c.max_iter = iters;
  return c;
}

}  // namespace

TEST_CASE("step size and penalty schedules") {
  CHECK(step_size(1) == 1.0);
  CHECK(step_size(3) == 0.5);
  double prev = 1.0;
  for (long k = 2; k < 100000; k *= 3) {
    const double a = step_size(k);
    CHECK(a > 0.0);
    CHECK(a < prev);
    prev = a;
  }
  CHECK(penalty(1, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(penalty(3, 2.0) == 4.0);
  CHECK(penalty(4000000, 1.0) / penalty(1000000, 1.0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(step_size(0), DomainError);
  CHECK_THROWS_AS(penalty(1, 0.0), DomainError);
}

TEST_CASE("inexactness budget") {
  CHECK(eps_budget(3, 1.0, 2.0, 1.0, 2.0, 2.0, false) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(eps_budget(3, 1.0, 2.0, 1.0, 2.0, 2.0, true) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(eps_budget(3, 0.0, 2.0, 1.0, 2.0, 2.0, false) == 0.0);
  double prev = INFINITY;
  for (long k = 1; k < 10000; k += 97) {
    const double e = eps_budget(k, 1.0, 2.0, 1.0, 2.0, 2.0, false);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("rc direction examples") {
  const ConsensusProblem toy = quadratic_toy();
  CHECK(rc_direction(toy, {scalars({0.5, 0.5}), 1}, 7.0) == scalars({1.0, -1.0}));
  CHECK(rc_direction(toy, {scalars({0.0, 1.0}), 1}, 1.0) == scalars({-1.0, 1.0}));

  const Graph c4 = cycle_graph(4);
  std::vector<NodeObjective> f(4, zero_objective(1));
  const ConsensusProblem flat(c4, f, std::vector<SetDescriptor>(4, SetDescriptor::box(1, -5.0, 5.0)));
  const BlockVector x = scalars({1.0, 0.0, 1.0, 0.0});
  CHECK(rc_direction(flat, {x, 1}, 2.5) == 2.5 * laplacian_apply(c4, x));
}

TEST_CASE("rc-co direction examples") {
  const Graph p2 = path_graph(2);
  const SetDescriptor x_set = SetDescriptor::box(2, -3.0, 3.0);
  const SetDescriptor y_set = SetDescriptor::box(2, 0.0, 1.0);
  const ConsensusProblem p = quadratic_consensus(p2, {vec({0.0, 0.0}), vec({1.0, 1.0})}, {1.0, 1.0},
                                                 x_set, y_set);
  const BlockVector inside = BlockVector(Matrix::Constant(2, 2, 0.25));
  CHECK(rc_co_direction(p, {inside, 1}, 3.0) == rc_direction(p, {inside, 1}, 3.0));

  const BlockVector twos = BlockVector(Matrix::Constant(2, 2, 2.0));
  const double r = 1.5;
  BlockVector expected = p.gradient(twos);
  expected.matrix().array() += r * 1.0;
  CHECK(rc_co_direction(p, {twos, 1}, r) == expected);
  CHECK(rc_co_direction(p, {twos, 1}, 0.0) == p.gradient(twos));
  CHECK_THROWS_AS(rc_co_direction(quadratic_toy(), {scalars({0.5, 0.5}), 1}, 1.0), CapabilityError);
}

TEST_CASE("node direction reads only local data") {
  const NodeObjective f = quadratic_objective(vec({1.0}), 1.0);
  const Vector own = vec({0.5});
  const std::vector<Vector> nbrs{vec({0.0}), vec({1.5})};
  const Vector g = node_direction({own, nbrs, f, nullptr}, 2.0);
  // 2 (0.5 - 1) + 2 ((0.5 - 0) + (0.5 - 1.5))
  CHECK(g(0) == doctest::Approx(-2.0));
}

TEST_CASE("rc step examples") {
  const ConsensusProblem toy = quadratic_toy();
  const IterateState next = rc_step(toy, {scalars({0.5, 0.5}), 1}, config(1));
  CHECK(next.k == 2);
  CHECK(next.x == scalars({0.0, 1.0}));

  const ConsensusProblem p = random_quadratic(4, SetDescriptor::l2_ball(1.0, 3));
  IterateState st{p.canonical_point(), 1};
  for (int t = 0; t < 200; ++t) {
    const IterateState n = rc_step(p, st, config(1));
    CHECK((n.x - st.x).norm() <= step_size(st.k) * std::sqrt(p.delta()) + 1e-12);
    st = n;
  }

  // LMO output equal to the current point leaves it unchanged.
  std::vector<NodeObjective> lin(2, linear_objective(vec({1.0, -1.0})));
  const ConsensusProblem lp(path_graph(2), lin,
                            std::vector<SetDescriptor>(2, SetDescriptor::box(2, 0.0, 1.0)), std::nullopt, 1.0);
  const BlockVector vertex = BlockVector::replicate(vec({0.0, 1.0}), 2);
  CHECK(rc_step(lp, {vertex, 7}, config(1)).x == vertex);
}

TEST_CASE("run driver") {
  const ConsensusProblem toy = quadratic_toy();
  const Trace empty = run(toy, config(0));
  REQUIRE(empty.records.size() == 1);
  CHECK(empty.records[0].k == 1);

  SolverConfig cfg = config(100);
  cfg.log_every = 10;
  const Trace t = run(toy, cfg);
  CHECK(t.records.size() == 11);
  CHECK(t.records.back().k == 101);
  CHECK(trace_csv(t) == trace_csv(run(toy, cfg)));

  const Trace long_run = run(toy, config(10000), RunOptions{1.0, 0.5});
  for (const TraceRecord& r : long_run.records) {
    REQUIRE(r.lemma1_residual <= 0.0);
    REQUIRE(r.consensus_err <= r.consensus_bound);
  }
  CHECK(long_run.records.back().f_value == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("run configuration errors") {
  const ConsensusProblem toy = quadratic_toy();
  SolverConfig bad = config(5);
  bad.r0 = 0.0;
  CHECK_THROWS_WITH_AS(run(toy, bad), "r0 must be > 0", ConfigError);
  bad = config(5);
  bad.mode = OracleMode::inexact;
  CHECK_THROWS_AS(run(toy, bad), ConfigError);
  bad = config(5);
  bad.log_every = 0;
  CHECK_THROWS_AS(run(toy, bad), ConfigError);
  bad = config(5);
  bad.init = InitKind::explicit_point;
  bad.initial_point = scalars({2.0, 0.0});
  CHECK_THROWS_AS(run(toy, bad), ConfigError);
}

TEST_CASE("errors during a run leave a partial trace") {
  std::vector<NodeObjective> f(2, quadratic_objective(vec({0.0})));
  f[1].gradient = [](const Vector& x) -> Vector {
    if (x(0) > 0.9) throw std::runtime_error("gradient blew up");
    return 2.0 * (x - vec({1.0}));
  };
  const ConsensusProblem p(path_graph(2), f,
                           std::vector<SetDescriptor>(2, SetDescriptor::box(1, 0.0, 1.0)));
  const Trace t = run(p, config(50));
  REQUIRE(t.error);
  CHECK(t.error->find("gradient blew up") != std::string::npos);
  CHECK(t.records.size() >= 1);
  CHECK(t.records.size() < 51);
}

TEST_CASE("initialization") {
  const ConsensusProblem p = random_quadratic(2, SetDescriptor::simplex(3));
  const BlockVector c = initial_point(p, config(1));
  CHECK(c.block(3)(0) == doctest::Approx(1.0 / 3.0));
  SolverConfig ones = config(1);
  ones.init = InitKind::lmo_of_ones;
  CHECK(initial_point(p, ones).block(0) == vec({1.0, 0.0, 0.0}));
  SolverConfig expl = config(1);
  expl.init = InitKind::explicit_point;
  expl.initial_point = BlockVector::replicate(vec({0.0, 0.0, 1.0}), 6);
  CHECK(initial_point(p, expl) == *expl.initial_point);
}

TEST_CASE("iterates stay feasible") {
  const std::vector<SetDescriptor> sets{SetDescriptor::box(3, -1.0, 0.5), SetDescriptor::l1_ball(1.0, 3),
                                        SetDescriptor::l2_ball(0.7, 3), SetDescriptor::simplex(3),
                                        SetDescriptor::nuclear_ball_sym(1.0, 3)};
  for (const auto& s : sets) {
    for (const bool composite : {false, true}) {
      for (const bool inexact : {false, true}) {
        CAPTURE(s.name());
        std::optional<SetDescriptor> y;
        if (composite) y = SetDescriptor::box(s.dim(), -0.2, 0.2);
        const ConsensusProblem p = random_quadratic(9, s, y);
        SolverConfig cfg = config(300);
        if (inexact) {
          cfg.mode = OracleMode::inexact;
          cfg.kappa = 1.0;
        }
        bool feasible = true;
        RunHooks hooks;
        hooks.on_record = [&](const IterateState& st) {
          for (std::size_t i = 0; i < p.node_count(); ++i)
            feasible = feasible && contains(p.x_set(i), st.x.block(i), 1e-9);
        };
        const Trace t = run(p, cfg, {}, hooks);
        CHECK_FALSE(t.error);
        CHECK(feasible);
        CHECK(t.budget_violations == 0);
      }
    }
  }
}

TEST_CASE("thread count does not change the trace") {
  const ConsensusProblem p = matcomp::assemble_problem(matcomp::build_instance(6));
  SolverConfig cfg = config(200);
  const std::string one = trace_csv(run(p, cfg));
  for (int threads : {2, 3, 4, 16}) {
    cfg.threads = threads;
    CHECK(trace_csv(run(p, cfg)) == one);
  }
}

TEST_CASE("exact mode equals inexact mode with tiny kappa on closed-form oracles") {
  for (const auto& s : {SetDescriptor::box(2, 0.0, 1.0), SetDescriptor::l1_ball(1.0, 2),
                        SetDescriptor::l2_ball(1.0, 2), SetDescriptor::simplex(2)}) {
    const ConsensusProblem p = random_quadratic(5, s);
    SolverConfig exact = config(500);
    SolverConfig inexact = exact;
    inexact.mode = OracleMode::inexact;
    inexact.kappa = 1e-300;
    IterateState a{p.canonical_point(), 1}, b = a;
    for (int k = 0; k < 500; ++k) {
      a = rc_step(p, a, exact);
      b = rc_step(p, b, inexact);
    }
    CHECK(a.x == b.x);
  }
}

TEST_CASE("whole-space composite set reduces rc-co to rc") {
  const ConsensusProblem p = random_quadratic(8, SetDescriptor::l1_ball(1.5, 4));
  const ConsensusProblem co =
      p.with_composite(std::vector<SetDescriptor>(p.node_count(), SetDescriptor::whole_space(4)));
  IterateState a{p.canonical_point(), 1}, b = a;
  for (int k = 0; k < 1000; ++k) {
    a = rc_step(p, a, config(1));
    b = rc_co_step(co, b, config(1));
    REQUIRE(a.x == b.x);
  }
}

TEST_CASE("centralized reference") {
  const ReferenceSolution toy = centralized_reference(quadratic_toy());
  CHECK(toy.z(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(toy.f_star == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(toy.certificate <= 1e-9);
  CHECK(toy.x_star == BlockVector::replicate(toy.z, 2));

  const Vector c = vec({1.0, -2.0, 0.5});
  std::vector<NodeObjective> lin(3, linear_objective(c));
  const SetDescriptor box = SetDescriptor::box(3, -1.0, 1.0);
  const ConsensusProblem lp(path_graph(3), lin, std::vector<SetDescriptor>(3, box), std::nullopt, 1.0);
  const ReferenceSolution r = centralized_reference(lp);
  CHECK((r.z - lmo(box, c)).norm() <= 1e-9);
  CHECK(r.f_star == doctest::Approx(3.0 * c.dot(lmo(box, c))));

  // l1 ball cut by a box: optimum (0.25, 0.25) with both constraints active.
  const ConsensusProblem cut = quadratic_consensus(path_graph(3), {vec({1, 1}), vec({1, 1}), vec({1, 1})},
                                                   {1, 1, 1}, SetDescriptor::l1_ball(0.5, 2),
                                                   SetDescriptor::box(2, 0.0, 0.4));
  const ReferenceSolution rc = centralized_reference(cut);
  CHECK((rc.z - vec({0.25, 0.25})).norm() <= 1e-6);
  CHECK(rc.f_star == doctest::Approx(3.0 * 2.0 * 0.75 * 0.75).epsilon(1e-9));
  CHECK(rc.certificate <= 1e-8);
  CHECK(rc.lower_bound <= rc.f_star);

  CHECK_THROWS_AS(centralized_reference(ConsensusProblem(
                      path_graph(2), {quadratic_objective(vec({0.0})), quadratic_objective(vec({1.0}))},
                      {SetDescriptor::box(1, 0.0, 1.0), SetDescriptor::box(1, 0.0, 2.0)})),
                  CapabilityError);
}

TEST_CASE("centralized reference on matrix completion") {
  matcomp::BuildOptions opts;
  const matcomp::Instance inst = matcomp::build_instance(1, opts);
  const ReferenceSolution full = centralized_reference(matcomp::assemble_problem(inst));
  // With the default theta the measurement itself is feasible and optimal.
  CHECK(full.f_star <= 1e-8);
  CHECK(full.certificate <= 1e-8);

  opts.theta = 0.5 * inst.theta;
  const ConsensusProblem tight = matcomp::assemble_problem(matcomp::build_instance(1, opts));
  const ReferenceSolution r = centralized_reference(tight);
  MESSAGE("theta/2: f* = " << r.f_star << ", certificate = " << r.certificate);
  CHECK(r.f_star > 0.1);
  CHECK(r.certificate <= 1e-6 * r.f_star);
  for (std::size_t i = 0; i < tight.node_count(); ++i) {
    CHECK(contains(tight.x_set(i), r.x_star.block(i), 0.0));
    CHECK(contains(tight.y_set(i), r.x_star.block(i), 0.0));
  }
}

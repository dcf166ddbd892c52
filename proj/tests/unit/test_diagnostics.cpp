#include <cmath>
#include <sstream>
#include <string>

#include "dcg/algorithms.hpp"
#include "dcg/diagnostics.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace dcg;
using namespace dcg::test;

namespace {

BoundParams params(double rho, double delta, double beta, double lap, double r0 = 1.0) {
  BoundParams bp;
  bp.rho = rho;
  bp.delta = delta;
  bp.beta = beta;
  bp.laplacian_norm = lap;
  bp.r0 = r0;
  return bp;
}

Trace synthetic(double c, double power, long k_max) {
  Trace t;
  for (long k = 1; k <= k_max; ++k) {
    TraceRecord r;
    r.k = k;
    r.consensus_err = c / std::pow(double(k), power);
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("sigma_k examples") {
  BoundParams bp = params(0.0, 1.0, 2.0, 2.0);
  CHECK(sigma_k(bp, 4) == 3.0);
  CHECK(sigma_k(bp, 100000000) == doctest::Approx(2.0).epsilon(1e-3));
  bp.composite = true;
  CHECK(sigma_k(bp, 4) == 4.0);
  bp.composite = false;
  bp.kappa = 1.0;
  CHECK(sigma_k(bp, 4) == 6.0);
}

TEST_CASE("consensus and gap bound examples") {
  // sigma_k delta = 1 at k = 4 and k = 1.
  const BoundParams at4 = params(0.0, 1.0 / 3.0, 2.0, 2.0);
  CHECK(consensus_bound(at4, 4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gap_bound(at4, 4) == doctest::Approx(2.0 / 2.0 * sigma_k(at4, 4) * at4.delta));

  const BoundParams at1 = params(1.0, 0.25, 2.0, 2.0);
  CHECK(sigma_k(at1, 1) * at1.delta == 1.0);
  CHECK(gap_bound(at1, 1) == 4.0);
  // The literal variant squares delta.
  CHECK(gap_bound_literal(at1, 1) == doctest::Approx(4.0));
  const BoundParams wide = params(0.0, 4.0, 2.0, 2.0);
  CHECK(gap_bound_literal(wide, 1) == doctest::Approx(4.0 * gap_bound(wide, 1)));
}

TEST_CASE("bounds are nonincreasing from k = 2") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    BoundParams bp = params(rng.uniform() * 3.0, rng.uniform() * 10.0, rng.uniform() * 5.0,
                            rng.uniform() * 8.0, 0.1 + rng.uniform() * 3.0);
    bp.composite = trial % 2 == 0;
    bp.kappa = trial % 3 == 0 ? rng.uniform() : 0.0;
    for (long k = 2; k < 5000; k += 7) {
      REQUIRE(consensus_bound(bp, k + 1) <= consensus_bound(bp, k));
      REQUIRE(gap_bound(bp, k + 1) <= gap_bound(bp, k));
      REQUIRE(gap_bound(bp, k) >= 0.0);
    }
  }
}

TEST_CASE("lemma1 residual at the optimum") {
  const ConsensusProblem toy = quadratic_toy();
  const BoundParams bp = bound_params(toy, 1.0, 1.0);
  const BlockVector x_star = scalars({0.5, 0.5});
  for (long k : {1L, 10L, 1000L, 1000000L}) {
    const double expect = -2.0 * sigma_k(bp, k) * bp.delta / std::sqrt(double(k));
    CHECK(lemma1_residual(toy, x_star, k, 0.5, bp) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("rate_fit recovers power laws") {
  CHECK(rate_fit(synthetic(3.0, 0.5, 1000), TraceColumn::consensus_err, 10, 1000) ==
        doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(rate_fit(synthetic(0.2, 1.0, 1000), TraceColumn::consensus_err, 100, 1000) ==
        doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS_AS(rate_fit(synthetic(1.0, 0.5, 1000), TraceColumn::consensus_err, 100, 108),
                  DomainError);
  Trace zeros = synthetic(0.0, 0.5, 100);
  CHECK_THROWS_AS(rate_fit(zeros, TraceColumn::consensus_err, 1, 100), DomainError);
}

TEST_CASE("trace csv format") {
  const ConsensusProblem toy = quadratic_toy();
  SolverConfig cfg;
  cfg.max_iter = 20;
  cfg.log_every = 5;
  const Trace t = run(toy, cfg, RunOptions{1.0, 0.5});
  std::istringstream in(trace_csv(t));
  std::string line;
  std::getline(in, line);
  CHECK(line == kTraceCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::size_t commas = 0;
    for (char ch : line) commas += ch == ',';
    CHECK(commas == 9);
  }
  CHECK(rows == 5);

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(parse_column("consensus_err") == TraceColumn::consensus_err);
  CHECK(parse_column("f") == TraceColumn::f_value);
  CHECK_THROWS(parse_column("nope"));
}

TEST_CASE("logged records agree with the bound functions") {
  const ConsensusProblem toy = quadratic_toy();
  SolverConfig cfg;
  cfg.max_iter = 300;
  cfg.log_every = 13;
  const Trace t = run(toy, cfg, RunOptions{1.0, 0.5});
  const BoundParams bp = bound_params(toy, 1.0, 1.0);
  for (const auto& r : t.records) {
    CHECK(r.sigma_k == sigma_k(bp, r.k));
    CHECK(r.consensus_bound == consensus_bound(bp, r.k));
    CHECK(r.gap_bound == gap_bound(bp, r.k));
    CHECK(std::abs(r.f_value - 0.5) <= r.gap_bound);
    CHECK(r.lemma1_residual <= 1e-6);
  }
}

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcg/oracles.hpp"

namespace dcg {

/// Outcome of one named property check.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

using LmoFunction = std::function<Vector(const SetDescriptor&, const Vector&)>;

struct CheckOptions {
  /// Replaces the oracle under test; used to confirm the suite catches a broken LMO.
  LmoFunction lmo_under_test;
  int directions = 1000;
  std::uint64_t seed = 2024;
};

/// min over the extreme points of S of <c, v>: vertex enumeration for Box
/// (dim <= 20) and L1Ball, basis vectors for Simplex, -r c/|c| for L2Ball,
/// and +-theta v v^T over a dense eigendecomposition for NuclearBallSym.
double brute_force_min(const SetDescriptor& s, const Vector& c);

/// LMO agreement with brute force, feasibility, optimality against random
/// feasible points, projection identities, nuclear output structure, and
/// the inexact-oracle certificate.
std::vector<CheckResult> oracle_suite(const CheckOptions& opts = {});

/// Bound checks for (RC) on the quadratic toy with rho from the KKT system.
std::vector<CheckResult> bounds_suite(const CheckOptions& opts = {});

/// Node of a two-node, one-dimensional problem: f(x) = weight (x - target)^2 on [lower, upper].
struct ScalarBoxNode {
  double weight = 1.0;
  double target = 0.0;
  double lower = 0.0;
  double upper = 1.0;
};

/// KKT point of min f_1(x_1) + f_2(x_2) s.t. x_1 = x_2, x_i in [l_i, u_i], on
/// the edge oriented head = node 1, tail = node 2: -E u - grad f(x) in N_X(x).
struct TwoNodeKkt {
  double z = 0.0;
  double f_star = 0.0;
  /// Interval of multipliers u satisfying the conditions.
  double u_low = 0.0;
  double u_high = 0.0;
  /// Smallest |u| over that interval.
  double rho = 0.0;
};

/// Enumerates the 3 x 3 active-set patterns (interior, at lower, at upper)
/// and returns the consistent one. Throws DomainError if the boxes do not
/// intersect.
TwoNodeKkt solve_two_node_kkt(const std::array<ScalarBoxNode, 2>& nodes);

}  // namespace dcg

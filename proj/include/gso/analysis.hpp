#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "gso/linalg.hpp"
#include "gso/model.hpp"

namespace gso {

/// Sampled estimation of the group restricted eigenvalue
///   phi_{p,q}(S, N) = min ||Ax||_2 / ||x_N||_{p,2}
/// over the cone of x whose off-J mixed norm is dominated by the J part, with
/// N the union of J and the N largest off-J groups. The search enumerates all
/// index sets J with |J| <= support_size, so the group count must stay small
/// (<= 16 or so).
struct GrecQuery {
  Matrix a;
  GroupPartition partition;
  double p = 2.0;
  double q = 1.0;
  std::size_t support_size = 1;    // S: maximal |J|
  std::size_t extension_size = 1;  // N: ranked groups added to the denominator set
  std::size_t samples = 128;
  std::size_t refine_steps = 40;
  std::uint64_t seed = 0;
  /// Known candidate directions injected ahead of the random samples so
  /// golden runs are deterministic.
  std::vector<Vector> seeded_directions;
};

struct GrecEstimate {
  double phi_upper = 0.0;        // an upper bound on the true phi
  Vector witness;                // unit-norm feasible direction achieving it
  GroupSupport witness_index_set;  // the J of the winning sample
};

GrecEstimate grec_estimate(const GrecQuery& query);

/// Indices of the `count` largest groups by l_p norm outside `excluded`,
/// ties broken toward the lower group index.
std::vector<std::size_t> top_groups_excluding(const Vector& x, const GroupPartition& partition,
                                              double p, std::size_t count,
                                              const std::set<std::size_t>& excluded);

/// Whether some index set of at most s groups dominates the rest in
/// ||.||_{p,q}; by the ordering argument it suffices to test the s largest
/// groups.
bool cone_membership(const Vector& x, const GroupPartition& partition, double p, double q,
                     std::size_t s);

/// RHS minus LHS of the oracle inequality
///   ||Ax - A xbar||^2 + lambda ||x_{S^c}||_{p,q}^q
///     <= lambda^{2/(2-q)} S^{(1 - 2^{-K}) 2/(2-q)} / phi^{2q/(2-q)}
/// for x in the level set F(x) <= lambda ||xbar||_{p,q}^q.
double oracle_inequality_gap(const Problem& prob, const Vector& xbar, const Vector& x,
                             double phi);

struct BoundInputs {
  double lambda = 0.0;
  std::size_t group_sparsity = 0;  // S
  double q = 0.5;
  double phi = 1.0;
  // Local bound only:
  double p = 2.0;
  Matrix active_columns;              // B: columns of A on the active entries
  std::vector<Vector> active_groups;  // the nonzero groups of xbar, fully active
};

/// 2 lambda^{2/(2-q)} S^{(q-2)/q + (1-2^{-K}) 4/(q(2-q))} / phi^{4/(2-q)}.
double global_recovery_bound(const BoundInputs& in);

/// lambda^2 q^2 S ||(B^T B)^{-1}||^2 max_i ( ||g_i||_p^{2(q-p)} ||g_i||_{2p-2}^{2p-2} ).
double local_recovery_bound(const BoundInputs& in);

/// Brute-force global minimizer for n <= 4: dense grid scan over
/// [-R, R]^n followed by `refine` proximal-gradient polishing steps from the
/// best node. box_radius = 0 derives R from the minimum-norm least-squares
/// solution as 2 (||x_mn||_inf + ||b||_2). Grids beyond 1e8 nodes are
/// rejected.
Vector global_min_small(const Problem& prob, double grid_step, std::size_t refine,
                        double box_radius = 0.0);

}  // namespace gso

#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "gso/linalg.hpp"

namespace gso {

/// Magnitude below which a coordinate counts as zero when extracting group
/// supports and evaluating the q = 0 penalty.
inline constexpr double kZeroTol = 1e-10;

/// Disjoint ordered grouping of {0,...,n-1} into contiguous index ranges.
/// Scattered groupings are normalized to contiguous form by a recorded
/// column permutation (see from_scattered).
class GroupPartition {
 public:
  /// Contiguous groups given by their sizes, in order.
  static GroupPartition from_sizes(const std::vector<std::size_t>& sizes);

  /// Arbitrary disjoint groups covering {0,...,n-1}; the partition stores the
  /// permutation that maps original column indices to the contiguous layout.
  static GroupPartition from_scattered(const std::vector<std::vector<std::size_t>>& groups,
                                       std::size_t n);

  std::size_t group_count() const { return bounds_.size(); }
  std::size_t total_size() const { return n_; }
  std::size_t max_group_size() const { return n_max_; }
  std::size_t group_size(std::size_t g) const { return bounds_[g].second - bounds_[g].first; }
  /// Half-open [begin, end) range of group g in the contiguous layout.
  std::pair<std::size_t, std::size_t> group_range(std::size_t g) const { return bounds_[g]; }

  bool has_permutation() const { return !perm_.empty(); }
  /// Reorders a vector from original index order into the contiguous layout.
  Vector to_contiguous(const Vector& x) const;
  /// Inverse of to_contiguous.
  Vector to_original(const Vector& x) const;

 private:
  std::vector<std::pair<std::size_t, std::size_t>> bounds_;
  std::vector<std::size_t> perm_;  // perm_[contiguous] = original; empty = identity
  std::size_t n_ = 0;
  std::size_t n_max_ = 0;
};

/// The (p, q, lambda) triple of the penalty lambda * ||x||_{p,q}^q.
/// Supported combinations: the six closed-form pairs
/// (2,1), (2,0), (2,1/2), (1,1/2), (2,2/3), (1,2/3) and generic 0 < q < 1
/// with p in {1, 2} (handled by the iterative prox solver).
struct Regularizer {
  double p = 2.0;
  double q = 1.0;
  double lambda = 1.0;

  Regularizer() = default;
  Regularizer(double p_in, double q_in, double lambda_in);

  bool is_analytic_pair() const;
};

struct Problem {
  Matrix a;
  Vector b;
  GroupPartition partition;
  Regularizer reg;

  Problem(Matrix a_in, Vector b_in, GroupPartition partition_in, Regularizer reg_in);
};

/// Set of nonzero-group indices (0-based).
struct GroupSupport {
  std::set<std::size_t> active;

  bool operator==(const GroupSupport& other) const = default;
};

/// ||x||_{p,q}: l_p within each group, l_q across group norms. For q = 0 the
/// value is the number of nonzero groups (independent of p), with a group
/// counting as nonzero when its max-magnitude entry exceeds kZeroTol.
double lpq_norm(const Vector& x, const GroupPartition& partition, double p, double q);

/// ||x||_{p,q}^q without the outer 1/q root; sum of per-group l_p norms raised
/// to q (group count for q = 0). This is the quantity the objective uses.
double lpq_penalty(const Vector& x, const GroupPartition& partition, double p, double q);

/// F(x) = ||Ax - b||_2^2 + lambda * ||x||_{p,q}^q.
double objective(const Problem& prob, const Vector& x);

/// Per-group l_p norms, length r.
Vector group_norms(const Vector& x, const GroupPartition& partition, double p);

GroupSupport extract_support(const Vector& x, const GroupPartition& partition);

/// Smallest integer K >= 1 with 2^(K-1) * q >= 1, for 0 < q <= 1.
int smallest_k(double q);

}  // namespace gso

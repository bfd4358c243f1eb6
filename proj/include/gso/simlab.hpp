#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gso/linalg.hpp"
#include "gso/model.hpp"
#include "gso/solver.hpp"

namespace gso {

/// Random-instance recipe: row-orthonormalized Gaussian sensing matrix,
/// equally sized groups, a chosen number of active groups with Gaussian
/// entries, additive Gaussian noise of standard deviation noise_sigma.
struct SimSpec {
  std::size_t n = 256;
  std::size_t m = 64;
  std::size_t groups = 32;  // must divide n
  std::size_t active_groups = 2;
  double noise_sigma = 0.001;
  std::size_t trials = 50;
  std::uint64_t master_seed = 0;
};

struct SimInstance {
  Matrix a;
  Vector b;
  GroupPartition partition;
  Vector xbar;
};

/// Pure function of (spec.master_seed, trial): the same pair always produces
/// bit-identical data.
SimInstance generate_instance(const SimSpec& spec, std::size_t trial);

/// A (p, q) regularization kind; lambda is chosen per iteration by the
/// target-sparsity rule during benchmarks.
struct RegKind {
  double p = 2.0;
  double q = 1.0;
};

struct TrialResult {
  double relative_error = 0.0;
  bool success = false;  // always exactly (relative_error < 0.005)
  std::size_t iterations = 0;
  double runtime_seconds = 0.0;
  bool solver_failed = false;
};

struct RateRow {
  RegKind kind;
  double success_rate = 0.0;
  double mean_relative_error = 0.0;
  double mean_iterations = 0.0;
  std::vector<TrialResult> trials;
};

/// Solves every trial of `spec` for every kind in target-sparsity mode with
/// S = spec.active_groups and aggregates success rates and errors. Solver
/// failures are recorded on the trial, not thrown. Trials may run on
/// `threads` workers; results are identical for any thread count.
std::vector<RateRow> recovery_rate_experiment(const SimSpec& spec,
                                              const std::vector<RegKind>& kinds,
                                              std::size_t threads = 1);

struct GroupSizeRow {
  std::size_t group_size = 0;
  std::vector<RateRow> rows;
};

/// Re-runs the recovery experiment for each group size, holding the total
/// number of active entries fixed (spec.active_groups * spec group size).
/// Every size must divide n and the active entry count.
std::vector<GroupSizeRow> group_size_sweep(const SimSpec& spec,
                                           const std::vector<std::size_t>& sizes,
                                           const std::vector<RegKind>& kinds,
                                           std::size_t threads = 1);

struct QSweepRow {
  double q = 0.0;
  RateRow row;
};

/// Recovery rates for fixed p over a grid of q values in [0, 1]; non-analytic
/// q values exercise the iterative prox operator.
std::vector<QSweepRow> q_sweep(const SimSpec& spec, double p, const std::vector<double>& q_grid,
                               std::size_t threads = 1);

struct PathScore {
  /// Per-group score: 1/k for the smallest target sparsity k at which the
  /// group enters the solution, 0 if it never does.
  Vector scores;
  std::size_t failed_solves = 0;
};

/// Solves prob in target-sparsity mode for S = 1..k_max and scores each
/// group by the first S that activates it.
PathScore solution_path_scores(const Problem& prob, std::size_t k_max);

/// Area under the ROC curve by rank statistic, ties counted half. Requires
/// both classes present.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

}  // namespace gso

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gso/linalg.hpp"
#include "gso/model.hpp"

namespace gso {

enum class SolveStatus { kConverged, kMaxIter };

struct SolverConfig {
  /// Gradient stepsize; must satisfy v < 1/(2 ||A||_2^2). Defaults to
  /// 0.99 / (2 ||A||_2^2).
  std::optional<double> stepsize;
  std::size_t max_iter = 10000;
  double x_tol = 1e-8;
  double f_tol = 1e-12;
  /// When set, lambda is re-solved every iteration so that the prox step
  /// keeps exactly this many groups; otherwise prob.reg.lambda is used as is.
  std::optional<std::size_t> target_sparsity;
  bool record_history = true;
  /// Initial iterate; zero when absent.
  std::optional<Vector> x0;
};

struct SolveReport {
  Vector x_final;
  std::vector<double> objective_trace;        // F(x^0), F(x^1), ...
  std::vector<GroupSupport> support_trace;    // aligned with objective_trace
  std::vector<Vector> group_l1_trace;         // per-iterate per-group l1 norms
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::kMaxIter;
  double lambda_used = 0.0;  // final lambda (differs from reg.lambda in target mode)
  bool used_target_sparsity = false;
};

/// Proximal gradient iteration x^{ k+1} = prox(x^k - 2v A^T(A x^k - b)) from
/// x^0 = 0, until both the step and the objective change fall below their
/// tolerances or max_iter is hit.
SolveReport pgm_solve(const Problem& prob, const SolverConfig& cfg);

/// Lambda such that the group prox applied to z keeps exactly
/// target_groups groups: closed-form threshold inversion for p = 2 with
/// analytic q, bisection otherwise. The threshold is placed on the
/// (target+1)-th largest group l2 norm, which that group's boundary rule
/// resolves to zero while every larger group survives.
double lambda_from_target_sparsity(const Vector& z, const GroupPartition& partition, double v,
                                   const Regularizer& reg, std::size_t target_groups);

/// First iteration index after which the recorded group support never
/// changes; report.iterations when there is no recorded history.
std::size_t support_stabilization_iter(const SolveReport& report);

struct RateFit {
  double eta = 1.0;        // per-iteration contraction factor estimate
  double r_squared = 0.0;  // quality of the log-linear fit
};

/// Fits log(F(x^k) - F_best + 1e-15) ~ a + k log(eta) over the trailing
/// fraction of the trace, with F_best the final trace value. Entries already
/// at F_best carry no rate information and are skipped; when fewer than two
/// informative points remain the fit degenerates to eta = 1, R^2 = 0.
RateFit linear_rate_fit(const std::vector<double>& objective_trace, double tail_fraction);

/// Checks the p = 1, 0 < q < 1 lower bound: every nonzero group of every
/// recorded iterate has l1 norm at least (v lambda q (1-q))^(1/(2-q)) - 1e-10.
/// Requires a fixed-lambda run with recorded history.
bool nonzero_group_lower_bound_check(const SolveReport& report, const Problem& prob, double v);

}  // namespace gso

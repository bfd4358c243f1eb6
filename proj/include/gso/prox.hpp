#pragma once

#include <cstddef>

#include "gso/linalg.hpp"
#include "gso/model.hpp"

namespace gso {

/// One group subproblem: minimize Q(x) = lambda * ||x||_p^q + (1/2v) ||x - z||_2^2.
struct ProxQuery {
  Vector z;
  double v = 1.0;
  double lambda = 1.0;
  double p = 2.0;
  double q = 1.0;
};

struct ProxResult {
  Vector x;
  double objective_value = 0.0;  // Q evaluated at x
  bool was_thresholded_to_zero = false;
};

/// Q(x) for the query's (lambda, v, p, q). For q = 0 the penalty is an
/// indicator of x != 0.
double prox_objective(const ProxQuery& query, const Vector& x);

// Closed-form operators. Whenever the minimizer is non-unique (the candidate
// and 0 tie), the zero vector is returned so the operator is single-valued.
ProxResult prox_2_1(const ProxQuery& query);        // group soft thresholding
ProxResult prox_2_0(const ProxQuery& query);        // group hard thresholding
ProxResult prox_2_half(const ProxQuery& query);     // p=2, q=1/2
ProxResult prox_1_half(const ProxQuery& query);     // p=1, q=1/2
ProxResult prox_2_twothirds(const ProxQuery& query);// p=2, q=2/3
ProxResult prox_1_twothirds(const ProxQuery& query);// p=1, q=2/3

/// Iterative operator for any 0 < q < 1, p in {1, 2}: solves the stationarity
/// equation by safeguarded Newton (bisection fallback) and compares the
/// candidate against 0.
ProxResult prox_generic(const ProxQuery& query);

/// Dispatch: closed form when (p, q) is one of the six analytic pairs,
/// prox_generic otherwise.
ProxResult prox_apply(const ProxQuery& query);

/// Applies the matching operator independently to every group of z.
Vector prox_group_apply(const Vector& z, const GroupPartition& partition, double v,
                        const Regularizer& reg);

}  // namespace gso

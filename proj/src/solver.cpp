#include "gso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gso/errors.hpp"
#include "gso/prox.hpp"

namespace gso {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

std::size_t count_nonzero_groups(const Vector& x, const GroupPartition& partition) {
  return extract_support(x, partition).active.size();
}

double misfit(const Vector& ax, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double lambda_from_target_sparsity(const Vector& z, const GroupPartition& partition, double v,
                                   const Regularizer& reg, std::size_t target_groups) {
  const std::size_t r = partition.group_count();
  if (target_groups < 1 || target_groups >= r)
    throw ConfigError("target sparsity must be in [1, group count)");
  if (v <= 0.0) throw ConfigError("stepsize must be positive");

  Vector norms = group_norms(z, partition, 2.0);
  std::sort(norms.begin(), norms.end(), std::greater<>());
  const double upper = norms[target_groups - 1];
  const double lower = norms[target_groups];
  // The threshold sits on the (target+1)-th largest norm: that group lands
  // exactly on the zero boundary (resolved to 0), the top `target` groups
  // survive, and the induced shrinkage decays with the residual instead of
  // staying proportional to the kept signal.
  double tau = lower;
  if (upper - lower <= 1e-14 * std::max(1.0, upper)) tau = upper * (1.0 + 1e-12);
  if (tau <= 0.0) return 1e-15;  // fewer than target_groups nonzero groups in z

  const bool p2 = near(reg.p, 2.0);
  if (p2 && near(reg.q, 1.0)) return tau / v;
  if (p2 && near(reg.q, 0.0)) return tau * tau / (2.0 * v);
  if (p2 && near(reg.q, 0.5)) return std::pow(2.0 * tau / 3.0, 1.5) / v;
  if (p2 && near(reg.q, 2.0 / 3.0)) return 1.5 / v * std::pow(0.5 * tau, 4.0 / 3.0);

  // p = 1 or non-analytic q: the kept-group count is nonincreasing in lambda,
  // so bisect (geometrically) until exactly target_groups groups survive.
  auto survivors = [&](double lambda) {
    Regularizer r2 = reg;
    r2.lambda = lambda;
    return count_nonzero_groups(prox_group_apply(z, partition, v, r2), partition);
  };
  double lo = 1e-12;
  if (survivors(lo) <= target_groups) return lo;
  double hi = std::max(tau, 1e-9);
  std::size_t guard = 0;
  while (survivors(hi) > target_groups) {
    hi *= 8.0;
    if (++guard > 80) throw NumericalError("target sparsity: no lambda kills enough groups");
  }
  for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-13; ++it) {
    const double mid = std::sqrt(lo * hi);
    const std::size_t c = survivors(mid);
    if (c == target_groups) return mid;
    if (c > target_groups)
      lo = mid;
    else
      hi = mid;
  }
  return hi;  // tied thresholds: the count jumps past the target
}

SolveReport pgm_solve(const Problem& prob, const SolverConfig& cfg) {
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (cfg.x_tol < 0.0 || cfg.f_tol < 0.0) throw ConfigError("tolerances must be nonnegative");
  const std::size_t n = prob.a.cols();
  const std::size_t r = prob.partition.group_count();
  if (cfg.target_sparsity && (*cfg.target_sparsity < 1 || *cfg.target_sparsity >= r))
    throw ConfigError("target sparsity must be in [1, group count)");

  const double sigma = spectral_norm(prob.a, 1e-9);
  const double v = cfg.stepsize.value_or(0.99 / (2.0 * sigma * sigma));
  if (!(v > 0.0) || 2.0 * v * sigma * sigma >= 1.0)
    throw ConfigError("stepsize " + std::to_string(v) + " violates v < 1/(2 ||A||^2) with ||A|| = " +
                      std::to_string(sigma));

  Vector x(n, 0.0);
  if (cfg.x0) {
    if (cfg.x0->size() != n) throw ConfigError("x0 length mismatch");
    x = *cfg.x0;
  }

  SolveReport report;
  report.used_target_sparsity = cfg.target_sparsity.has_value();
  report.lambda_used = prob.reg.lambda;

  auto record = [&](const Vector& xk, double f) {
    if (!cfg.record_history) return;
    report.objective_trace.push_back(f);
    report.support_trace.push_back(extract_support(xk, prob.partition));
    report.group_l1_trace.push_back(group_norms(xk, prob.partition, 1.0));
  };

  Vector ax = matvec(prob.a, x);
  const Vector atb = transpose_matvec(prob.a, prob.b);
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  Regularizer reg_k = prob.reg;
  SolveStatus status = SolveStatus::kMaxIter;
  std::size_t iters = 0;

  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    // z = x - 2 v A^T (A x - b)
    Vector z = transpose_matvec(prob.a, ax);
    for (std::size_t j = 0; j < n; ++j) z[j] = x[j] - 2.0 * v * (z[j] - atb[j]);

    if (cfg.target_sparsity)
      reg_k.lambda = lambda_from_target_sparsity(z, prob.partition, v, prob.reg,
                                                 *cfg.target_sparsity);
    if (k == 0) {
      f_prev = misfit(ax, prob.b) +
               reg_k.lambda * lpq_penalty(x, prob.partition, prob.reg.p, prob.reg.q);
      record(x, f_prev);
    }

    Vector x_next = prox_group_apply(z, prob.partition, v, reg_k);
    for (double t : x_next)
      if (!std::isfinite(t)) throw NumericalError("pgm_solve: non-finite iterate");

    const Vector ax_next = matvec(prob.a, x_next);
    const double f_next = misfit(ax_next, prob.b) +
                          reg_k.lambda * lpq_penalty(x_next, prob.partition, prob.reg.p,
                                                     prob.reg.q);
    if (!std::isfinite(f_next)) throw NumericalError("pgm_solve: non-finite objective");
    record(x_next, f_next);
    iters = k + 1;

    double step = 0.0, xnorm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = x_next[j] - x[j];
      step += d * d;
      xnorm += x[j] * x[j];
    }
    const bool x_small = std::sqrt(step) <= cfg.x_tol * std::max(1.0, std::sqrt(xnorm));
    const bool f_small = std::abs(f_next - f_prev) <= cfg.f_tol * std::max(1.0, std::abs(f_prev));

    x = std::move(x_next);
    ax = ax_next;
    f_prev = f_next;
    if (x_small && f_small) {
      status = SolveStatus::kConverged;
      break;
    }
  }

  report.x_final = std::move(x);
  report.iterations = iters;
  report.status = status;
  report.lambda_used = reg_k.lambda;
  return report;
}

std::size_t support_stabilization_iter(const SolveReport& report) {
  if (report.support_trace.empty()) return report.iterations;
  const GroupSupport& last = report.support_trace.back();
  std::size_t idx = report.support_trace.size() - 1;
  while (idx > 0 && report.support_trace[idx - 1] == last) --idx;
  return idx;
}

RateFit linear_rate_fit(const std::vector<double>& objective_trace, double tail_fraction) {
  if (objective_trace.size() < 20)
    throw ConfigError("linear_rate_fit: needs a trace of at least 20 entries");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw ConfigError("linear_rate_fit: tail_fraction must be in (0, 1]");
  for (double f : objective_trace)
    if (!std::isfinite(f)) throw NumericalError("linear_rate_fit: non-finite trace value");

  const double floor = objective_trace.back();
  const std::size_t count = std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::ceil(tail_fraction * static_cast<double>(objective_trace.size()))));
  const std::size_t start = objective_trace.size() - count;

  std::vector<double> ks, ys;
  for (std::size_t k = start; k < objective_trace.size(); ++k) {
    const double gap = objective_trace[k] - floor;
    if (gap <= 0.0) continue;  // already at the floor, no rate information
    ks.push_back(static_cast<double>(k));
    ys.push_back(std::log(gap + 1e-15));
  }
  RateFit fit;
  if (ks.size() < 2) return fit;

  const double nn = static_cast<double>(ks.size());
  double mk = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    mk += ks[i];
    my += ys[i];
  }
  mk /= nn;
  my /= nn;
  double skk = 0.0, sky = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double dk = ks[i] - mk;
    const double dy = ys[i] - my;
    skk += dk * dk;
    sky += dk * dy;
    syy += dy * dy;
  }
  if (skk == 0.0) return fit;
  const double slope = sky / skk;
  fit.eta = std::exp(slope);
  fit.r_squared = (syy == 0.0) ? 0.0 : (sky * sky) / (skk * syy);
  return fit;
}

bool nonzero_group_lower_bound_check(const SolveReport& report, const Problem& prob, double v) {
  if (!near(prob.reg.p, 1.0) || !(prob.reg.q > 0.0 && prob.reg.q < 1.0))
    throw ConfigError("lower bound check applies to p = 1 with 0 < q < 1");
  if (report.used_target_sparsity)
    throw ConfigError("lower bound check requires a fixed-lambda run");
  const double q = prob.reg.q;
  const double bound =
      std::pow(v * prob.reg.lambda * q * (1.0 - q), 1.0 / (2.0 - q)) - 1e-10;
  for (const Vector& norms : report.group_l1_trace)
    for (double t : norms)
      if (t > 0.0 && t < bound) return false;
  return true;
}

}  // namespace gso

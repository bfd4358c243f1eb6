#include "gso/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

#include "gso/errors.hpp"

namespace gso {

namespace {

constexpr double kDomainEps = 1e-15;  // clamp width for arccos / arccosh arguments

void validate(const ProxQuery& query) {
  if (query.z.empty()) throw ConfigError("prox: empty group");
  if (query.v <= 0.0) throw ConfigError("prox: stepsize must be positive");
  if (query.lambda <= 0.0) throw ConfigError("prox: lambda must be positive");
}

ProxResult zero_result(const ProxQuery& query) {
  ProxResult r;
  r.x.assign(query.z.size(), 0.0);
  r.objective_value = prox_objective(query, r.x);
  r.was_thresholded_to_zero = true;
  return r;
}

ProxResult value_result(const ProxQuery& query, Vector x) {
  ProxResult r;
  r.x = std::move(x);
  r.objective_value = prox_objective(query, r.x);
  r.was_thresholded_to_zero = false;
  return r;
}

// Candidate beats 0 only by a clear margin; exact ties go to 0 so the
// operator stays single-valued.
bool strictly_better(double q_candidate, double q_zero) {
  return q_candidate < q_zero - 1e-12 * std::max(1.0, std::abs(q_zero));
}

// Largest real root of t^3 - sigma t + c = 0 (sigma, c > 0), via the
// trigonometric solution. Empty when no positive root exists.
std::optional<double> cubic_largest_root(double sigma, double c) {
  if (sigma <= 0.0) return std::nullopt;
  const double arg = 0.5 * c * std::pow(3.0 / sigma, 1.5);
  if (arg > 1.0 + kDomainEps) return std::nullopt;
  const double psi = std::acos(std::clamp(arg, -1.0, 1.0));
  return 2.0 * std::sqrt(sigma / 3.0) * std::cos(std::numbers::pi / 3.0 - psi / 3.0);
}

// Largest real root of t^4 - sigma t + d = 0 (sigma, d > 0). The quartic is
// factored through the resolvent cubic M^3 - 4 d M - sigma^2 = 0, whose root
// has a hyperbolic closed form.
std::optional<double> quartic_largest_root(double sigma, double d) {
  if (sigma <= 0.0) return std::nullopt;
  const double arg = 27.0 * sigma * sigma / (16.0 * std::pow(3.0 * d, 1.5));
  if (arg < 1.0 - kDomainEps) return std::nullopt;
  const double phi = std::acosh(std::max(arg, 1.0));
  const double m = (4.0 / 3.0) * std::sqrt(3.0 * d) * std::cosh(phi / 3.0);
  const double a = std::sqrt(m);
  const double disc = std::max(2.0 * sigma / a - m, 0.0);
  return 0.5 * (a + std::sqrt(disc));
}

// Largest root of g(t) = t + c t^(q-1) - sigma on (0, sigma], if any.
// g is convex there, so Newton from the right endpoint is monotone; steps
// leaving the bracket fall back to bisection.
std::optional<double> scalar_largest_root(double sigma, double c, double q) {
  if (sigma <= 0.0) return std::nullopt;
  const double t_star = std::pow(c * (1.0 - q), 1.0 / (2.0 - q));
  auto g = [&](double t) { return t + c * std::pow(t, q - 1.0) - sigma; };
  if (t_star >= sigma || g(t_star) > 0.0) return std::nullopt;
  double lo = t_star;
  double hi = sigma;
  double t = sigma;
  for (int it = 0; it < 200; ++it) {
    const double gt = g(t);
    if (std::abs(gt) <= 1e-12) return t;
    if (gt < 0.0)
      lo = t;
    else
      hi = t;
    const double dg = 1.0 + c * (q - 1.0) * std::pow(t, q - 2.0);
    double next = (dg > 0.0) ? t - gt / dg : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  if (std::abs(g(t)) <= 1e-9) return t;  // bracket collapsed without meeting 1e-12
  throw NumericalError("prox_generic: scalar root solve did not converge");
}

Vector scaled_copy(const Vector& z, double factor) {
  Vector x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) x[j] = factor * z[j];
  return x;
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Shared machinery for the p = 1 operators. The stationary point applies one
// uniform shrinkage to every entry; when the shrinkage exceeds the smallest
// |z_j| that candidate is infeasible, so supports formed by the largest
// magnitudes are scanned instead. solve(sum, count) must return the largest
// root s of the support's scalar equation, and shrink(s) the per-entry
// shrinkage it implies.
template <typename Solve, typename Shrink>
ProxResult best_l1_candidate(const ProxQuery& query, Solve solve, Shrink shrink_of) {
  const std::size_t l = query.z.size();
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(query.z[a]) > std::abs(query.z[b]);
  });

  ProxResult best = zero_result(query);
  double partial = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    const double min_mag = std::abs(query.z[order[k]]);
    if (min_mag <= 0.0) break;
    partial += min_mag;
    const auto root = solve(partial, k + 1);
    if (!root) continue;
    const double shrink = shrink_of(*root);
    if (shrink > min_mag) continue;
    Vector x(l, 0.0);
    for (std::size_t idx = 0; idx <= k; ++idx) {
      const std::size_t j = order[idx];
      x[j] = query.z[j] - shrink * sign(query.z[j]);
    }
    ProxResult cand = value_result(query, std::move(x));
    if (strictly_better(cand.objective_value, best.objective_value)) best = std::move(cand);
  }
  return best;
}

}  // namespace

double prox_objective(const ProxQuery& query, const Vector& x) {
  if (x.size() != query.z.size()) throw ConfigError("prox_objective: length mismatch");
  double misfit = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - query.z[j];
    misfit += d * d;
  }
  double penalty;
  if (query.q == 0.0) {
    penalty = std::any_of(x.begin(), x.end(), [](double t) { return t != 0.0; }) ? 1.0 : 0.0;
  } else {
    penalty = std::pow(norm_p(x, query.p), query.q);
  }
  return query.lambda * penalty + misfit / (2.0 * query.v);
}

ProxResult prox_2_1(const ProxQuery& query) {
  validate(query);
  const double sigma = norm2(query.z);
  const double t = query.v * query.lambda;
  if (sigma <= t) return zero_result(query);
  return value_result(query, scaled_copy(query.z, 1.0 - t / sigma));
}

ProxResult prox_2_0(const ProxQuery& query) {
  validate(query);
  const double sigma = norm2(query.z);
  if (sigma <= std::sqrt(2.0 * query.v * query.lambda)) return zero_result(query);
  return value_result(query, query.z);
}

ProxResult prox_2_half(const ProxQuery& query) {
  validate(query);
  const double vl = query.v * query.lambda;
  const double sigma = norm2(query.z);
  if (sigma <= 1.5 * std::pow(vl, 2.0 / 3.0)) return zero_result(query);
  const auto root = cubic_largest_root(sigma, 0.5 * vl);  // root = ||x||_2^(1/2)
  if (!root) return zero_result(query);
  const double xnorm = (*root) * (*root);
  return value_result(query, scaled_copy(query.z, xnorm / sigma));
}

ProxResult prox_2_twothirds(const ProxQuery& query) {
  validate(query);
  const double vl = query.v * query.lambda;
  const double sigma = norm2(query.z);
  if (sigma <= 2.0 * std::pow(2.0 * vl / 3.0, 0.75)) return zero_result(query);
  const auto root = quartic_largest_root(sigma, 2.0 * vl / 3.0);  // root = ||x||_2^(1/3)
  if (!root) return zero_result(query);
  const double xnorm = (*root) * (*root) * (*root);
  return value_result(query, scaled_copy(query.z, xnorm / sigma));
}

ProxResult prox_1_half(const ProxQuery& query) {
  validate(query);
  const double vl = query.v * query.lambda;
  return best_l1_candidate(
      query,
      [&](double sum, std::size_t count) {
        return cubic_largest_root(sum, 0.5 * vl * static_cast<double>(count));
      },
      [&](double s) { return 0.5 * vl / s; });  // s = ||x||_1^(1/2)
}

ProxResult prox_1_twothirds(const ProxQuery& query) {
  validate(query);
  const double vl = query.v * query.lambda;
  return best_l1_candidate(
      query,
      [&](double sum, std::size_t count) {
        return quartic_largest_root(sum, 2.0 * vl / 3.0 * static_cast<double>(count));
      },
      [&](double s) { return 2.0 * vl / (3.0 * s); });  // s = ||x||_1^(1/3)
}

ProxResult prox_generic(const ProxQuery& query) {
  validate(query);
  if (!(query.q > 0.0 && query.q < 1.0))
    throw ConfigError("prox_generic: requires 0 < q < 1");
  const bool p_is_two = std::abs(query.p - 2.0) <= 1e-12;
  if (!p_is_two && std::abs(query.p - 1.0) > 1e-12)
    throw ConfigError("prox_generic: requires p in {1, 2}");
  const double q = query.q;
  const double vlq = query.v * query.lambda * q;

  if (p_is_two) {
    const double sigma = norm2(query.z);
    if (sigma <= 0.0) return zero_result(query);
    const auto root = scalar_largest_root(sigma, vlq, q);  // root = ||x||_2
    if (!root) return zero_result(query);
    ProxResult cand = value_result(query, scaled_copy(query.z, *root / sigma));
    ProxResult zero = zero_result(query);
    return strictly_better(cand.objective_value, zero.objective_value) ? cand : zero;
  }

  return best_l1_candidate(
      query,
      [&](double sum, std::size_t count) {
        return scalar_largest_root(sum, vlq * static_cast<double>(count), q);
      },
      [&](double s) { return vlq * std::pow(s, q - 1.0); });  // s = ||x||_1
}

namespace {

// ||x||_{1,1} separates per coordinate into scalar soft thresholds.
ProxResult prox_1_1(const ProxQuery& query) {
  validate(query);
  const double t = query.v * query.lambda;
  Vector x(query.z.size());
  bool all_zero = true;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double mag = std::abs(query.z[j]) - t;
    x[j] = mag > 0.0 ? mag * sign(query.z[j]) : 0.0;
    all_zero = all_zero && x[j] == 0.0;
  }
  ProxResult r = value_result(query, std::move(x));
  r.was_thresholded_to_zero = all_zero;
  return r;
}

}  // namespace

ProxResult prox_apply(const ProxQuery& query) {
  const double p = query.p;
  const double q = query.q;
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  if (near(p, 2.0)) {
    if (near(q, 1.0)) return prox_2_1(query);
    if (near(q, 0.0)) return prox_2_0(query);
    if (near(q, 0.5)) return prox_2_half(query);
    if (near(q, 2.0 / 3.0)) return prox_2_twothirds(query);
  } else if (near(p, 1.0)) {
    if (near(q, 1.0)) return prox_1_1(query);
    if (near(q, 0.5)) return prox_1_half(query);
    if (near(q, 2.0 / 3.0)) return prox_1_twothirds(query);
  }
  return prox_generic(query);
}

Vector prox_group_apply(const Vector& z, const GroupPartition& partition, double v,
                        const Regularizer& reg) {
  if (z.size() != partition.total_size()) throw ConfigError("prox_group_apply: length mismatch");
  Vector out(z.size(), 0.0);
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    const auto [begin, end] = partition.group_range(g);
    ProxQuery query;
    query.z.assign(z.begin() + static_cast<std::ptrdiff_t>(begin),
                   z.begin() + static_cast<std::ptrdiff_t>(end));
    query.v = v;
    query.lambda = reg.lambda;
    query.p = reg.p;
    query.q = reg.q;
    const ProxResult r = prox_apply(query);
    std::copy(r.x.begin(), r.x.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
  }
  return out;
}

}  // namespace gso

#include "gso/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "gso/errors.hpp"
#include "gso/prox.hpp"
#include "gso/rng.hpp"
#include "gso/solver.hpp"

namespace gso {

namespace {

// Sum of ||x_g||_p^q over the selected groups (count of nonzero groups for q=0).
double subset_penalty(const Vector& x, const GroupPartition& partition, double p, double q,
                      const std::set<std::size_t>& groups, bool complement) {
  double s = 0.0;
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    if (groups.contains(g) == complement) continue;
    const auto [begin, end] = partition.group_range(g);
    Vector slice(x.begin() + static_cast<std::ptrdiff_t>(begin),
                 x.begin() + static_cast<std::ptrdiff_t>(end));
    if (q == 0.0)
      s += (norm_inf(slice) > kZeroTol) ? 1.0 : 0.0;
    else
      s += std::pow(norm_p(slice, p), q);
  }
  return s;
}

}  // namespace

std::vector<std::size_t> top_groups_excluding(const Vector& x, const GroupPartition& partition,
                                              double p, std::size_t count,
                                              const std::set<std::size_t>& excluded) {
  const Vector norms = group_norms(x, partition, p);
  std::vector<std::size_t> candidates;
  for (std::size_t g = 0; g < partition.group_count(); ++g)
    if (!excluded.contains(g)) candidates.push_back(g);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  if (candidates.size() > count) candidates.resize(count);
  return candidates;
}

bool cone_membership(const Vector& x, const GroupPartition& partition, double p, double q,
                     std::size_t s) {
  if (s >= partition.group_count()) throw ConfigError("cone_membership: s must be < group count");
  const auto top = top_groups_excluding(x, partition, p, s, {});
  const std::set<std::size_t> top_set(top.begin(), top.end());
  const double inside = subset_penalty(x, partition, p, q, top_set, false);
  const double outside = subset_penalty(x, partition, p, q, top_set, true);
  return outside <= inside;
}

namespace {

struct ConeContext {
  const GrecQuery* query;
  std::set<std::size_t> j_set;
};

// Scales the J blocks up to restore || x_{J^c} ||_{p,q} <= || x_J ||_{p,q}.
// Returns false when the J part carries no mass at all.
bool project_to_cone(Vector& x, const ConeContext& ctx) {
  const auto& q = *ctx.query;
  const double inside = subset_penalty(x, q.partition, q.p, q.q, ctx.j_set, false);
  const double outside = subset_penalty(x, q.partition, q.p, q.q, ctx.j_set, true);
  if (outside <= inside) return true;
  if (inside <= 0.0) return false;
  // penalties are degree-q homogeneous in the block scale
  const double scale = std::pow(outside / inside, 1.0 / q.q);
  for (std::size_t g : ctx.j_set) {
    const auto [begin, end] = q.partition.group_range(g);
    for (std::size_t j = begin; j < end; ++j) x[j] *= scale;
  }
  return true;
}

double cone_ratio(const Vector& x, const ConeContext& ctx) {
  const auto& q = *ctx.query;
  std::set<std::size_t> denom_set = ctx.j_set;
  for (std::size_t g :
       top_groups_excluding(x, q.partition, q.p, q.extension_size, ctx.j_set))
    denom_set.insert(g);
  double den = 0.0;
  for (std::size_t g : denom_set) {
    const auto [begin, end] = q.partition.group_range(g);
    Vector slice(x.begin() + static_cast<std::ptrdiff_t>(begin),
                 x.begin() + static_cast<std::ptrdiff_t>(end));
    const double gn = norm_p(slice, q.p);
    den += gn * gn;
  }
  den = std::sqrt(den);
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return norm2(matvec(q.a, x)) / den;
}

// Greedy coordinate descent on the constrained ratio with a shrinking step.
double refine_direction(Vector& x, double ratio, const ConeContext& ctx) {
  const auto& q = *ctx.query;
  double step = 0.25 * std::max(norm_inf(x), 1e-6);
  for (std::size_t sweep = 0; sweep < q.refine_steps; ++sweep) {
    bool improved = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (double dir : {1.0, -1.0}) {
        Vector y = x;
        y[j] += dir * step;
        if (!project_to_cone(y, ctx)) continue;
        const double r = cone_ratio(y, ctx);
        if (r < ratio * (1.0 - 1e-12)) {
          x = std::move(y);
          ratio = r;
          improved = true;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-10) break;
    }
  }
  return ratio;
}

void enumerate_subsets(std::size_t r, std::size_t max_size,
                       const std::function<void(const std::set<std::size_t>&)>& visit) {
  std::vector<std::size_t> stack;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!stack.empty()) visit(std::set<std::size_t>(stack.begin(), stack.end()));
    if (stack.size() == max_size) return;
    for (std::size_t g = start; g < r; ++g) {
      stack.push_back(g);
      rec(g + 1);
      stack.pop_back();
    }
  };
  rec(0);
}

}  // namespace

GrecEstimate grec_estimate(const GrecQuery& query) {
  const std::size_t r = query.partition.group_count();
  if (query.a.cols() != query.partition.total_size())
    throw ConfigError("grec_estimate: matrix and partition disagree");
  if (r > 16) throw ConfigError("grec_estimate: enumeration limited to 16 groups");
  if (query.support_size < 1 || query.support_size > query.extension_size ||
      query.extension_size >= r)
    throw ConfigError("grec_estimate: requires 1 <= S <= N < group count");
  if (!(query.q > 0.0)) throw ConfigError("grec_estimate: requires q > 0");
  if (query.samples < 1) throw ConfigError("grec_estimate: needs at least one sample");

  const std::size_t n = query.partition.total_size();
  GrecEstimate best;
  best.phi_upper = std::numeric_limits<double>::infinity();
  ConeContext best_ctx{&query, {}};

  std::size_t j_index = 0;
  enumerate_subsets(r, query.support_size, [&](const std::set<std::size_t>& j_set) {
    ConeContext ctx{&query, j_set};
    RandomStream stream(query.seed, 0x67726563ULL, j_index++);

    auto consider = [&](Vector x) {
      if (!project_to_cone(x, ctx)) return;
      double ratio = cone_ratio(x, ctx);
      if (!std::isfinite(ratio)) return;
      ratio = refine_direction(x, ratio, ctx);
      if (ratio < best.phi_upper) {
        best.phi_upper = ratio;
        best.witness = x;
        best_ctx = ctx;
      }
    };

    for (const Vector& dir : query.seeded_directions)
      if (dir.size() == n) consider(dir);

    for (std::size_t s = 0; s < query.samples; ++s) {
      Vector x(n);
      bool usable = false;
      for (int attempt = 0; attempt < 20 && !usable; ++attempt) {
        for (double& t : x) t = stream.normal();
        usable = std::any_of(x.begin(), x.end(), [](double t) { return t != 0.0; });
      }
      if (!usable) throw NumericalError("grec_estimate: sampler produced only zero draws");
      consider(std::move(x));
    }
  });

  if (!std::isfinite(best.phi_upper))
    throw NumericalError("grec_estimate: no feasible direction sampled");

  const double scale = norm2(best.witness);
  for (double& t : best.witness) t /= scale;
  best.phi_upper = cone_ratio(best.witness, best_ctx);  // recomputed from the witness
  best.witness_index_set.active = best_ctx.j_set;
  return best;
}

double oracle_inequality_gap(const Problem& prob, const Vector& xbar, const Vector& x,
                             double phi) {
  if (phi <= 0.0) throw ConfigError("oracle_inequality_gap: phi must be positive");
  const double q = prob.reg.q;
  const double p = prob.reg.p;
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("oracle_inequality_gap: requires 0 < q <= 1");
  const double lambda = prob.reg.lambda;
  const double level = lambda * lpq_penalty(xbar, prob.partition, p, q);
  const double fx = objective(prob, x);
  if (fx > level + 1e-12 * std::max(1.0, std::abs(level)))
    throw ConfigError("oracle_inequality_gap: x is outside the level set of xbar");

  const GroupSupport support = extract_support(xbar, prob.partition);
  const double s_count = static_cast<double>(support.active.size());
  const int k = smallest_k(q);
  const double k_factor = 1.0 - std::ldexp(1.0, -k);  // 1 - 2^{-K}

  const Vector ax = matvec(prob.a, x);
  const Vector axbar = matvec(prob.a, xbar);
  double lhs = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - axbar[i];
    lhs += d * d;
  }
  lhs += lambda * subset_penalty(x, prob.partition, p, q, support.active, true);

  const double rhs = std::pow(lambda, 2.0 / (2.0 - q)) *
                     std::pow(s_count, k_factor * 2.0 / (2.0 - q)) /
                     std::pow(phi, 2.0 * q / (2.0 - q));
  return rhs - lhs;
}

double global_recovery_bound(const BoundInputs& in) {
  if (in.phi <= 0.0) throw ConfigError("global_recovery_bound: phi must be positive");
  if (!(in.q > 0.0 && in.q <= 1.0))
    throw ConfigError("global_recovery_bound: requires 0 < q <= 1");
  if (in.lambda < 0.0) throw ConfigError("global_recovery_bound: lambda must be nonnegative");
  const double q = in.q;
  const int k = smallest_k(q);
  const double k_factor = 1.0 - std::ldexp(1.0, -k);
  const double s_exp = (q - 2.0) / q + k_factor * 4.0 / (q * (2.0 - q));
  return 2.0 * std::pow(in.lambda, 2.0 / (2.0 - q)) *
         std::pow(static_cast<double>(in.group_sparsity), s_exp) /
         std::pow(in.phi, 4.0 / (2.0 - q));
}

double local_recovery_bound(const BoundInputs& in) {
  if (!(in.q > 0.0 && in.q < 1.0))
    throw ConfigError("local_recovery_bound: requires 0 < q < 1");
  if (!(in.p >= 1.0 && in.p <= 2.0))
    throw ConfigError("local_recovery_bound: requires 1 <= p <= 2");
  if (in.active_groups.empty())
    throw ConfigError("local_recovery_bound: needs the nonzero groups of xbar");
  double max_factor = 0.0;
  for (const Vector& g : in.active_groups) {
    if (g.empty()) throw ConfigError("local_recovery_bound: empty group");
    for (double t : g)
      if (t == 0.0)
        throw ConfigError("local_recovery_bound: groups must be fully active");
    const double gp = norm_p(g, in.p);
    double sum = 0.0;  // ||g||_{2p-2}^{2p-2}; reduces to the entry count at p = 1
    for (double t : g) sum += std::pow(std::abs(t), 2.0 * in.p - 2.0);
    max_factor = std::max(max_factor, std::pow(gp, 2.0 * (in.q - in.p)) * sum);
  }
  const double gram = gram_inverse_norm(in.active_columns);
  return in.lambda * in.lambda * in.q * in.q * static_cast<double>(in.group_sparsity) *
         gram * gram * max_factor;
}

Vector global_min_small(const Problem& prob, double grid_step, std::size_t refine,
                        double box_radius) {
  const std::size_t n = prob.a.cols();
  const std::size_t m = prob.a.rows();
  if (n > 4) throw ConfigError("global_min_small: limited to 4 variables");
  if (grid_step <= 0.0) throw ConfigError("global_min_small: grid_step must be positive");

  double radius = box_radius;
  if (radius <= 0.0) {
    // 2 (||x_mn||_inf + ||b||_2) with x_mn the minimum-norm least-squares solution
    double xmn_inf = 0.0;
    try {
      Matrix aat(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double s = 0.0;
          for (std::size_t c = 0; c < n; ++c) s += prob.a(i, c) * prob.a(j, c);
          aat(i, j) = s;
        }
      const Vector w = matvec(invert_small(aat), prob.b);
      xmn_inf = norm_inf(transpose_matvec(prob.a, w));
    } catch (const NumericalError&) {
      xmn_inf = 0.0;  // rank-deficient rows: fall back to the rhs scale alone
    }
    radius = 2.0 * (xmn_inf + norm2(prob.b));
  }

  const auto steps = static_cast<std::size_t>(std::floor(radius / grid_step));
  const std::size_t per_axis = 2 * steps + 1;
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(per_axis);
  if (total > 1e8) throw ConfigError("global_min_small: grid of " + std::to_string(total) +
                                     " nodes exceeds the 1e8 limit");

  std::vector<double> values(per_axis);
  for (std::size_t i = 0; i < per_axis; ++i)
    values[i] = (static_cast<double>(i) - static_cast<double>(steps)) * grid_step;

  const bool singleton = prob.partition.max_group_size() == 1;
  std::vector<double> value_penalty;  // singleton fast path: lambda |t|^q per node
  if (singleton) {
    value_penalty.resize(per_axis);
    for (std::size_t i = 0; i < per_axis; ++i) {
      const double a = std::abs(values[i]);
      value_penalty[i] = (prob.reg.q == 0.0) ? (a > kZeroTol ? 1.0 : 0.0)
                                             : std::pow(a, prob.reg.q);
    }
  }

  Vector x(n, 0.0);
  Vector best_x(n, 0.0);
  double best_f = std::numeric_limits<double>::infinity();
  Vector ax_stack((n + 1) * m, 0.0);  // partial A x per recursion level
  for (std::size_t i = 0; i < m; ++i) ax_stack[i] = -prob.b[i];

  std::function<void(std::size_t, double)> scan = [&](std::size_t level, double pen) {
    const double* ax_in = &ax_stack[level * m];
    double* ax_out = &ax_stack[(level + 1) * m];
    for (std::size_t vi = 0; vi < per_axis; ++vi) {
      const double val = values[vi];
      x[level] = val;
      for (std::size_t i = 0; i < m; ++i) ax_out[i] = ax_in[i] + prob.a(i, level) * val;
      const double pen_next = singleton ? pen + value_penalty[vi] : 0.0;
      if (level + 1 < n) {
        scan(level + 1, pen_next);
        continue;
      }
      double f = 0.0;
      for (std::size_t i = 0; i < m; ++i) f += ax_out[i] * ax_out[i];
      f += prob.reg.lambda *
           (singleton ? pen_next
                      : lpq_penalty(x, prob.partition, prob.reg.p, prob.reg.q));
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
    }
  };
  scan(0, 0.0);

  if (refine == 0) return best_x;

  // Polish within the basin the grid located.
  SolverConfig cfg;
  cfg.max_iter = refine;
  cfg.x_tol = 0.0;
  cfg.f_tol = 0.0;
  cfg.record_history = false;
  cfg.x0 = best_x;
  const SolveReport run = pgm_solve(prob, cfg);
  return (objective(prob, run.x_final) <= best_f) ? run.x_final : best_x;
}

}  // namespace gso

#include "gso/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gso/errors.hpp"

namespace gso {

GroupPartition GroupPartition::from_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw ConfigError("partition: needs at least one group");
  GroupPartition p;
  std::size_t start = 0;
  for (std::size_t s : sizes) {
    if (s == 0) throw ConfigError("partition: empty group");
    p.bounds_.emplace_back(start, start + s);
    p.n_max_ = std::max(p.n_max_, s);
    start += s;
  }
  p.n_ = start;
  return p;
}

GroupPartition GroupPartition::from_scattered(
    const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> perm;
  std::vector<bool> seen(n, false);
  for (const auto& g : groups) {
    if (g.empty()) throw ConfigError("partition: empty group");
    for (std::size_t idx : g) {
      if (idx >= n) throw ConfigError("partition: index out of range");
      if (seen[idx]) throw ConfigError("partition: overlapping groups");
      seen[idx] = true;
      perm.push_back(idx);
    }
    sizes.push_back(g.size());
  }
  if (perm.size() != n) throw ConfigError("partition: groups do not cover all indices");
  GroupPartition p = from_sizes(sizes);
  bool identity = true;
  for (std::size_t i = 0; i < n; ++i)
    if (perm[i] != i) identity = false;
  if (!identity) p.perm_ = std::move(perm);
  return p;
}

Vector GroupPartition::to_contiguous(const Vector& x) const {
  if (x.size() != n_) throw ConfigError("partition: vector length mismatch");
  if (perm_.empty()) return x;
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[i] = x[perm_[i]];
  return y;
}

Vector GroupPartition::to_original(const Vector& x) const {
  if (x.size() != n_) throw ConfigError("partition: vector length mismatch");
  if (perm_.empty()) return x;
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = x[i];
  return y;
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

}  // namespace

Regularizer::Regularizer(double p_in, double q_in, double lambda_in)
    : p(p_in), q(q_in), lambda(lambda_in) {
  if (lambda <= 0.0) throw ConfigError("regularizer: lambda must be positive");
  if (is_analytic_pair()) return;
  if (!(q > 0.0 && q < 1.0) || !(near(p, 1.0) || near(p, 2.0)))
    throw ConfigError("regularizer: unsupported (p, q) = (" + std::to_string(p) + ", " +
                      std::to_string(q) + ")");
}

bool Regularizer::is_analytic_pair() const {
  const double third2 = 2.0 / 3.0;
  if (near(p, 2.0)) return near(q, 1.0) || near(q, 0.0) || near(q, 0.5) || near(q, third2);
  // ||x||_{1,1} is the plain l1 norm; its prox is the coordinatewise soft threshold.
  if (near(p, 1.0)) return near(q, 1.0) || near(q, 0.5) || near(q, third2);
  return false;
}

Problem::Problem(Matrix a_in, Vector b_in, GroupPartition partition_in, Regularizer reg_in)
    : a(std::move(a_in)), b(std::move(b_in)), partition(std::move(partition_in)),
      reg(reg_in) {
  if (a.cols() != partition.total_size())
    throw ConfigError("problem: matrix has " + std::to_string(a.cols()) +
                      " columns but partition covers " +
                      std::to_string(partition.total_size()));
  if (a.rows() != b.size())
    throw ConfigError("problem: matrix has " + std::to_string(a.rows()) +
                      " rows but rhs has length " + std::to_string(b.size()));
}

namespace {

double group_norm_p(const Vector& x, std::size_t begin, std::size_t end, double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t j = begin; j < end; ++j) s += x[j] * x[j];
    return std::sqrt(s);
  }
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t j = begin; j < end; ++j) s += std::abs(x[j]);
    return s;
  }
  double s = 0.0;
  for (std::size_t j = begin; j < end; ++j) s += std::pow(std::abs(x[j]), p);
  return std::pow(s, 1.0 / p);
}

bool group_nonzero(const Vector& x, std::size_t begin, std::size_t end) {
  for (std::size_t j = begin; j < end; ++j)
    if (std::abs(x[j]) > kZeroTol) return true;
  return false;
}

}  // namespace

double lpq_penalty(const Vector& x, const GroupPartition& partition, double p, double q) {
  if (x.size() != partition.total_size()) throw ConfigError("lpq_penalty: length mismatch");
  if (p <= 0.0 || q < 0.0) throw ConfigError("lpq_penalty: requires p > 0, q >= 0");
  double s = 0.0;
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    const auto [begin, end] = partition.group_range(g);
    if (q == 0.0) {
      s += group_nonzero(x, begin, end) ? 1.0 : 0.0;
      continue;
    }
    const double gn = group_norm_p(x, begin, end, p);
    s += (q == 1.0) ? gn : std::pow(gn, q);
  }
  return s;
}

double lpq_norm(const Vector& x, const GroupPartition& partition, double p, double q) {
  const double s = lpq_penalty(x, partition, p, q);
  if (q == 0.0 || q == 1.0) return s;
  return std::pow(s, 1.0 / q);
}

double objective(const Problem& prob, const Vector& x) {
  const Vector ax = matvec(prob.a, x);
  double misfit = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - prob.b[i];
    misfit += d * d;
  }
  return misfit + prob.reg.lambda * lpq_penalty(x, prob.partition, prob.reg.p, prob.reg.q);
}

Vector group_norms(const Vector& x, const GroupPartition& partition, double p) {
  if (x.size() != partition.total_size()) throw ConfigError("group_norms: length mismatch");
  Vector out(partition.group_count());
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    const auto [begin, end] = partition.group_range(g);
    out[g] = group_norm_p(x, begin, end, p);
  }
  return out;
}

GroupSupport extract_support(const Vector& x, const GroupPartition& partition) {
  if (x.size() != partition.total_size()) throw ConfigError("extract_support: length mismatch");
  GroupSupport s;
  for (std::size_t g = 0; g < partition.group_count(); ++g) {
    const auto [begin, end] = partition.group_range(g);
    if (group_nonzero(x, begin, end)) s.active.insert(g);
  }
  return s;
}

int smallest_k(double q) {
  if (q <= 0.0 || q > 1.0) throw ConfigError("smallest_k: requires 0 < q <= 1");
  int k = 1;
  // ldexp(q, k-1) = 2^(k-1) q computed exactly.
  while (std::ldexp(q, k - 1) < 1.0) ++k;
  return k;
}

}  // namespace gso

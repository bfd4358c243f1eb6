#include "gso/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "gso/errors.hpp"
#include "gso/rng.hpp"

namespace gso {

namespace {

enum StreamPurpose : std::uint64_t {
  kMatrixStream = 1,
  kSupportStream = 2,
  kSignalStream = 3,
  kNoiseStream = 4,
};

void validate(const SimSpec& spec) {
  if (spec.n == 0 || spec.m == 0 || spec.groups == 0) throw ConfigError("sim spec: empty sizes");
  if (spec.n % spec.groups != 0) throw ConfigError("sim spec: group count must divide n");
  if (spec.active_groups > spec.groups)
    throw ConfigError("sim spec: more active groups than groups");
  if (spec.m > spec.n) throw ConfigError("sim spec: m must not exceed n");
  if (spec.noise_sigma < 0.0) throw ConfigError("sim spec: negative noise");
  if (spec.trials < 1) throw ConfigError("sim spec: needs at least one trial");
}

}  // namespace

SimInstance generate_instance(const SimSpec& spec, std::size_t trial) {
  validate(spec);
  SimInstance inst;
  inst.partition = GroupPartition::from_sizes(
      std::vector<std::size_t>(spec.groups, spec.n / spec.groups));

  for (int attempt = 0;; ++attempt) {
    RandomStream stream(spec.master_seed, kMatrixStream, trial, attempt);
    Matrix raw(spec.m, spec.n);
    for (double& t : raw.data()) t = stream.normal();
    try {
      inst.a = orthonormalize_rows(raw);
      break;
    } catch (const NumericalError&) {
      if (attempt >= 3) throw;  // Gaussian draws are dependent with probability ~0
    }
  }

  inst.xbar.assign(spec.n, 0.0);
  {
    RandomStream support(spec.master_seed, kSupportStream, trial);
    std::vector<std::size_t> pool(spec.groups);
    std::iota(pool.begin(), pool.end(), 0);
    RandomStream signal(spec.master_seed, kSignalStream, trial);
    for (std::size_t k = 0; k < spec.active_groups; ++k) {
      const std::size_t pick = k + support.below(pool.size() - k);
      std::swap(pool[k], pool[pick]);
      const auto [begin, end] = inst.partition.group_range(pool[k]);
      for (std::size_t j = begin; j < end; ++j) inst.xbar[j] = signal.normal();
    }
  }

  inst.b = matvec(inst.a, inst.xbar);
  if (spec.noise_sigma > 0.0) {
    RandomStream noise(spec.master_seed, kNoiseStream, trial);
    for (double& t : inst.b) t += spec.noise_sigma * noise.normal();
  }
  return inst;
}

namespace {

TrialResult run_trial(const SimSpec& spec, const RegKind& kind, std::size_t trial) {
  TrialResult result;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SimInstance inst = generate_instance(spec, trial);
    // lambda is re-solved each iteration; the value here is a placeholder
    Problem prob(std::move(inst.a), std::move(inst.b), inst.partition,
                 Regularizer(kind.p, kind.q, 1.0));
    SolverConfig cfg;
    cfg.target_sparsity = spec.active_groups;
    cfg.record_history = false;
    const SolveReport report = pgm_solve(prob, cfg);
    result.iterations = report.iterations;

    double diff = 0.0, base = 0.0;
    for (std::size_t j = 0; j < inst.xbar.size(); ++j) {
      const double d = report.x_final[j] - inst.xbar[j];
      diff += d * d;
      base += inst.xbar[j] * inst.xbar[j];
    }
    if (base > 0.0)
      result.relative_error = std::sqrt(diff / base);
    else
      result.relative_error = std::sqrt(diff) > 0.0 ? std::numeric_limits<double>::infinity()
                                                    : 0.0;
  } catch (const std::exception&) {
    result.solver_failed = true;
    result.relative_error = std::numeric_limits<double>::infinity();
  }
  result.success = result.relative_error < 0.005;
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace

std::vector<RateRow> recovery_rate_experiment(const SimSpec& spec,
                                              const std::vector<RegKind>& kinds,
                                              std::size_t threads) {
  validate(spec);
  if (spec.active_groups < 1 || spec.active_groups >= spec.groups)
    throw ConfigError("recovery experiment: active groups must be in [1, groups)");
  std::vector<RateRow> rows;
  for (const RegKind& kind : kinds) {
    RateRow row;
    row.kind = kind;
    row.trials.resize(spec.trials);

    if (threads <= 1) {
      for (std::size_t t = 0; t < spec.trials; ++t) row.trials[t] = run_trial(spec, kind, t);
    } else {
      std::atomic<std::size_t> next{0};
      auto worker = [&]() {
        for (std::size_t t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1))
          row.trials[t] = run_trial(spec, kind, t);
      };
      std::vector<std::thread> pool;
      const std::size_t count = std::min(threads, spec.trials);
      pool.reserve(count);
      for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    double succ = 0.0, err = 0.0, iters = 0.0;
    for (const TrialResult& t : row.trials) {
      succ += t.success ? 1.0 : 0.0;
      err += std::isfinite(t.relative_error) ? t.relative_error : 1.0;
      iters += static_cast<double>(t.iterations);
    }
    const double nt = static_cast<double>(spec.trials);
    row.success_rate = succ / nt;
    row.mean_relative_error = err / nt;
    row.mean_iterations = iters / nt;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GroupSizeRow> group_size_sweep(const SimSpec& spec,
                                           const std::vector<std::size_t>& sizes,
                                           const std::vector<RegKind>& kinds,
                                           std::size_t threads) {
  validate(spec);
  const std::size_t active_entries = spec.active_groups * (spec.n / spec.groups);
  std::vector<GroupSizeRow> out;
  for (std::size_t size : sizes) {
    if (size == 0 || spec.n % size != 0)
      throw ConfigError("group size sweep: size " + std::to_string(size) + " does not divide n");
    if (active_entries % size != 0)
      throw ConfigError("group size sweep: size " + std::to_string(size) +
                        " does not divide the active entry count");
    SimSpec derived = spec;
    derived.groups = spec.n / size;
    derived.active_groups = active_entries / size;
    GroupSizeRow row;
    row.group_size = size;
    row.rows = recovery_rate_experiment(derived, kinds, threads);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<QSweepRow> q_sweep(const SimSpec& spec, double p, const std::vector<double>& q_grid,
                               std::size_t threads) {
  std::vector<QSweepRow> out;
  for (double q : q_grid) {
    if (q < 0.0 || q > 1.0) throw ConfigError("q sweep: q must lie in [0, 1]");
    QSweepRow row;
    row.q = q;
    row.row = recovery_rate_experiment(spec, {RegKind{p, q}}, threads).front();
    out.push_back(std::move(row));
  }
  return out;
}

PathScore solution_path_scores(const Problem& prob, std::size_t k_max) {
  const std::size_t r = prob.partition.group_count();
  if (k_max < 1 || k_max >= r)
    throw ConfigError("path scores: k_max must be in [1, group count)");
  PathScore out;
  out.scores.assign(r, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    SolverConfig cfg;
    cfg.target_sparsity = k;
    cfg.record_history = false;
    try {
      const SolveReport report = pgm_solve(prob, cfg);
      for (std::size_t g : extract_support(report.x_final, prob.partition).active)
        if (out.scores[g] == 0.0) out.scores[g] = 1.0 / static_cast<double>(k);
    } catch (const std::exception&) {
      ++out.failed_solves;  // treated as an all-zero solution
    }
  }
  return out;
}

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw ConfigError("roc_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t positives = 0, negatives = 0;
  for (bool l : labels) (l ? positives : negatives)++;
  if (positives == 0 || negatives == 0)
    throw ConfigError("roc_auc: both classes must be present");

  // Count (positive, negative) pairs won by the positive, ties half a win.
  std::uint64_t wins2 = 0;  // doubled to stay integral
  std::uint64_t neg_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t tie_pos = 0, tie_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tie_pos : tie_neg)++;
      ++j;
    }
    wins2 += tie_pos * (2 * neg_below + tie_neg);
    neg_below += tie_neg;
    i = j;
  }
  return static_cast<double>(wins2) / (2.0 * static_cast<double>(positives) *
                                       static_cast<double>(negatives));
}

}  // namespace gso

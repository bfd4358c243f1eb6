// Command-line front end: group-sparse solvers, benchmarks, and the
// verification utilities, wired to CSV/JSON files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gso/analysis.hpp"
#include "gso/errors.hpp"
#include "gso/io.hpp"
#include "gso/model.hpp"
#include "gso/prox.hpp"
#include "gso/simlab.hpp"
#include "gso/solver.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// q values given as decimals snap to the nearby analytic order so that
// e.g. --q 0.667 selects the 2/3 operators.
double canonical_q(double q) {
  if (std::abs(q - 2.0 / 3.0) <= 2e-3) return 2.0 / 3.0;
  if (std::abs(q - 1.0 / 3.0) <= 2e-3) return 1.0 / 3.0;
  return q;
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(sep, start);
    const std::string token =
        text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!token.empty()) {
      try {
        out.push_back(std::stod(token));
      } catch (const std::exception&) {
        throw gso::ConfigError("cannot parse number '" + token + "'");
      }
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<gso::RegKind> parse_kinds(const std::string& text) {
  std::vector<gso::RegKind> kinds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(';', start);
    const std::string token =
        text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!token.empty()) {
      const auto nums = parse_number_list(token, ',');
      if (nums.size() != 2) throw gso::ConfigError("kind '" + token + "' is not 'p,q'");
      kinds.push_back({nums[0], canonical_q(nums[1])});
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (kinds.empty()) throw gso::ConfigError("no regularization kinds given");
  return kinds;
}

// "lo:hi:steps" -> geometric grid from lo to hi inclusive
std::vector<double> parse_log_grid(const std::string& text) {
  const auto parts = parse_number_list(text, ':');
  if (parts.size() != 3 || parts[0] <= 0.0 || parts[1] < parts[0] || parts[2] < 1)
    throw gso::ConfigError("expected lo:hi:steps with 0 < lo <= hi");
  const auto steps = static_cast<std::size_t>(parts[2]);
  std::vector<double> grid;
  if (steps == 1) return {parts[0]};
  for (std::size_t i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
    grid.push_back(parts[0] * std::pow(parts[1] / parts[0], f));
  }
  return grid;
}

// Everything that went into a run, echoed into result sidecars.
struct Provenance {
  json config = json::object();
  std::optional<std::uint64_t> seed;
};

void write_result_file(const std::string& path, const std::string& content,
                       const Provenance& prov) {
  gso::atomic_write_text(path, content);
  json meta;
  meta["tool_version"] = kVersion;
  meta["config"] = prov.config;
  if (prov.seed) meta["seed"] = *prov.seed;
  gso::atomic_write_text(path + ".meta.json", meta.dump(2) + "\n");
}

std::string rate_rows_csv(const std::vector<gso::RateRow>& rows) {
  std::string csv = "p,q,success_rate,mean_relative_error,mean_iterations\n";
  for (const auto& row : rows) {
    csv += gso::format_double(row.kind.p) + "," + gso::format_double(row.kind.q) + "," +
           gso::format_double(row.success_rate) + "," +
           gso::format_double(row.mean_relative_error) + "," +
           gso::format_double(row.mean_iterations) + "\n";
  }
  return csv;
}

gso::Problem load_problem(const std::string& matrix_path, const std::string& rhs_path,
                          const std::string& groups_path, double p, double q, double lambda) {
  gso::Matrix a = gso::read_matrix_auto(matrix_path);
  gso::Vector b = gso::read_vector(rhs_path);
  gso::GroupPartition partition = gso::read_partition_json(groups_path, a.cols());
  return gso::Problem(std::move(a), std::move(b), std::move(partition),
                      gso::Regularizer(p, canonical_q(q), lambda));
}

// Example problem behind `figure1`: 2x3 sensing matrix whose q = 1/2
// regularized global minima track the planted solution (1, 0, 0).
gso::Matrix figure1_matrix() {
  gso::Matrix a(2, 3);
  a(0, 0) = 2; a(0, 1) = 3; a(0, 2) = 1;
  a(1, 0) = 2; a(1, 1) = 1; a(1, 2) = 3;
  return a;
}

int run(int argc, char** argv) {
  CLI::App app{"Group-sparse least squares via proximal gradient thresholding"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- shared state filled by the subcommands ----
  std::string matrix_path, rhs_path, groups_path, out_path, trace_path, config_path;
  double p = 2.0, q = 1.0, lambda = 0.0, v = 0.0, x_tol = -1.0, f_tol = -1.0;
  double sigma = 0.001, phi = 1.0, grid_step = 0.02, box_radius = 2.0;
  std::string z_text, kinds_text = "2,1;2,0;2,0.5;1,0.5;2,0.667;1,0.667";
  std::string sizes_text, q_grid_text, lambda_grid_text = "0.0001:0.5:5", mode = "global";
  std::string xbar_path;
  std::size_t max_iter = 10000, sparsity = 0, n = 256, m = 64, groups_count = 32;
  std::size_t active = 2, trials = 50, s_count = 1, n_count = 1, samples = 128, refine = 40;
  std::size_t k_max = 10, threads = 1, polish = 300;
  std::uint64_t seed = 0;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file of option defaults (flags win)");
    sub->add_option("--threads", threads, "worker threads for trial loops");
  };

  CLI::App* prox_cmd = app.add_subcommand("prox-eval", "evaluate one group prox query");
  prox_cmd->add_option("--p", p)->required();
  prox_cmd->add_option("--q", q)->required();
  prox_cmd->add_option("--v", v, "stepsize")->required();
  prox_cmd->add_option("--lambda", lambda)->required();
  prox_cmd->add_option("--z", z_text, "comma separated group vector")->required();
  add_config(prox_cmd);

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the proximal gradient solver");
  solve_cmd->add_option("--matrix", matrix_path)->required();
  solve_cmd->add_option("--rhs", rhs_path)->required();
  solve_cmd->add_option("--groups", groups_path)->required();
  solve_cmd->add_option("--p", p)->required();
  solve_cmd->add_option("--q", q)->required();
  solve_cmd->add_option("--lambda", lambda, "fixed regularization weight");
  solve_cmd->add_option("--sparsity", sparsity, "target number of nonzero groups");
  solve_cmd->add_option("--stepsize", v, "gradient stepsize (default 0.99/(2||A||^2))");
  solve_cmd->add_option("--max-iter", max_iter);
  solve_cmd->add_option("--tol", x_tol, "iterate tolerance");
  solve_cmd->add_option("--f-tol", f_tol, "objective tolerance");
  solve_cmd->add_option("--out", out_path, "write x_final as CSV");
  solve_cmd->add_option("--trace", trace_path, "write objective/support trace CSV");
  add_config(solve_cmd);

  CLI::App* bench_cmd = app.add_subcommand("bench-recovery", "random recovery-rate benchmark");
  bench_cmd->add_option("--n", n);
  bench_cmd->add_option("--m", m);
  bench_cmd->add_option("--groups-count", groups_count);
  bench_cmd->add_option("--active", active);
  bench_cmd->add_option("--sigma", sigma);
  bench_cmd->add_option("--trials", trials);
  bench_cmd->add_option("--kinds", kinds_text, "semicolon separated p,q pairs");
  bench_cmd->add_option("--seed", seed)->required();
  bench_cmd->add_option("--out", out_path)->required();
  add_config(bench_cmd);

  CLI::App* sweep_size_cmd = app.add_subcommand("sweep-groupsize", "recovery vs group size");
  sweep_size_cmd->add_option("--n", n);
  sweep_size_cmd->add_option("--m", m);
  sweep_size_cmd->add_option("--groups-count", groups_count);
  sweep_size_cmd->add_option("--active", active);
  sweep_size_cmd->add_option("--sigma", sigma);
  sweep_size_cmd->add_option("--trials", trials);
  sweep_size_cmd->add_option("--kinds", kinds_text);
  sweep_size_cmd->add_option("--sizes", sizes_text, "comma separated group sizes")->required();
  sweep_size_cmd->add_option("--seed", seed)->required();
  sweep_size_cmd->add_option("--out", out_path)->required();
  add_config(sweep_size_cmd);

  CLI::App* sweep_q_cmd = app.add_subcommand("sweep-q", "recovery vs regularization order");
  sweep_q_cmd->add_option("--n", n);
  sweep_q_cmd->add_option("--m", m);
  sweep_q_cmd->add_option("--groups-count", groups_count);
  sweep_q_cmd->add_option("--active", active);
  sweep_q_cmd->add_option("--sigma", sigma);
  sweep_q_cmd->add_option("--trials", trials);
  sweep_q_cmd->add_option("--p", p);
  sweep_q_cmd->add_option("--q-grid", q_grid_text, "comma separated q values")->required();
  sweep_q_cmd->add_option("--seed", seed)->required();
  sweep_q_cmd->add_option("--out", out_path)->required();
  add_config(sweep_q_cmd);

  CLI::App* grec_cmd = app.add_subcommand("grec-estimate", "sampled restricted-eigenvalue bound");
  grec_cmd->add_option("--matrix", matrix_path)->required();
  grec_cmd->add_option("--groups", groups_path)->required();
  grec_cmd->add_option("--p", p)->required();
  grec_cmd->add_option("--q", q)->required();
  grec_cmd->add_option("--S", s_count)->required();
  grec_cmd->add_option("--N", n_count)->required();
  grec_cmd->add_option("--samples", samples);
  grec_cmd->add_option("--refine", refine);
  grec_cmd->add_option("--seed", seed)->required();
  add_config(grec_cmd);

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "evaluate a recovery bound");
  bounds_cmd->add_option("--mode", mode)->check(CLI::IsMember({"global", "local"}));
  bounds_cmd->add_option("--lambda", lambda)->required();
  bounds_cmd->add_option("--S", s_count)->required();
  bounds_cmd->add_option("--q", q)->required();
  bounds_cmd->add_option("--phi", phi);
  bounds_cmd->add_option("--p", p);
  bounds_cmd->add_option("--matrix", matrix_path, "active columns B (local mode)");
  bounds_cmd->add_option("--xbar", xbar_path, "true solution (local mode)");
  bounds_cmd->add_option("--groups", groups_path, "partition of xbar (local mode)");
  add_config(bounds_cmd);

  CLI::App* fig1_cmd = app.add_subcommand(
      "figure1", "global-minimization error vs the q=1/2 recovery bound");
  fig1_cmd->add_option("--lambda-grid", lambda_grid_text, "lo:hi:steps geometric grid");
  fig1_cmd->add_option("--grid-step", grid_step);
  fig1_cmd->add_option("--refine", polish);
  fig1_cmd->add_option("--box", box_radius);
  fig1_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
  add_config(fig1_cmd);

  CLI::App* path_cmd = app.add_subcommand("path-scores", "solution-path activation scores");
  path_cmd->add_option("--matrix", matrix_path)->required();
  path_cmd->add_option("--rhs", rhs_path)->required();
  path_cmd->add_option("--groups", groups_path)->required();
  path_cmd->add_option("--p", p)->required();
  path_cmd->add_option("--q", q)->required();
  path_cmd->add_option("--kmax", k_max)->required();
  path_cmd->add_option("--out", out_path)->required();
  add_config(path_cmd);

  // ---- merge --config defaults: flags already present win ----
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    json doc;
    try {
      doc = json::parse(gso::read_text_file(args[i + 1]));
    } catch (const json::exception& e) {
      throw gso::ConfigError(std::string("config file: ") + e.what());
    }
    if (!doc.is_object()) throw gso::ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
      const std::string flag = "--" + key;
      if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
      if (value.is_boolean()) {
        if (value.get<bool>()) args.push_back(flag);
      } else if (value.is_string()) {
        args.push_back(flag);
        args.push_back(value.get<std::string>());
      } else {
        args.push_back(flag);
        args.push_back(value.dump());
      }
    }
    break;
  }

  try {
    std::vector<const char*> cargs;
    cargs.push_back("gso");
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Provenance prov;
  for (const auto& s : args) prov.config["argv"].push_back(s);
  q = canonical_q(q);

  if (prox_cmd->parsed()) {
    gso::ProxQuery query;
    query.z = parse_number_list(z_text, ',');
    query.v = v;
    query.lambda = lambda;
    query.p = p;
    query.q = q;
    const gso::ProxResult r = gso::prox_apply(query);
    std::string line;
    for (std::size_t j = 0; j < r.x.size(); ++j)
      line += (j ? "," : "") + gso::format_double(r.x[j]);
    std::cout << line << "\n" << gso::format_double(r.objective_value) << "\n";
    return kExitOk;
  }

  if (solve_cmd->parsed()) {
    if ((lambda > 0.0) == (sparsity > 0))
      throw gso::ConfigError("pass exactly one of --lambda or --sparsity");
    gso::Problem prob = load_problem(matrix_path, rhs_path, groups_path, p, q,
                                     lambda > 0.0 ? lambda : 1.0);
    gso::SolverConfig cfg;
    if (sparsity > 0) cfg.target_sparsity = sparsity;
    if (v > 0.0) cfg.stepsize = v;
    cfg.max_iter = max_iter;
    if (x_tol >= 0.0) cfg.x_tol = x_tol;
    if (f_tol >= 0.0) cfg.f_tol = f_tol;
    const gso::SolveReport report = gso::pgm_solve(prob, cfg);

    json summary;
    summary["iterations"] = report.iterations;
    summary["final_objective"] = report.objective_trace.back();
    summary["lambda_used"] = report.lambda_used;
    summary["status"] = report.status == gso::SolveStatus::kConverged ? "converged" : "max_iter";
    summary["support"] = json::array();
    for (std::size_t g : gso::extract_support(report.x_final, prob.partition).active)
      summary["support"].push_back(g);
    summary["x"] = report.x_final;
    std::cout << summary.dump(2) << "\n";

    if (!out_path.empty())
      write_result_file(out_path, gso::vector_to_csv_lines(report.x_final), prov);
    if (!trace_path.empty()) {
      std::string csv = "iter,objective,support\n";
      for (std::size_t k = 0; k < report.objective_trace.size(); ++k) {
        csv += std::to_string(k) + "," + gso::format_double(report.objective_trace[k]) + ",";
        std::string sup;
        for (std::size_t g : report.support_trace[k].active)
          sup += (sup.empty() ? "" : ";") + std::to_string(g);
        csv += sup + "\n";
      }
      write_result_file(trace_path, csv, prov);
    }
    return kExitOk;
  }

  if (bench_cmd->parsed() || sweep_size_cmd->parsed() || sweep_q_cmd->parsed()) {
    gso::SimSpec spec;
    spec.n = n;
    spec.m = m;
    spec.groups = groups_count;
    spec.active_groups = active;
    spec.noise_sigma = sigma;
    spec.trials = trials;
    spec.master_seed = seed;
    prov.seed = seed;

    std::string csv;
    if (bench_cmd->parsed()) {
      csv = rate_rows_csv(gso::recovery_rate_experiment(spec, parse_kinds(kinds_text), threads));
    } else if (sweep_size_cmd->parsed()) {
      std::vector<std::size_t> sizes;
      for (double s : parse_number_list(sizes_text, ','))
        sizes.push_back(static_cast<std::size_t>(s));
      csv = "group_size,p,q,success_rate,mean_relative_error,mean_iterations\n";
      for (const auto& row : gso::group_size_sweep(spec, sizes, parse_kinds(kinds_text), threads))
        for (const auto& rr : row.rows)
          csv += std::to_string(row.group_size) + "," + gso::format_double(rr.kind.p) + "," +
                 gso::format_double(rr.kind.q) + "," + gso::format_double(rr.success_rate) +
                 "," + gso::format_double(rr.mean_relative_error) + "," +
                 gso::format_double(rr.mean_iterations) + "\n";
    } else {
      std::vector<double> grid;
      for (double qq : parse_number_list(q_grid_text, ',')) grid.push_back(canonical_q(qq));
      csv = "q,success_rate,mean_relative_error,mean_iterations\n";
      for (const auto& row : gso::q_sweep(spec, p, grid, threads))
        csv += gso::format_double(row.q) + "," + gso::format_double(row.row.success_rate) +
               "," + gso::format_double(row.row.mean_relative_error) + "," +
               gso::format_double(row.row.mean_iterations) + "\n";
    }
    write_result_file(out_path, csv, prov);
    std::cout << csv;
    return kExitOk;
  }

  if (grec_cmd->parsed()) {
    gso::GrecQuery query;
    query.a = gso::read_matrix_auto(matrix_path);
    query.partition = gso::read_partition_json(groups_path, query.a.cols());
    query.p = p;
    query.q = q;
    query.support_size = s_count;
    query.extension_size = n_count;
    query.samples = samples;
    query.refine_steps = refine;
    query.seed = seed;
    prov.seed = seed;
    const gso::GrecEstimate est = gso::grec_estimate(query);
    json out;
    out["phi_upper"] = est.phi_upper;
    out["witness"] = est.witness;
    out["index_set"] = json::array();
    for (std::size_t g : est.witness_index_set.active) out["index_set"].push_back(g);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }

  if (bounds_cmd->parsed()) {
    gso::BoundInputs in;
    in.lambda = lambda;
    in.group_sparsity = s_count;
    in.q = q;
    in.phi = phi;
    double value = 0.0;
    if (mode == "global") {
      value = gso::global_recovery_bound(in);
    } else {
      if (matrix_path.empty() || xbar_path.empty() || groups_path.empty())
        throw gso::ConfigError("local mode needs --matrix, --xbar and --groups");
      in.p = p;
      in.active_columns = gso::read_matrix_auto(matrix_path);
      const gso::Vector xbar = gso::read_vector(xbar_path);
      const gso::GroupPartition partition = gso::read_partition_json(groups_path, xbar.size());
      for (std::size_t g : gso::extract_support(xbar, partition).active) {
        const auto [begin, end] = partition.group_range(g);
        in.active_groups.emplace_back(xbar.begin() + begin, xbar.begin() + end);
      }
      in.group_sparsity = in.active_groups.size();
      value = gso::local_recovery_bound(in);
    }
    std::cout << gso::format_double(value) << "\n";
    return kExitOk;
  }

  if (fig1_cmd->parsed()) {
    const gso::Matrix a = figure1_matrix();
    const auto part = gso::GroupPartition::from_sizes({1, 1, 1});
    const gso::Vector planted{1, 0, 0};
    std::string csv = "lambda,error_sq,bound\n";
    for (double lam : parse_log_grid(lambda_grid_text)) {
      gso::Problem prob(a, gso::Vector{2, 2}, part, gso::Regularizer(2, 0.5, lam));
      const gso::Vector x = gso::global_min_small(prob, grid_step, polish, box_radius);
      double err2 = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        const double d = x[j] - planted[j];
        err2 += d * d;
      }
      csv += gso::format_double(lam) + "," + gso::format_double(err2) + "," +
             gso::format_double(2.0 * std::pow(lam, 4.0 / 3.0)) + "\n";
    }
    if (out_path.empty())
      std::cout << csv;
    else
      write_result_file(out_path, csv, prov);
    return kExitOk;
  }

  if (path_cmd->parsed()) {
    gso::Problem prob = load_problem(matrix_path, rhs_path, groups_path, p, q, 1.0);
    const gso::PathScore score = gso::solution_path_scores(prob, k_max);
    std::string csv = "group,score\n";
    for (std::size_t g = 0; g < score.scores.size(); ++g)
      csv += std::to_string(g) + "," + gso::format_double(score.scores[g]) + "\n";
    write_result_file(out_path, csv, prov);
    std::cout << csv;
    return kExitOk;
  }

  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gso::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gso::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const gso::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

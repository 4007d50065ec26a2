#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "speckle/conclab.hpp"
#include "speckle/errors.hpp"
#include "speckle/estimators.hpp"
#include "speckle/lowerbound.hpp"
#include "speckle/sweep.hpp"

using json = nlohmann::json;
using namespace speckle;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct InstanceArgs {
  int n = 16, m = 4, L = 8, k = 2;
  double sigma_z = 0.1, x_min = 0.5, x_max = 2.0;
  std::uint64_t seed = 1;
  bool shared = false;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& args) {
  cmd->add_option("--n", args.n, "signal length");
  cmd->add_option("--m", args.m, "measurements per look");
  cmd->add_option("--L", args.L, "number of looks");
  cmd->add_option("--k", args.k, "piece budget of the signal class");
  cmd->add_option("--sigma-z", args.sigma_z, "additive noise std");
  cmd->add_option("--x-min", args.x_min, "lower box bound");
  cmd->add_option("--x-max", args.x_max, "upper box bound");
  cmd->add_option("--seed", args.seed, "RNG seed");
  cmd->add_flag("--shared", args.shared, "use one operator for all looks");
}

json instance_to_json(const InstanceArgs& args, const Signal& truth,
                      const ModelInstance& inst, const ObservationSet& obs) {
  json j;
  j["n"] = args.n;
  j["m"] = args.m;
  j["L"] = args.L;
  j["k"] = args.k;
  j["sigma_z"] = args.sigma_z;
  j["x_min"] = args.x_min;
  j["x_max"] = args.x_max;
  j["seed"] = args.seed;
  j["shared_operators"] = args.shared;
  j["x_o"] = truth.values;
  json ops = json::array();
  for (const auto& a : inst.operators) {
    json rows = json::array();
    for (int i = 0; i < a.rows(); ++i) {
      json row = json::array();
      for (int c = 0; c < a.cols(); ++c) row.push_back(a(i, c));
      rows.push_back(row);
    }
    ops.push_back(rows);
  }
  j["operators"] = ops;
  json looks = json::array();
  for (const auto& y : obs.looks) {
    json v = json::array();
    for (int i = 0; i < y.size(); ++i) v.push_back(y(i));
    looks.push_back(v);
  }
  j["looks"] = looks;
  return j;
}

struct LoadedInstance {
  InstanceArgs args;
  Signal truth;
  ModelInstance instance;
  ObservationSet obs;
};

LoadedInstance make_instance(const InstanceArgs& args) {
  LoadedInstance out;
  out.args = args;
  RandomStream stream{args.seed, 0, 0, StreamRole::signal_levels};
  out.truth = sample_signal_class(stream, args.n, args.k, args.x_min, args.x_max);
  auto [inst, obs] =
      generate_instance(args.seed, args.m, args.n, args.L, args.sigma_z, out.truth,
                        args.shared);
  out.instance = std::move(inst);
  out.obs = std::move(obs);
  return out;
}

LoadedInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  json j = json::parse(in, nullptr, true, true);
  LoadedInstance out;
  out.args.n = j.at("n").get<int>();
  out.args.m = j.at("m").get<int>();
  out.args.L = j.at("L").get<int>();
  out.args.k = j.at("k").get<int>();
  out.args.sigma_z = j.at("sigma_z").get<double>();
  out.args.x_min = j.at("x_min").get<double>();
  out.args.x_max = j.at("x_max").get<double>();
  out.args.seed = j.at("seed").get<std::uint64_t>();
  out.args.shared = j.at("shared_operators").get<bool>();
  out.truth = Signal::unchecked(j.at("x_o").get<std::vector<double>>());
  out.truth.k_budget = out.args.k;

  out.instance.m = out.args.m;
  out.instance.n = out.args.n;
  out.instance.L = out.args.L;
  out.instance.sigma_z = out.args.sigma_z;
  out.instance.shared_operators = out.args.shared;
  out.instance.seed = out.args.seed;
  for (const auto& rows : j.at("operators")) {
    Eigen::MatrixXd a(out.args.m, out.args.n);
    for (int i = 0; i < out.args.m; ++i) {
      for (int c = 0; c < out.args.n; ++c) a(i, c) = rows.at(i).at(c).get<double>();
    }
    out.instance.operators.push_back(std::move(a));
  }
  for (const auto& vec : j.at("looks")) {
    Eigen::VectorXd y(out.args.m);
    for (int i = 0; i < out.args.m; ++i) y(i) = vec.at(i).get<double>();
    out.obs.looks.push_back(std::move(y));
  }
  if (static_cast<int>(out.instance.operators.size()) != out.args.L ||
      static_cast<int>(out.obs.looks.size()) != out.args.L) {
    throw ParseError("instance file '" + path + "' has inconsistent look count");
  }
  return out;
}

void print_signal(const char* label, const std::vector<double>& values) {
  std::printf("%s", label);
  for (double v : values) std::printf(" %.10g", v);
  std::printf("\n");
}

void print_warnings(const SweepConfig& config) {
  for (const auto& w : config.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int run_simulate(const InstanceArgs& args, const std::string& out_path) {
  LoadedInstance li = make_instance(args);
  json j = instance_to_json(args, li.truth, li.instance, li.obs);
  std::ofstream out(out_path);
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
    return kExitRuntime;
  }
  out << j.dump(2) << '\n';
  std::printf("wrote instance (n=%d, m=%d, L=%d, sigma_z=%g) to %s\n", args.n, args.m,
              args.L, args.sigma_z, out_path.c_str());
  return kExitOk;
}

int run_estimate(const LoadedInstance& li, const std::string& estimator,
                 const OptimizerConfig& cfg, int net_levels) {
  Signal estimate;
  if (estimator == "mle_ascent") {
    AscentReport report;
    estimate = mle_projected_ascent(li.instance, li.obs, li.args.k, li.args.x_min,
                                    li.args.x_max, cfg, nullptr, &report);
    std::printf("log_likelihood %.10g\nfinal_grad_norm %.4g\niterations %d\n",
                report.log_lik, report.final_grad_norm, report.iterations);
  } else if (estimator == "net_search") {
    NetSpec net = uniform_net(net_levels, li.args.x_min, li.args.x_max, li.args.k);
    estimate = mle_net_search(li.instance, li.obs, net);
    std::printf("log_likelihood %.10g\n", log_likelihood(estimate, li.instance, li.obs));
  } else if (estimator == "sufficient_statistic") {
    estimate = sufficient_statistic_estimate(li.instance, li.obs, li.args.k,
                                             li.args.x_min, li.args.x_max);
  } else {
    throw ValidationError("unknown estimator '" + estimator + "'");
  }
  print_signal("x_o  ", li.truth.values);
  print_signal("x_hat", estimate.values);
  std::printf("mse %.10g\n", mse(estimate, li.truth));
  return kExitOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& gnuplot_path) {
  SweepConfig config = parse_config(config_path);
  print_warnings(config);

  std::vector<TrialRecord> trial_log;
  std::vector<SweepRecord> records =
      run_sweep(config, config.trial_log.empty() ? nullptr : &trial_log);
  std::string csv = to_csv(records);
  std::ofstream out(config.output);
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", config.output.c_str());
    return kExitRuntime;
  }
  out << csv;
  out.close();
  std::printf("%zu cells -> %s\n", records.size(), config.output.c_str());

  if (!config.trial_log.empty()) {
    std::ofstream tlog(config.trial_log);
    tlog << "cell,trial,mse\n";
    for (const auto& t : trial_log) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", t.mse);
      tlog << t.cell << ',' << t.trial << ',' << buf << '\n';
    }
  }

  if (!gnuplot_path.empty()) {
    std::ofstream plot(gnuplot_path);
    plot << "set logscale xy\nset datafile separator ','\n"
         << "set xlabel 'L'\nset ylabel 'mean MSE'\n"
         << "plot '" << config.output
         << "' using 3:8 skip 1 with linespoints title 'mean mse'\n";
  }

  bool all_failed = !records.empty();
  for (const auto& r : records) {
    if (r.error.empty()) {
      all_failed = false;
    } else {
      std::fprintf(stderr, "cell (m=%d, n=%d, L=%d, sigma_z=%g, k=%d) failed: %s\n",
                   r.m, r.n, r.L, r.sigma_z, r.k, r.error.c_str());
    }
  }
  return all_failed ? kExitRuntime : kExitOk;
}

int run_fano(int n, int m, int L, double sigma_z, int k, int n_div, double epsilon,
             double c_delta, double delta_r, double x_min, double x_max,
             std::uint64_t seed) {
  if (n_div <= 0) n_div = default_n_div(n, k, epsilon);
  SeparatedSetSpec spec;
  if (delta_r > 0.0) {
    spec = make_separated_set_spec(n, k, n_div, epsilon, delta_r, x_min, x_max);
  } else {
    spec.n = n;
    spec.k = k;
    spec.n_div = n_div;
    spec.epsilon = epsilon;
    spec.delta_r = 0.0;  // filled from the formula inside the evaluation
    spec.x_min = x_min;
    spec.x_max = x_max;
    spec.x_bar = 0.5 * (x_min + x_max);
    spec.k_prime = std::max(1, k / 4);
  }
  LowerBoundOptions opts;
  opts.c_delta = c_delta;
  LowerBoundReport report = evaluate_instance_lower_bound(seed, m, n, L, sigma_z,
                                                          spec, opts);
  std::printf("n_div %d\nk_prime %d\nr %lld\nlog_r %.6g\ndelta_r %.6g%s\n"
              "alpha_r %.6g\nbeta_r %.6g\nbeta_within_log_r_over_10 %s\n"
              "mse_lower_bound %.6g\n",
              n_div, std::max(1, k / 4), report.r,
              std::log(static_cast<double>(report.r)), report.delta_r,
              report.delta_clamped ? " (clamped to the box)" : "", report.alpha_r,
              report.beta_r, report.beta_within_tenth_log_r ? "yes" : "no",
              report.bound);
  return kExitOk;
}

int run_verify(long trials, std::uint64_t seed) {
  using namespace speckle::conclab;
  int failures = 0;
  auto line = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    if (!ok) ++failures;
  };
  char buf[256];

  SingularValueTailReport sv =
      singular_value_tail_check(10, 100, {1.0, 2.0, 3.0, 5.0}, trials, seed);
  int sv_viol = sv.sigma_max.violations + (sv.sigma_min ? sv.sigma_min->violations : 0);
  std::snprintf(buf, sizeof buf, "tail violations: %d", sv_viol);
  line("singular-values", sv_viol == 0, buf);

  HansonWrightReport hw = hanson_wright_check(Eigen::MatrixXd::Identity(16, 16), trials,
                                              {4.0, 8.0, 16.0, 32.0}, seed + 1);
  double mean_tol = 4.0 * std::sqrt(hw.theoretical_variance / static_cast<double>(trials));
  bool hw_ok = std::abs(hw.sample_mean) <= mean_tol &&
               std::abs(hw.sample_variance / hw.theoretical_variance - 1.0) <= 0.25;
  std::snprintf(buf, sizeof buf, "mean %.4g (tol %.4g), var ratio %.3f", hw.sample_mean,
                mean_tol, hw.sample_variance / hw.theoretical_variance);
  line("hanson-wright", hw_ok, buf);

  DecouplingReport dc = decoupling_mean_check({1.0, 2.0, 0.0, -1.0}, 3, 5, trials,
                                              seed + 2);
  std::snprintf(buf, sizeof buf, "sample %.6g vs closed form %.6g (se %.3g)",
                dc.sample_mean, dc.closed_form_mean, dc.standard_error);
  line("decoupling-mean", dc.mean_within_4_se, buf);

  InverseDifferenceReport id = inverse_difference_bound_check(8, std::min(trials, 5000L),
                                                              seed + 3);
  std::snprintf(buf, sizeof buf, "violations: %d, max lhs/rhs %.4f", id.violations,
                id.max_ratio);
  line("inverse-difference", id.violations == 0, buf);

  Signal ones = make_signal(std::vector<double>(32, 1.0), 0.5, 2.0, 1);
  ObservationNormReport on = observation_norm_check(8, 32, 4, 0.1, ones, trials, seed + 4);
  std::snprintf(buf, sizeof buf, "exceed frequency %.4g (threshold %.4g)",
                on.exceed_frequency, on.threshold);
  line("observation-norm", on.exceed_frequency == 0.0, buf);

  return failures == 0 ? kExitOk : kExitRuntime;
}

int run_project(const std::string& in_path, int k, double x_min, double x_max,
                const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw ParseError("cannot open vector file '" + in_path + "'");
  std::vector<double> v;
  double value = 0.0;
  while (in >> value) v.push_back(value);
  if (v.empty()) throw ParseError("vector file '" + in_path + "' holds no numbers");

  Signal projected = project_piecewise_constant(v, k, x_min, x_max);
  double residual = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - projected.values[i];
    residual += d * d;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    for (double p : projected.values) out << std::to_string(p) << '\n';
  } else {
    print_signal("projected", projected.values);
  }
  std::printf("pieces %d\nresidual_sse %.10g\n", projected.piece_count(), residual);
  return kExitOk;
}

int run_compare(const std::string& config_path) {
  SweepConfig config = parse_config(config_path);
  print_warnings(config);
  ComparisonReport report = compare_varying_unvarying(config);
  std::printf("%8s %14s %12s %14s %12s\n", "L", "varying_mse", "ci", "unvarying_mse",
              "ci");
  for (const auto& row : report.rows) {
    if (!row.error.empty()) {
      std::printf("%8d failed: %s\n", row.L, row.error.c_str());
      continue;
    }
    std::printf("%8d %14.6g %12.4g %14.6g %12.4g\n", row.L, row.mse_varying,
                row.ci_varying, row.mse_shared, row.ci_shared);
  }
  if (report.plateau_L) {
    std::printf("unvarying improvement per doubling falls below half the varying "
                "improvement at L = %d\n", *report.plateau_L);
  } else {
    std::printf("no plateau detected on this L grid\n");
  }
  bool all_failed = !report.rows.empty();
  for (const auto& row : report.rows) {
    if (row.error.empty()) all_failed = false;
  }
  return all_failed ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilook speckle-noise estimation and minimax experiment harness"};
  app.require_subcommand(1);

  InstanceArgs sim_args;
  std::string sim_out = "instance.json";
  CLI::App* simulate = app.add_subcommand("simulate", "generate one instance to a file");
  add_instance_options(simulate, sim_args);
  simulate->add_option("--out", sim_out, "output JSON path");

  InstanceArgs est_args;
  std::string est_in, est_estimator = "mle_ascent";
  OptimizerConfig est_cfg;
  int est_net_levels = 33;
  CLI::App* estimate = app.add_subcommand("estimate", "estimate one instance");
  add_instance_options(estimate, est_args);
  estimate->add_option("--in", est_in, "instance JSON from `simulate` (overrides dims)");
  estimate->add_option("--estimator", est_estimator,
                       "mle_ascent | net_search | sufficient_statistic");
  estimate->add_option("--restarts", est_cfg.restarts, "ascent restarts");
  estimate->add_option("--max-iters", est_cfg.max_iters, "ascent iterations");
  estimate->add_option("--net-levels", est_net_levels,
                       "grid size for net_search (the practical net radius; the "
                       "theoretical x_max/n^5 radius is proof-only)");

  std::string sweep_config, sweep_gnuplot;
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep to CSV");
  sweep->add_option("--config", sweep_config, "config file")->required();
  sweep->add_option("--gnuplot", sweep_gnuplot, "also write a gnuplot script");

  int fano_n = 16, fano_m = 4, fano_L = 4, fano_k = 4, fano_ndiv = 0;
  double fano_sigma = 0.1, fano_eps = 0.5, fano_cdelta = 0.01, fano_delta = 0.0;
  double fano_xmin = 0.5, fano_xmax = 2.0;
  std::uint64_t fano_seed = 1;
  CLI::App* fano = app.add_subcommand("fano", "evaluate the minimax lower bound");
  fano->add_option("--n", fano_n);
  fano->add_option("--m", fano_m);
  fano->add_option("--L", fano_L);
  fano->add_option("--sigma-z", fano_sigma);
  fano->add_option("--k", fano_k);
  fano->add_option("--n-div", fano_ndiv, "interval count (default k * n^epsilon)");
  fano->add_option("--epsilon", fano_eps);
  fano->add_option("--c-delta", fano_cdelta, "constant in the delta_r formula");
  fano->add_option("--delta-r", fano_delta, "override delta_r (default: formula)");
  fano->add_option("--x-min", fano_xmin);
  fano->add_option("--x-max", fano_xmax);
  fano->add_option("--seed", fano_seed);

  long verify_trials = 10000;
  std::uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "run the concentration checks");
  verify->add_option("--trials", verify_trials);
  verify->add_option("--seed", verify_seed);

  std::string proj_in, proj_out;
  int proj_k = 2;
  double proj_xmin = 0.5, proj_xmax = 2.0;
  CLI::App* project = app.add_subcommand("project", "project a vector onto the class");
  project->add_option("--in", proj_in, "whitespace-separated vector file")->required();
  project->add_option("--k", proj_k);
  project->add_option("--x-min", proj_xmin);
  project->add_option("--x-max", proj_xmax);
  project->add_option("--out", proj_out, "write projected values here");

  std::string cmp_config;
  CLI::App* compare = app.add_subcommand("compare-shared",
                                         "varying vs unvarying operators over L");
  compare->add_option("--config", cmp_config, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim_args, sim_out);
    if (estimate->parsed()) {
      LoadedInstance li = est_in.empty() ? make_instance(est_args) : load_instance(est_in);
      return run_estimate(li, est_estimator, est_cfg, est_net_levels);
    }
    if (sweep->parsed()) return run_sweep_cmd(sweep_config, sweep_gnuplot);
    if (fano->parsed()) {
      return run_fano(fano_n, fano_m, fano_L, fano_sigma, fano_k, fano_ndiv, fano_eps,
                      fano_cdelta, fano_delta, fano_xmin, fano_xmax, fano_seed);
    }
    if (verify->parsed()) return run_verify(verify_trials, verify_seed);
    if (project->parsed()) return run_project(proj_in, proj_k, proj_xmin, proj_xmax, proj_out);
    if (compare->parsed()) return run_compare(cmp_config);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const InvalidDims& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", e.kind().c_str(), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "dashapp/errors.hpp"
#include "dashapp/experiment.hpp"
#include "dashapp/verification.hpp"

namespace {

using dashapp::ExperimentConfig;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--output-dir", opts.output_dir,
                  "output directory (default: config value, then "
                  "$DASHAPP_OUTPUT_DIR, then '.')");
  cmd->add_option("-s,--seed", opts.seed,
                  "replace the config's seed list with this single seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

ExperimentConfig load_config(const CommonOpts& opts) {
  ExperimentConfig c = dashapp::parse_experiment_config_file(opts.config_path);
  if (opts.seed_set) c.seeds = {opts.seed};
  return c;
}

int report_experiment(const dashapp::ExperimentResult& res) {
  std::cout << "gamma = " << dashapp::format_double(res.gamma) << "\n";
  std::cout << "final f (seed mean) = "
            << dashapp::format_double(res.final_f_mean) << "\n";
  std::cout << "final ||grad f||^2 (seed mean) = "
            << dashapp::format_double(res.final_grad_norm_sq_mean) << "\n";
  if (res.rounds_to_eps) {
    std::cout << "rounds to epsilon = " << *res.rounds_to_eps << "\n";
  }
  int diverged = 0;
  for (const auto& r : res.runs) diverged += r.diverged ? 1 : 0;
  if (diverged > 0) {
    std::cout << diverged << " of " << res.runs.size()
              << " seeds diverged\n";
  }
  std::cout << "summary: " << res.summary_path << "\n";
  return diverged == static_cast<int>(res.runs.size()) ? 1 : 0;
}

int cmd_run(const CommonOpts& opts) {
  const auto res = dashapp::run_experiment(load_config(opts), opts.output_dir);
  return report_experiment(res);
}

int cmd_tune(const CommonOpts& opts) {
  ExperimentConfig c = load_config(opts);
  c.gamma_source = dashapp::GammaSource::Grid;
  const auto res = dashapp::run_experiment(c, opts.output_dir);
  if (res.tune) {
    std::cout << "grid scores (gamma -> seed-mean final ||grad f||^2):\n";
    for (std::size_t i = 0; i < res.tune->candidates.size(); ++i) {
      std::cout << "  " << dashapp::format_double(res.tune->candidates[i])
                << " -> ";
      if (std::isfinite(res.tune->scores[i])) {
        std::cout << dashapp::format_double(res.tune->scores[i]) << "\n";
      } else {
        std::cout << "diverged\n";
      }
    }
  }
  return report_experiment(res);
}

int cmd_params(const CommonOpts& opts, const std::string& variant_override,
               double mu, bool mu_set) {
  ExperimentConfig c = dashapp::parse_experiment_config_file(opts.config_path);
  if (!variant_override.empty()) {
    c.variant = dashapp::variant_from_name(variant_override);
  }
  const dashapp::Problem pr = dashapp::build_problem(c);
  const auto scheme = dashapp::build_scheme(c);
  const auto comps = dashapp::build_compressors(c, pr.dim());
  dashapp::TheoryInputs in =
      dashapp::build_theory_inputs(c, pr, scheme, comps[0]);
  if (mu_set) in.mu = mu;
  const dashapp::TheoryParams tp = dashapp::compute_params(c, in);

  json out;
  out["variant"] = dashapp::variant_name(c.variant);
  out["inputs"] = {{"omega", in.omega},     {"n", in.n},
                   {"p_a", in.p_a},         {"p_aa", in.p_aa},
                   {"L", in.L},             {"L_hat", in.L_hat},
                   {"L_max", in.L_max},     {"L_sigma", in.L_sigma},
                   {"sigma_sq", in.sigma_sq}, {"m", in.m},
                   {"B", in.B},             {"epsilon", in.epsilon},
                   {"d", in.d},             {"zeta_C", in.zeta_C}};
  json params;
  params["a"] = tp.a;
  params["b"] = tp.b;
  params["gamma_max"] = tp.gamma_max;
  if (tp.p_page) params["p_page"] = *tp.p_page;
  if (tp.p_mega) params["p_mega"] = *tp.p_mega;
  if (tp.B_init) params["B_init"] = *tp.B_init;
  if (tp.B_prime) params["B_prime"] = *tp.B_prime;
  if (tp.T_bound) params["T_bound"] = *tp.T_bound;
  params["notes"] = tp.notes;
  out["params"] = params;

  if (mu_set) {
    try {
      const auto pl = dashapp::params_pl(in, c.variant);
      json jpl;
      jpl["a"] = pl.a;
      jpl["b"] = pl.b;
      jpl["gamma_max"] = pl.gamma_max;
      if (pl.p_page) jpl["p_page"] = *pl.p_page;
      if (pl.p_mega) jpl["p_mega"] = *pl.p_mega;
      if (pl.rate_factor) jpl["rate_factor"] = *pl.rate_factor;
      if (pl.T_bound) jpl["T_bound"] = *pl.T_bound;
      jpl["notes"] = pl.notes;
      out["pl_params"] = jpl;
    } catch (const dashapp::InvalidArgumentError& e) {
      out["pl_params"] = nullptr;
      out["pl_error"] = e.what();
    }
  }

  if (c.compressor == dashapp::Compressor::Kind::RandK &&
      (c.variant == dashapp::Variant::Page ||
       c.variant == dashapp::Variant::Mvr)) {
    const auto cx = dashapp::complexity_randk(in, c.variant);
    out["complexity"] = {{"comm", cx.comm_complexity},
                         {"oracle", cx.oracle_complexity},
                         {"K", cx.K},
                         {"B_cap", cx.B_cap}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed) {
  const auto results = dashapp::verify_standard_battery(seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  "
              << "max |lhs - rhs| = " << dashapp::format_double(r.abs_diff)
              << "  " << r.name << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_data_stats(const std::string& path) {
  const dashapp::Dataset ds = dashapp::parse_libsvm_file(path);
  int pos = 0;
  int neg = 0;
  for (double y : ds.labels) (y > 0 ? pos : neg) += 1;
  json out;
  out["file"] = path;
  out["samples"] = ds.num_samples();
  out["features"] = ds.d;
  out["nnz"] = ds.nnz();
  out["density"] = ds.density();
  out["labels"] = {{"+1", pos}, {"-1", neg}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "simulator for distributed nonconvex optimization with compressed "
      "communication, variance reduction, and partial participation"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  auto* run_cmd = app.add_subcommand(
      "run", "run the configured experiment; writes per-seed CSVs and "
             "summary.json");
  add_common(run_cmd, run_opts);

  CommonOpts tune_opts;
  auto* tune_cmd = app.add_subcommand(
      "tune", "grid-search the step size over {2^i}, then run the winner");
  add_common(tune_cmd, tune_opts);

  CommonOpts params_opts;
  std::string params_variant;
  double params_mu = 0.0;
  bool params_mu_set = false;
  auto* params_cmd = app.add_subcommand(
      "params", "print the theory-prescribed parameters for the config");
  params_cmd
      ->add_option("-c,--config", params_opts.config_path,
                   "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  params_cmd->add_option("--variant", params_variant,
                         "override the config's variant name");
  params_cmd
      ->add_option("--mu", params_mu,
                   "gradient-dominance constant; adds the linear-rate "
                   "parameter block")
      ->each([&params_mu_set](const std::string&) { params_mu_set = true; });

  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand(
      "verify", "run the exact-enumeration verification battery");
  verify_cmd->add_option("-s,--seed", verify_seed, "battery seed");

  auto* data_cmd = app.add_subcommand("data", "dataset utilities");
  std::string stats_path;
  auto* stats_cmd =
      data_cmd->add_subcommand("stats", "print dataset statistics as JSON");
  stats_cmd->add_option("input", stats_path, "dataset file (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  data_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*tune_cmd) return cmd_tune(tune_opts);
    if (*params_cmd) {
      return cmd_params(params_opts, params_variant, params_mu, params_mu_set);
    }
    if (*verify_cmd) return cmd_verify(verify_seed);
    if (*stats_cmd) return cmd_data_stats(stats_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "dashapp/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "dashapp/errors.hpp"

namespace dashapp {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string run_csv_name(double gamma, std::uint64_t seed) {
  return "run_g" + format_double(gamma) + "_s" + std::to_string(seed) + ".csv";
}

std::string resolve_output_dir(const ExperimentConfig& c,
                               const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("DASHAPP_OUTPUT_DIR")) {
    if (*env) return env;
  }
  return ".";
}

json theory_to_json(const TheoryParams& tp) {
  json j;
  j["a"] = tp.a;
  j["b"] = tp.b;
  j["gamma_max"] = tp.gamma_max;
  if (tp.p_page) j["p_page"] = *tp.p_page;
  if (tp.p_mega) j["p_mega"] = *tp.p_mega;
  if (tp.B_init) j["B_init"] = *tp.B_init;
  if (tp.B_prime) j["B_prime"] = *tp.B_prime;
  if (tp.T_bound) j["T_bound"] = *tp.T_bound;
  if (tp.rate_factor) j["rate_factor"] = *tp.rate_factor;
  j["notes"] = tp.notes;
  return j;
}

json inputs_to_json(const TheoryInputs& in) {
  json j;
  j["omega"] = in.omega;
  j["n"] = in.n;
  j["p_a"] = in.p_a;
  j["p_aa"] = in.p_aa;
  j["L"] = in.L;
  j["L_hat"] = in.L_hat;
  j["L_max"] = in.L_max;
  j["L_sigma"] = in.L_sigma;
  j["sigma_sq"] = in.sigma_sq;
  j["m"] = in.m;
  j["B"] = in.B;
  j["epsilon"] = in.epsilon;
  j["d"] = in.d;
  j["zeta_C"] = in.zeta_C;
  return j;
}

// Seed-mean grad_norm_sq curve over the non-diverged runs; empty when all
// runs diverged or horizons are inconsistent.
std::vector<RoundRow> mean_rows(const std::vector<RunOutput>& runs) {
  std::vector<RoundRow> out;
  int live = 0;
  for (const auto& r : runs) {
    if (r.diverged) continue;
    if (out.empty()) {
      out = r.record.rounds;
      live = 1;
      continue;
    }
    if (r.record.rounds.size() != out.size()) return {};
    for (std::size_t t = 0; t < out.size(); ++t) {
      out[t].f += r.record.rounds[t].f;
      out[t].grad_norm_sq += r.record.rounds[t].grad_norm_sq;
    }
    ++live;
  }
  if (live == 0) return {};
  for (auto& row : out) {
    row.f /= live;
    row.grad_norm_sq /= live;
  }
  return out;
}

}  // namespace

Problem build_problem(const ExperimentConfig& c) {
  Dataset ds = c.dataset_path.empty()
                   ? make_synthetic_dataset(c.synthetic, c.data_seed)
                   : parse_libsvm_file(c.dataset_path);
  Rng shard = stream_rng(c.data_seed, "shard");
  auto shards = split_equal(ds, c.n, shard);
  return Problem(c.loss, std::move(ds), std::move(shards), c.lambda,
                 c.noise_sigma);
}

ParticipationScheme build_scheme(const ExperimentConfig& c) {
  switch (c.scheme) {
    case ParticipationScheme::Kind::Full:
      return ParticipationScheme::full(c.n);
    case ParticipationScheme::Kind::SNice:
      return ParticipationScheme::s_nice(c.n, c.s);
    case ParticipationScheme::Kind::Independent:
      return ParticipationScheme::independent(c.n, c.p);
  }
  throw InvalidArgumentError("build_scheme: unknown scheme");
}

std::vector<Compressor> build_compressors(const ExperimentConfig& c, int dim) {
  std::vector<Compressor> out;
  out.reserve(c.n);
  for (int i = 0; i < c.n; ++i) {
    out.push_back(c.compressor == Compressor::Kind::Identity
                      ? Compressor::identity(dim)
                      : Compressor::rand_k(dim, c.K));
  }
  return out;
}

TheoryInputs build_theory_inputs(const ExperimentConfig& c, const Problem& pr,
                                 const ParticipationScheme& scheme,
                                 const Compressor& comp) {
  const SmoothnessEstimates sm = pr.estimate_smoothness();
  TheoryInputs in;
  in.omega = comp.omega();
  in.n = c.n;
  in.p_a = scheme.p_a();
  in.p_aa = scheme.p_aa();
  in.L = sm.L;
  in.L_hat = sm.L_hat;
  in.L_max = sm.L_max;
  in.L_sigma = sm.L_sigma;
  in.sigma_sq = pr.sigma_sq_bound();
  in.m = pr.m();
  in.B = c.B;
  in.epsilon = c.epsilon;
  in.d = pr.dim();
  in.zeta_C = comp.expected_density();
  return in;
}

TheoryParams compute_params(const ExperimentConfig& c, const TheoryInputs& in) {
  switch (c.variant) {
    case Variant::Gradient:
      return params_gradient(in);
    case Variant::Page:
      return params_page(in, c.p_page);
    case Variant::FiniteMvr:
      return params_finite_mvr(in);
    case Variant::Mvr:
      return params_mvr(in);
    case Variant::SyncMvr:
      return params_sync_mvr(in, c.p_mega);
  }
  throw InvalidArgumentError("compute_params: unknown variant");
}

VariantConfig build_variant_config(const ExperimentConfig& c,
                                   const TheoryParams& tp) {
  VariantConfig vc = VariantConfig::from_theory(c.variant, tp, c.B);
  if (c.B_prime > 0) vc.B_prime = c.B_prime;
  if (c.B_init > 0) vc.B_init = c.B_init;
  return vc;
}

RunOutput execute_run(const Problem& pr, const ParticipationScheme& scheme,
                      const std::vector<Compressor>& comps,
                      const VariantConfig& vc, std::uint64_t seed, int T) {
  RunOutput out;
  out.seed = seed;
  out.gamma = vc.gamma;
  Engine engine(pr, comps, scheme, vc, seed,
                Eigen::VectorXd::Zero(pr.dim()));
  try {
    out.record = engine.run(T);
    if (!std::isfinite(out.record.grad_norm_sq_final) ||
        !std::isfinite(out.record.f_final)) {
      out.diverged = true;
      out.diverged_round = T;
    }
  } catch (const DivergenceError& e) {
    out.diverged = true;
    out.diverged_round = e.round();
    out.record = RunRecord{};
  }
  return out;
}

std::optional<int> rounds_to_threshold(const std::vector<RoundRow>& rows,
                                       double tau) {
  for (const auto& row : rows) {
    if (row.grad_norm_sq <= tau) return row.t;
  }
  return std::nullopt;
}

TuneResult tune_gamma(const Problem& pr, const ParticipationScheme& scheme,
                      const std::vector<Compressor>& comps, VariantConfig vc,
                      const std::vector<std::uint64_t>& seeds, int T,
                      int i_min, int i_max, const std::string& csv_dir) {
  if (seeds.empty()) throw InvalidArgumentError("tune_gamma: no seeds");
  if (i_min > i_max) throw InvalidArgumentError("tune_gamma: empty grid");
  TuneResult res;
  double best = std::numeric_limits<double>::infinity();
  for (int i = i_min; i <= i_max; ++i) {
    const double gamma = std::ldexp(1.0, i);
    vc.gamma = gamma;
    double acc = 0.0;
    bool ok = true;
    for (std::uint64_t seed : seeds) {
      const RunOutput out = execute_run(pr, scheme, comps, vc, seed, T);
      if (out.diverged) {
        ok = false;
        break;
      }
      if (!csv_dir.empty()) {
        write_csv(csv_dir + "/" + run_csv_name(gamma, seed),
                  out.record.rounds, scheme.n());
      }
      acc += out.record.grad_norm_sq_final;
    }
    const double score = ok ? acc / static_cast<double>(seeds.size()) : kNan;
    res.candidates.push_back(gamma);
    res.scores.push_back(score);
    if (ok && score < best) {
      best = score;
      res.gamma = gamma;
    }
  }
  if (!std::isfinite(best)) {
    throw DivergenceError(T, "every step-size candidate diverged");
  }
  return res;
}

void write_csv(const std::string& path, const std::vector<RoundRow>& rows,
               int n) {
  std::ofstream out(path);
  if (!out) throw InvalidArgumentError("cannot open for writing: " + path);
  out << "t,f,grad_norm_sq,coords_sent_cum,participants\n";
  for (const auto& row : rows) {
    out << row.t << ',' << format_double(row.f) << ','
        << format_double(row.grad_norm_sq) << ','
        << format_double(static_cast<double>(row.coords_sent_cum) / n) << ','
        << row.participants << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& c,
                                const std::string& output_dir_override) {
  const std::string dir = resolve_output_dir(c, output_dir_override);
  std::filesystem::create_directories(dir);

  const Problem pr = build_problem(c);
  const ParticipationScheme scheme = build_scheme(c);
  const auto comps = build_compressors(c, pr.dim());

  ExperimentResult res;
  res.inputs = build_theory_inputs(c, pr, scheme, comps[0]);
  res.theory = compute_params(c, res.inputs);
  VariantConfig vc = build_variant_config(c, res.theory);

  switch (c.gamma_source) {
    case GammaSource::Theory:
      vc.gamma = res.theory.gamma_max;
      break;
    case GammaSource::Fixed:
      vc.gamma = c.gamma_fixed;
      break;
    case GammaSource::Grid:
      res.tune = tune_gamma(pr, scheme, comps, vc, c.seeds, c.T,
                            c.grid_i_min, c.grid_i_max, dir);
      vc.gamma = res.tune->gamma;
      break;
  }
  res.gamma = vc.gamma;

  double f_acc = 0.0;
  double g_acc = 0.0;
  int live = 0;
  for (std::uint64_t seed : c.seeds) {
    RunOutput out = execute_run(pr, scheme, comps, vc, seed, c.T);
    if (!out.diverged) {
      const std::string path = dir + "/" + run_csv_name(vc.gamma, seed);
      write_csv(path, out.record.rounds, c.n);
      res.csv_paths.push_back(path);
      f_acc += out.record.f_final;
      g_acc += out.record.grad_norm_sq_final;
      ++live;
    }
    res.runs.push_back(std::move(out));
  }
  res.final_f_mean = live > 0 ? f_acc / live : kNan;
  res.final_grad_norm_sq_mean = live > 0 ? g_acc / live : kNan;
  res.rounds_to_eps = rounds_to_threshold(mean_rows(res.runs), c.epsilon);

  json summary;
  summary["variant"] = variant_name(c.variant);
  summary["gamma_source"] = gamma_source_name(c.gamma_source);
  summary["gamma"] = res.gamma;
  summary["T"] = c.T;
  summary["seeds"] = c.seeds;
  summary["epsilon"] = c.epsilon;
  summary["inputs"] = inputs_to_json(res.inputs);
  summary["theory"] = theory_to_json(res.theory);
  summary["final_f_mean"] = res.final_f_mean;
  summary["final_grad_norm_sq_mean"] = res.final_grad_norm_sq_mean;
  if (res.rounds_to_eps) {
    summary["rounds_to_threshold"] = *res.rounds_to_eps;
  } else {
    summary["rounds_to_threshold"] = nullptr;
  }
  json seed_rows = json::array();
  for (const auto& r : res.runs) {
    json row;
    row["seed"] = r.seed;
    row["diverged"] = r.diverged;
    if (r.diverged) {
      row["diverged_round"] = r.diverged_round;
    } else {
      row["f_final"] = r.record.f_final;
      row["grad_norm_sq_final"] = r.record.grad_norm_sq_final;
      row["coords_sent_total"] =
          r.record.rounds.empty() ? 0
                                  : r.record.rounds.back().coords_sent_cum;
    }
    seed_rows.push_back(row);
  }
  summary["runs"] = seed_rows;
  if (res.tune) {
    json t;
    t["candidates"] = res.tune->candidates;
    json scores = json::array();
    for (double s : res.tune->scores) {
      if (std::isfinite(s)) {
        scores.push_back(s);
      } else {
        scores.push_back(nullptr);  // excluded (diverged) candidate
      }
    }
    t["scores"] = scores;
    t["gamma"] = res.tune->gamma;
    summary["tune"] = t;
  }
  summary["csv_files"] = res.csv_paths;

  res.summary_path = dir + "/summary.json";
  std::ofstream out(res.summary_path);
  if (!out) {
    throw InvalidArgumentError("cannot open for writing: " + res.summary_path);
  }
  out << summary.dump(2) << '\n';
  return res;
}

SlowdownResult slowdown_experiment(const ExperimentConfig& base,
                                   const std::vector<int>& s_values,
                                   double tau_rel, int T_baseline) {
  if (s_values.empty()) {
    throw InvalidArgumentError("slowdown_experiment: no s values");
  }
  if (!(tau_rel > 0.0) || T_baseline < 1) {
    throw InvalidArgumentError("slowdown_experiment: bad tau_rel or horizon");
  }
  const Problem pr = build_problem(base);
  const auto comps = build_compressors(base, pr.dim());

  SlowdownResult res;
  res.tau =
      tau_rel * pr.grad(Eigen::VectorXd::Zero(pr.dim())).squaredNorm();

  auto run_setting = [&](int s) {
    if (s < 1 || s > base.n) {
      throw InvalidArgumentError("slowdown_experiment: s out of range");
    }
    ExperimentConfig c = base;
    c.scheme = ParticipationScheme::Kind::SNice;
    c.s = s;
    const ParticipationScheme scheme = build_scheme(c);
    const TheoryInputs in = build_theory_inputs(c, pr, scheme, comps[0]);
    VariantConfig vc = build_variant_config(c, compute_params(c, in));
    SlowdownSetting setting;
    setting.s = s;
    setting.T = static_cast<int>(
        std::ceil(static_cast<double>(T_baseline) * base.n / s));
    const TuneResult tuned =
        tune_gamma(pr, scheme, comps, vc, base.seeds, setting.T,
                   base.grid_i_min, base.grid_i_max);
    setting.gamma = tuned.gamma;
    vc.gamma = tuned.gamma;
    std::vector<RunOutput> runs;
    for (std::uint64_t seed : base.seeds) {
      runs.push_back(execute_run(pr, scheme, comps, vc, seed, setting.T));
    }
    setting.rounds = rounds_to_threshold(mean_rows(runs), res.tau);
    return setting;
  };

  const SlowdownSetting baseline = run_setting(base.n);
  for (int s : s_values) {
    const SlowdownSetting setting =
        s == base.n ? baseline : run_setting(s);
    double ratio = kNan;
    if (setting.rounds && baseline.rounds && *baseline.rounds > 0) {
      ratio = static_cast<double>(*setting.rounds) / *baseline.rounds;
    } else if (setting.rounds && baseline.rounds && *baseline.rounds == 0) {
      ratio = *setting.rounds == 0 ? 1.0 : kNan;
    }
    res.settings.push_back(setting);
    res.ratios.push_back(ratio);
  }
  return res;
}

}  // namespace dashapp

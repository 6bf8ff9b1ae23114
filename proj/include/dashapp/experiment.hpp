#ifndef DASHAPP_EXPERIMENT_HPP
#define DASHAPP_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "dashapp/config.hpp"
#include "dashapp/optimizer.hpp"

namespace dashapp {

// Builders shared by the CLI and the test suite.  build_problem reads the
// configured dataset (or synthesizes one) and shards it across n nodes with
// the data_seed-keyed stream, so the same config always yields the same
// problem instance.
Problem build_problem(const ExperimentConfig& c);
ParticipationScheme build_scheme(const ExperimentConfig& c);
std::vector<Compressor> build_compressors(const ExperimentConfig& c, int dim);
TheoryInputs build_theory_inputs(const ExperimentConfig& c, const Problem& pr,
                                 const ParticipationScheme& scheme,
                                 const Compressor& comp);
// Dispatches to the variant's parameter calculator, honoring the config's
// p_page / p_mega overrides.
TheoryParams compute_params(const ExperimentConfig& c, const TheoryInputs& in);
VariantConfig build_variant_config(const ExperimentConfig& c,
                                   const TheoryParams& tp);

struct RunOutput {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  bool diverged = false;
  int diverged_round = -1;
  RunRecord record;  // empty when the run diverged
};

// run() wrapped so that numeric blow-ups become data instead of exceptions.
RunOutput execute_run(const Problem& pr, const ParticipationScheme& scheme,
                      const std::vector<Compressor>& comps,
                      const VariantConfig& vc, std::uint64_t seed, int T);

// First round index with grad_norm_sq <= tau, if any.
std::optional<int> rounds_to_threshold(const std::vector<RoundRow>& rows,
                                       double tau);

struct TuneResult {
  double gamma = 0.0;              // the winning candidate
  std::vector<double> candidates;  // 2^i for i in [i_min, i_max]
  std::vector<double> scores;      // seed-mean final grad_norm_sq; NaN = excluded
};

// Step-size grid search.  A candidate is excluded as soon as one seed
// diverges; the winner minimizes the seed-averaged final squared gradient
// norm.  Every candidate excluded -> DivergenceError.  When csv_dir is
// nonempty each completed run is written there as a CSV.
TuneResult tune_gamma(const Problem& pr, const ParticipationScheme& scheme,
                      const std::vector<Compressor>& comps, VariantConfig vc,
                      const std::vector<std::uint64_t>& seeds, int T,
                      int i_min, int i_max, const std::string& csv_dir = "");

struct ExperimentResult {
  TheoryInputs inputs;
  TheoryParams theory;
  double gamma = 0.0;
  std::vector<RunOutput> runs;  // chosen gamma, aligned with the seed list
  std::optional<TuneResult> tune;
  double final_f_mean = 0.0;             // over non-diverged seeds
  double final_grad_norm_sq_mean = 0.0;  // likewise
  std::optional<int> rounds_to_eps;  // seed-mean curve vs config epsilon
  std::vector<std::string> csv_paths;
  std::string summary_path;
};

// The full pipeline: build, (optionally) tune, run every seed, write one CSV
// per (gamma, seed) and a summary.json.  Output directory resolution:
// override argument, else config output_dir, else $DASHAPP_OUTPUT_DIR,
// else ".".
ExperimentResult run_experiment(const ExperimentConfig& c,
                                const std::string& output_dir_override = "");

// Header "t,f,grad_norm_sq,coords_sent_cum,participants"; coordinates are
// reported cumulatively per node (total over nodes divided by n).
void write_csv(const std::string& path, const std::vector<RoundRow>& rows,
               int n);

struct SlowdownSetting {
  int s = 0;
  double gamma = 0.0;           // grid-tuned for this s
  int T = 0;                    // horizon used (scaled by n/s)
  std::optional<int> rounds;    // hitting time of tau on the seed-mean curve
};

struct SlowdownResult {
  double tau = 0.0;
  std::vector<SlowdownSetting> settings;  // aligned with s_values
  std::vector<double> ratios;             // rounds(s) / rounds(s = n)
};

// How much does participation s slow convergence?  Runs the base config's
// problem/variant/compressor under s-of-n sampling for each requested s,
// tunes gamma per setting at horizon ceil(T_baseline * n / s), and compares
// hitting times of tau = tau_rel * ||grad f(x^0)||^2 against the full,
// participation baseline s = n (computed whether or not n is listed).
SlowdownResult slowdown_experiment(const ExperimentConfig& base,
                                   const std::vector<int>& s_values,
                                   double tau_rel, int T_baseline);

}  // namespace dashapp

#endif

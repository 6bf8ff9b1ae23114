#ifndef DASHAPP_CONFIG_HPP
#define DASHAPP_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dashapp/compressors.hpp"
#include "dashapp/participation.hpp"
#include "dashapp/problems.hpp"
#include "dashapp/synthetic.hpp"
#include "dashapp/theory.hpp"

namespace dashapp {

enum class GammaSource { Theory, Grid, Fixed };

/*
    One experiment = problem + participation + compressor + variant + run
    controls.  Parsed from a flat sectioned key = value file; the full schema
    with defaults is documented in the README and mirrored by the parser's
    error messages.  B_prime / B_init of 0 mean "use the calculator's value".
*/
struct ExperimentConfig {
  // [problem]
  std::string dataset_path;  // empty -> synthetic generator
  SyntheticSpec synthetic;
  std::uint64_t data_seed = 1;
  Loss loss = Loss::SquaredSigmoid;
  double lambda = 1e-3;
  double noise_sigma = 0.0;
  int n = 3;  // nodes

  // [participation]
  ParticipationScheme::Kind scheme = ParticipationScheme::Kind::Full;
  int s = 0;  // 0 -> n
  double p = 1.0;

  // [compressor]
  Compressor::Kind compressor = Compressor::Kind::Identity;
  int K = 1;

  // [variant]
  Variant variant = Variant::Gradient;
  int B = 1;
  int B_prime = 0;
  int B_init = 0;
  std::optional<double> p_page;
  std::optional<double> p_mega;

  // [run]
  int T = 200;
  std::vector<std::uint64_t> seeds = {1};
  GammaSource gamma_source = GammaSource::Theory;
  double gamma_fixed = 0.0;
  int grid_i_min = -10;
  int grid_i_max = 10;
  double epsilon = 1e-4;
  std::string output_dir;  // empty -> $DASHAPP_OUTPUT_DIR -> "."
};

// Strict parser: unknown sections/keys, bad numbers, and violated invariants
// are ParseError with the 1-based line number.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);

const char* gamma_source_name(GammaSource g);

}  // namespace dashapp

#endif

#include "dashapp/synthetic.hpp"

#include <vector>

#include "dashapp/errors.hpp"
#include "dashapp/rng.hpp"

namespace dashapp {

Dataset make_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n < 1 || spec.m < 1 || spec.d < 1) {
    throw InvalidArgumentError("make_synthetic_dataset: n, m, d must be >= 1");
  }
  if (!(spec.density > 0.0) || spec.density > 1.0) {
    throw InvalidArgumentError("make_synthetic_dataset: density must be in (0, 1]");
  }
  if (spec.flip_prob < 0.0 || spec.flip_prob > 1.0) {
    throw InvalidArgumentError("make_synthetic_dataset: flip_prob must be in [0, 1]");
  }

  Rng feat = stream_rng(seed, "synthetic-features");
  Rng plant = stream_rng(seed, "synthetic-plant");

  std::vector<double> w(spec.d);
  for (int c = 0; c < spec.d; ++c) w[c] = plant.gaussian();

  Dataset ds;
  ds.d = spec.d;
  const int total = spec.n * spec.m;
  ds.labels.reserve(total);
  for (int s = 0; s < total; ++s) {
    double margin = 0.0;
    const std::size_t row_start = ds.col_index.size();
    for (int c = 0; c < spec.d; ++c) {
      if (feat.bernoulli(spec.density)) {
        const double v = feat.gaussian();
        ds.col_index.push_back(c);
        ds.value.push_back(v);
        margin += v * w[c];
      }
    }
    if (ds.col_index.size() == row_start) {
      const int c = static_cast<int>(feat.uniform_index(spec.d));
      const double v = feat.gaussian();
      ds.col_index.push_back(c);
      ds.value.push_back(v);
      margin += v * w[c];
    }
    ds.row_ptr.push_back(static_cast<int>(ds.col_index.size()));
    double label = margin >= 0.0 ? 1.0 : -1.0;
    if (plant.bernoulli(spec.flip_prob)) label = -label;
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace dashapp

#ifndef DASHAPP_SYNTHETIC_HPP
#define DASHAPP_SYNTHETIC_HPP

#include <cstdint>

#include "dashapp/dataset.hpp"

namespace dashapp {

// Desk-scale classification fixtures: features are i.i.d. sparse Gaussian
// (each coordinate present with probability `density`), labels come from a
// planted Gaussian linear rule with a fraction `flip_prob` of them flipped.
// Rows are never empty: a sample that draws no coordinates gets one forced.
struct SyntheticSpec {
  int n = 3;             // nodes
  int m = 8;             // samples per node
  int d = 10;            // feature dimension
  double density = 0.4;  // expected fraction of nonzero features
  double flip_prob = 0.1;
};

// n*m samples, deterministic in (spec, seed).
Dataset make_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace dashapp

#endif

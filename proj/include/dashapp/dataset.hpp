#ifndef DASHAPP_DATASET_HPP
#define DASHAPP_DATASET_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "dashapp/rng.hpp"

namespace dashapp {

// Sparse sample matrix in CSR layout plus labels normalized to {-1, +1}.
struct Dataset {
  int d = 0;
  std::vector<int> row_ptr = {0};  // length num_samples() + 1
  std::vector<int> col_index;      // 0-based, strictly increasing per row
  std::vector<double> value;
  std::vector<double> labels;

  int num_samples() const { return static_cast<int>(labels.size()); }
  std::size_t nnz() const { return value.size(); }
  double density() const;

  // Dot product of sample row s with x[0..d).
  double row_dot(int s, const double* x) const;
};

/*
    LIBSVM text format: one sample per line,

        label idx:val idx:val ...

    with 1-based, strictly increasing indices.  Violations are reported with
    the 1-based line number: bad numbers or missing ':' as malformed tokens,
    repeated or decreasing indices as non-monotone, a stream with no samples
    as empty input.

    Raw labels are normalized in a second pass: the label set {1, 2} maps to
    {-1, +1}; anything else maps by sign (> 0 to +1, else -1).

    d = max(max index seen, d_hint).
*/
Dataset parse_libsvm(std::istream& in, int d_hint = 0);
Dataset parse_libsvm_file(const std::string& path, int d_hint = 0);

// Canonical text form: "label idx:val" fields joined by single spaces, one
// trailing newline per sample, numbers in shortest round-trip decimal form.
std::string serialize_libsvm(const Dataset& dataset);

// parse + serialize: idempotent, and the identity on canonical-form text.
std::string canonicalize_libsvm(const std::string& text, int d_hint = 0);

void write_libsvm_file(const Dataset& dataset, const std::string& path);

// A node's slice of the dataset.
struct NodeShard {
  int node_id = 0;
  std::vector<int> sample_indices;

  int m() const { return static_cast<int>(sample_indices.size()); }
};

// Shuffles sample indices and cuts the permutation into n shards of
// floor(num_samples / n); the residual samples are dropped.
std::vector<NodeShard> split_equal(const Dataset& dataset, int n, Rng& rng);

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

}  // namespace dashapp

#endif

#ifndef DASHAPP_COMPRESSORS_HPP
#define DASHAPP_COMPRESSORS_HPP

#include <Eigen/Core>
#include <vector>

#include "dashapp/rng.hpp"

namespace dashapp {

// A compressed message: the surviving coordinates of a d-vector as
// (index, value) pairs.  Communication cost is the number of stored pairs.
struct CompressedMessage {
  int dim = 0;
  std::vector<int> index;
  std::vector<double> value;

  std::size_t coords_sent() const { return index.size(); }
  Eigen::VectorXd to_dense() const;
  // dst += this
  void add_to(Eigen::Ref<Eigen::VectorXd> dst) const;
  // dst += scale * this
  void add_scaled_to(Eigen::Ref<Eigen::VectorXd> dst, double scale) const;
};

/*
    Unbiased compression operators.

    Identity keeps the vector as is (variance parameter 0, density d).
    RandK keeps K coordinates chosen uniformly without replacement and
    rescales them by d/K, which preserves the mean and has relative
    second-moment parameter d/K - 1.

    A Compressor is an immutable spec; each compress() call takes its own
    stream, so concurrent use never shares mutable state.
*/
class Compressor {
 public:
  enum class Kind { Identity, RandK };

  static Compressor identity(int dim);
  static Compressor rand_k(int dim, int k);  // requires 1 <= k <= dim

  CompressedMessage compress(const Eigen::VectorXd& x, Rng& rng) const;

  // Variance parameter of the defining inequality: 0 for Identity,
  // d/K - 1 for RandK.
  double omega() const;

  // Largest expected number of stored coordinates: d or K.
  int expected_density() const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int k() const { return k_; }

 private:
  Compressor(Kind kind, int dim, int k) : kind_(kind), dim_(dim), k_(k) {}

  Kind kind_;
  int dim_;
  int k_;
};

// K distinct indices from {0, ..., dim-1}, uniform over all K-subsets,
// via a partial Fisher-Yates shuffle (O(K) expected work, sorted output).
std::vector<int> sample_subset_without_replacement(int dim, int k, Rng& rng);

// First k entries of a uniform random permutation of {0, ..., dim-1}, in
// draw order (not sorted).
std::vector<int> sample_permutation_prefix(int dim, int k, Rng& rng);

}  // namespace dashapp

#endif

#include "dashapp/compressors.hpp"

#include <algorithm>
#include <unordered_map>

#include "dashapp/errors.hpp"

namespace dashapp {

Eigen::VectorXd CompressedMessage::to_dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  add_to(out);
  return out;
}

void CompressedMessage::add_to(Eigen::Ref<Eigen::VectorXd> dst) const {
  if (dst.size() != dim) {
    throw DimensionError("CompressedMessage::add_to", dim,
                         static_cast<int>(dst.size()));
  }
  for (std::size_t t = 0; t < index.size(); ++t) {
    dst[index[t]] += value[t];
  }
}

void CompressedMessage::add_scaled_to(Eigen::Ref<Eigen::VectorXd> dst,
                                      double scale) const {
  if (dst.size() != dim) {
    throw DimensionError("CompressedMessage::add_scaled_to", dim,
                         static_cast<int>(dst.size()));
  }
  for (std::size_t t = 0; t < index.size(); ++t) {
    dst[index[t]] += scale * value[t];
  }
}

Compressor Compressor::identity(int dim) {
  if (dim < 1) {
    throw InvalidArgumentError("Compressor::identity: dim must be >= 1");
  }
  return Compressor(Kind::Identity, dim, dim);
}

Compressor Compressor::rand_k(int dim, int k) {
  if (dim < 1) {
    throw InvalidArgumentError("Compressor::rand_k: dim must be >= 1");
  }
  if (k < 1 || k > dim) {
    throw InvalidArgumentError(
        "Compressor::rand_k: k must satisfy 1 <= k <= dim");
  }
  return Compressor(Kind::RandK, dim, k);
}

std::vector<int> sample_permutation_prefix(int dim, int k, Rng& rng) {
  if (k < 0 || k > dim) {
    throw InvalidArgumentError(
        "sample_permutation_prefix: need 0 <= k <= dim");
  }
  // Sparse Fisher-Yates: swap map only holds touched slots, so cost is O(k)
  // regardless of dim.
  std::unordered_map<int, int> swapped;
  swapped.reserve(static_cast<std::size_t>(k) * 2);
  std::vector<int> out;
  out.reserve(k);
  for (int t = 0; t < k; ++t) {
    const int r = t + static_cast<int>(rng.uniform_index(dim - t));
    auto it_r = swapped.find(r);
    const int value_r = (it_r == swapped.end()) ? r : it_r->second;
    auto it_t = swapped.find(t);
    const int value_t = (it_t == swapped.end()) ? t : it_t->second;
    out.push_back(value_r);
    swapped[r] = value_t;
  }
  return out;
}

std::vector<int> sample_subset_without_replacement(int dim, int k, Rng& rng) {
  std::vector<int> out = sample_permutation_prefix(dim, k, rng);
  std::sort(out.begin(), out.end());
  return out;
}

CompressedMessage Compressor::compress(const Eigen::VectorXd& x,
                                       Rng& rng) const {
  if (x.size() != dim_) {
    throw DimensionError("Compressor::compress", dim_,
                         static_cast<int>(x.size()));
  }
  CompressedMessage msg;
  msg.dim = dim_;
  if (kind_ == Kind::Identity) {
    msg.index.resize(dim_);
    msg.value.resize(dim_);
    for (int j = 0; j < dim_; ++j) {
      msg.index[j] = j;
      msg.value[j] = x[j];
    }
    return msg;
  }
  const double scale = static_cast<double>(dim_) / static_cast<double>(k_);
  std::vector<int> subset = sample_subset_without_replacement(dim_, k_, rng);
  msg.index = std::move(subset);
  msg.value.resize(k_);
  for (int t = 0; t < k_; ++t) {
    msg.value[t] = scale * x[msg.index[t]];
  }
  return msg;
}

double Compressor::omega() const {
  if (kind_ == Kind::Identity) return 0.0;
  return static_cast<double>(dim_) / static_cast<double>(k_) - 1.0;
}

int Compressor::expected_density() const {
  return (kind_ == Kind::Identity) ? dim_ : k_;
}

}  // namespace dashapp

#include "dashapp/problems.hpp"

#include <cmath>

#include "dashapp/errors.hpp"

namespace dashapp {

namespace {

// 1 / (1 + exp(-t)) without overflow on either tail.
double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_sum_exp2(double z0, double z1) {
  const double hi = std::max(z0, z1);
  return hi + std::log(std::exp(z0 - hi) + std::exp(z1 - hi));
}

// Nonconvex penalty u^2 / (1 + u^2) and its derivative 2u / (1 + u^2)^2.
double penalty(double u) {
  const double u2 = u * u;
  return u2 / (1.0 + u2);
}

double penalty_deriv(double u) {
  const double q = 1.0 + u * u;
  return 2.0 * u / (q * q);
}

// sup_t |d/dt sigmoid(t)^2| = 8/27, attained at sigmoid = 2/3.
constexpr double kSigmoidSqGradBound = 8.0 / 27.0;

// ||grad of two-class cross entropy|| <= sqrt(2) ||a||.
const double kCrossEntropyGradBound = std::sqrt(2.0);

}  // namespace

double squared_sigmoid_curvature() {
  // Critical sigmoid levels of d^2/dt^2 sigmoid(t)^2 = 2 s^2 (1-s)(2-3s)
  // solve 12 s^2 - 15 s + 4 = 0; the smaller root gives the larger |value|.
  const double s = (15.0 - std::sqrt(33.0)) / 24.0;
  return 2.0 * s * s * (1.0 - s) * (2.0 - 3.0 * s);
}

Problem::Problem(Loss loss, Dataset dataset, std::vector<NodeShard> shards,
                 double lambda, double noise_sigma)
    : loss_(loss),
      dataset_(std::move(dataset)),
      shards_(std::move(shards)),
      lambda_(lambda),
      noise_sigma_(noise_sigma) {
  if (shards_.empty()) {
    throw InvalidArgumentError("Problem: need at least one node shard");
  }
  if (lambda_ < 0.0) {
    throw InvalidArgumentError("Problem: lambda must be >= 0");
  }
  if (noise_sigma_ < 0.0) {
    throw InvalidArgumentError("Problem: noise_sigma must be >= 0");
  }
  m_ = shards_[0].m();
  if (m_ < 1) {
    throw InvalidArgumentError("Problem: shards must be nonempty");
  }
  for (const auto& shard : shards_) {
    if (shard.m() != m_) {
      throw InvalidArgumentError("Problem: all shards must have equal m");
    }
    for (int s : shard.sample_indices) {
      if (s < 0 || s >= dataset_.num_samples()) {
        throw InvalidArgumentError("Problem: shard sample index out of range");
      }
    }
  }
  dim_ = (loss_ == Loss::SquaredSigmoid) ? dataset_.d : 2 * dataset_.d;
}

void Problem::check_node(int node) const {
  if (node < 0 || node >= n_nodes()) {
    throw InvalidArgumentError("Problem: node id out of range");
  }
}

void Problem::check_x(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) {
    throw DimensionError("Problem: parameter vector", dim_,
                         static_cast<int>(x.size()));
  }
}

// Data-dependent part of f at one dataset sample; optionally accumulates
// weight * its gradient into grad_acc.  The softmax penalty term is handled
// by the callers (it is sample-independent).
double Problem::sample_value_grad(int sample, const Eigen::VectorXd& x,
                                  Eigen::VectorXd* grad_acc,
                                  double weight) const {
  const double y = dataset_.labels[sample];
  if (loss_ == Loss::SquaredSigmoid) {
    const double t = y * dataset_.row_dot(sample, x.data());
    const double s = sigmoid(t);
    if (grad_acc != nullptr) {
      const double factor = weight * 2.0 * s * s * (1.0 - s) * y;
      for (int k = dataset_.row_ptr[sample]; k < dataset_.row_ptr[sample + 1];
           ++k) {
        (*grad_acc)[dataset_.col_index[k]] += factor * dataset_.value[k];
      }
    }
    return s * s;
  }

  const int d = dataset_.d;
  const double z0 = dataset_.row_dot(sample, x.data());
  const double z1 = dataset_.row_dot(sample, x.data() + d);
  const int cls = (y > 0.0) ? 1 : 0;
  const double lse = log_sum_exp2(z0, z1);
  if (grad_acc != nullptr) {
    const double p0 = std::exp(z0 - lse);
    const double p1 = std::exp(z1 - lse);
    const double f0 = weight * (p0 - (cls == 0 ? 1.0 : 0.0));
    const double f1 = weight * (p1 - (cls == 1 ? 1.0 : 0.0));
    for (int k = dataset_.row_ptr[sample]; k < dataset_.row_ptr[sample + 1];
         ++k) {
      const int col = dataset_.col_index[k];
      (*grad_acc)[col] += f0 * dataset_.value[k];
      (*grad_acc)[col + d] += f1 * dataset_.value[k];
    }
  }
  return lse - (cls == 1 ? z1 : z0);
}

double Problem::value_sample(int node, int j, const Eigen::VectorXd& x) const {
  check_node(node);
  check_x(x);
  if (j < 0 || j >= m_) {
    throw InvalidArgumentError("Problem: sample index out of range");
  }
  double v = sample_value_grad(shards_[node].sample_indices[j], x, nullptr,
                               1.0);
  if (loss_ == Loss::SoftmaxNonconvexReg) {
    for (int k = 0; k < dim_; ++k) v += lambda_ * penalty(x[k]);
  }
  return v;
}

double Problem::value_node(int node, const Eigen::VectorXd& x) const {
  check_node(node);
  check_x(x);
  double v = 0.0;
  for (int s : shards_[node].sample_indices) {
    v += sample_value_grad(s, x, nullptr, 1.0);
  }
  v /= m_;
  if (loss_ == Loss::SoftmaxNonconvexReg) {
    for (int k = 0; k < dim_; ++k) v += lambda_ * penalty(x[k]);
  }
  return v;
}

double Problem::value(const Eigen::VectorXd& x) const {
  check_x(x);
  double v = 0.0;
  for (const auto& shard : shards_) {
    for (int s : shard.sample_indices) {
      v += sample_value_grad(s, x, nullptr, 1.0);
    }
  }
  v /= static_cast<double>(n_nodes()) * m_;
  if (loss_ == Loss::SoftmaxNonconvexReg) {
    for (int k = 0; k < dim_; ++k) v += lambda_ * penalty(x[k]);
  }
  return v;
}

Eigen::VectorXd Problem::grad_sample(int node, int j,
                                     const Eigen::VectorXd& x) const {
  check_node(node);
  check_x(x);
  if (j < 0 || j >= m_) {
    throw InvalidArgumentError("Problem: sample index out of range");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  sample_value_grad(shards_[node].sample_indices[j], x, &g, 1.0);
  if (loss_ == Loss::SoftmaxNonconvexReg) {
    for (int k = 0; k < dim_; ++k) g[k] += lambda_ * penalty_deriv(x[k]);
  }
  return g;
}

Eigen::VectorXd Problem::grad_full(int node, const Eigen::VectorXd& x) const {
  check_node(node);
  check_x(x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  const double w = 1.0 / m_;
  for (int s : shards_[node].sample_indices) {
    sample_value_grad(s, x, &g, w);
  }
  if (loss_ == Loss::SoftmaxNonconvexReg) {
    for (int k = 0; k < dim_; ++k) g[k] += lambda_ * penalty_deriv(x[k]);
  }
  return g;
}

Eigen::VectorXd Problem::grad(const Eigen::VectorXd& x) const {
  check_x(x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  const double w = 1.0 / (static_cast<double>(n_nodes()) * m_);
  for (const auto& shard : shards_) {
    for (int s : shard.sample_indices) {
      sample_value_grad(s, x, &g, w);
    }
  }
  if (loss_ == Loss::SoftmaxNonconvexReg) {
    for (int k = 0; k < dim_; ++k) g[k] += lambda_ * penalty_deriv(x[k]);
  }
  return g;
}

Xi Problem::draw_xi(int node, Rng& rng) const {
  check_node(node);
  Xi xi;
  xi.j = static_cast<int>(rng.uniform_index(m_));
  xi.noise_seed = rng.next_u64();
  return xi;
}

Eigen::VectorXd Problem::grad_stochastic_at(int node, const Xi& xi,
                                            const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = grad_sample(node, xi.j, x);
  if (noise_sigma_ > 0.0) {
    Rng noise(xi.noise_seed);
    const double scale = noise_sigma_ / std::sqrt(static_cast<double>(dim_));
    for (int k = 0; k < dim_; ++k) g[k] += scale * noise.gaussian();
  }
  return g;
}

Eigen::VectorXd Problem::grad_stochastic(int node, const Eigen::VectorXd& x,
                                         int B, Rng& rng) const {
  if (B < 1) throw InvalidArgumentError("Problem: batch size must be >= 1");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (int b = 0; b < B; ++b) {
    g += grad_stochastic_at(node, draw_xi(node, rng), x);
  }
  return g / B;
}

double Problem::sample_smoothness(int node, int j) const {
  check_node(node);
  if (j < 0 || j >= m_) {
    throw InvalidArgumentError("Problem: sample index out of range");
  }
  const int s = shards_[node].sample_indices[j];
  double row_norm_sq = 0.0;
  for (int k = dataset_.row_ptr[s]; k < dataset_.row_ptr[s + 1]; ++k) {
    row_norm_sq += dataset_.value[k] * dataset_.value[k];
  }
  if (loss_ == Loss::SquaredSigmoid) {
    return squared_sigmoid_curvature() * row_norm_sq;
  }
  // Cross-entropy Hessian is bounded by (1/2) ||a||^2; the penalty's second
  // derivative is bounded by 2 per coordinate.
  return 0.5 * row_norm_sq + 2.0 * lambda_;
}

double feature_gram_lambda_max(const Dataset& dataset,
                               const std::vector<NodeShard>& shards,
                               int iters) {
  std::vector<int> used;
  for (const auto& shard : shards) {
    used.insert(used.end(), shard.sample_indices.begin(),
                shard.sample_indices.end());
  }
  if (used.empty() || dataset.d == 0) return 0.0;
  const double inv_count = 1.0 / static_cast<double>(used.size());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(dataset.d, 1.0);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dataset.d);
    for (int s : used) {
      const double dot = dataset.row_dot(s, v.data());
      for (int k = dataset.row_ptr[s]; k < dataset.row_ptr[s + 1]; ++k) {
        w[dataset.col_index[k]] += dot * dataset.value[k];
      }
    }
    w *= inv_count;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= 1e-14 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

SmoothnessEstimates Problem::estimate_smoothness() const {
  SmoothnessEstimates est;
  const int n = n_nodes();
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double node_mean = 0.0;
    for (int j = 0; j < m_; ++j) {
      const double lij = sample_smoothness(i, j);
      node_mean += lij;
      est.L_max = std::max(est.L_max, lij);
    }
    node_mean /= m_;
    sum_sq += node_mean * node_mean;
  }
  est.L_hat = std::sqrt(sum_sq / n);

  // Global curvature envelope: the worst-case scalar curvature times the
  // top eigenvalue of the mean feature outer-product bounds the Hessian of f
  // at every x, and is never above L_hat.
  const double gram = feature_gram_lambda_max(dataset_, shards_);
  double envelope;
  if (loss_ == Loss::SquaredSigmoid) {
    envelope = squared_sigmoid_curvature() * gram;
  } else {
    envelope = 0.5 * gram + 2.0 * lambda_;
  }
  est.L = std::min(est.L_hat, envelope);
  est.L_sigma = est.L_max;  // shared-draw differences cancel the additive noise
  return est;
}

double Problem::sigma_sq_bound() const {
  double worst = 0.0;
  for (int i = 0; i < n_nodes(); ++i) {
    double mean_sq = 0.0;
    for (int s : shards_[i].sample_indices) {
      double row_norm_sq = 0.0;
      for (int k = dataset_.row_ptr[s]; k < dataset_.row_ptr[s + 1]; ++k) {
        row_norm_sq += dataset_.value[k] * dataset_.value[k];
      }
      const double bound = (loss_ == Loss::SquaredSigmoid)
                               ? kSigmoidSqGradBound * kSigmoidSqGradBound *
                                     row_norm_sq
                               : kCrossEntropyGradBound *
                                     kCrossEntropyGradBound * row_norm_sq;
      mean_sq += bound;
    }
    worst = std::max(worst, mean_sq / m_);
  }
  return worst + noise_sigma_ * noise_sigma_;
}

}  // namespace dashapp

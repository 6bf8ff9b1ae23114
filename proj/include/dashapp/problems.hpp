#ifndef DASHAPP_PROBLEMS_HPP
#define DASHAPP_PROBLEMS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "dashapp/dataset.hpp"
#include "dashapp/rng.hpp"

namespace dashapp {

enum class Loss {
  // (1 - 1/(1 + exp(y a^T x)))^2 per sample; parameter dimension d.
  SquaredSigmoid,
  // Two-class cross entropy on logits (a^T x_1, a^T x_2) plus the nonconvex
  // penalty lambda * sum_k u_k^2 / (1 + u_k^2) over the stacked parameter
  // u = (x_1, x_2); parameter dimension 2d.
  SoftmaxNonconvexReg,
};

// Smoothness upper bounds computed from the data.  Always L <= L_hat <= L_max.
struct SmoothnessEstimates {
  double L = 0.0;       // global: min(L_hat, curvature envelope of mean Hessian)
  double L_hat = 0.0;   // sqrt((1/n) sum_i L_i^2), L_i = mean of per-sample bounds
  double L_max = 0.0;   // max per-sample bound
  double L_sigma = 0.0; // mean-squared smoothness of the stochastic oracle
  std::optional<double> mu;  // gradient-dominance constant when known
};

// One draw of the stochastic oracle: a sample index plus the seed of its
// additive noise vector.  Evaluating the same Xi at two points reuses the
// identical noise, so point differences are noise-free.
struct Xi {
  int j = 0;
  std::uint64_t noise_seed = 0;
};

/*
    The simulated objective: n nodes, each holding m samples of a shared
    sparse dataset,

        f(x) = (1/n) sum_i f_i(x),   f_i(x) = (1/m) sum_j f_ij(x),

    with three oracle levels: exact node gradients, per-sample gradients, and
    a noisy stochastic oracle

        grad f_i(x; xi) = grad f_{i,j(xi)}(x) + noise(xi),

    where noise is isotropic Gaussian with per-coordinate standard deviation
    noise_sigma / sqrt(dim), so E||noise||^2 = noise_sigma^2.

    Immutable after construction; all oracle calls are const and safe to run
    concurrently with independent streams.
*/
class Problem {
 public:
  Problem(Loss loss, Dataset dataset, std::vector<NodeShard> shards,
          double lambda = 1e-3, double noise_sigma = 0.0);

  int dim() const { return dim_; }
  int n_nodes() const { return static_cast<int>(shards_.size()); }
  int m() const { return m_; }
  Loss loss() const { return loss_; }
  double lambda() const { return lambda_; }
  double noise_sigma() const { return noise_sigma_; }
  const Dataset& dataset() const { return dataset_; }
  const std::vector<NodeShard>& shards() const { return shards_; }

  double value(const Eigen::VectorXd& x) const;
  double value_node(int node, const Eigen::VectorXd& x) const;
  double value_sample(int node, int j, const Eigen::VectorXd& x) const;

  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad_full(int node, const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad_sample(int node, int j, const Eigen::VectorXd& x) const;

  // Stochastic oracle.  draw_xi picks a uniform sample index and a fresh
  // noise seed; grad_stochastic_at is deterministic in (xi, x).
  Xi draw_xi(int node, Rng& rng) const;
  Eigen::VectorXd grad_stochastic_at(int node, const Xi& xi,
                                     const Eigen::VectorXd& x) const;
  // Mean of B fresh draws.
  Eigen::VectorXd grad_stochastic(int node, const Eigen::VectorXd& x, int B,
                                  Rng& rng) const;

  // Per-sample curvature bound L_ij; the aggregates below derive from it.
  double sample_smoothness(int node, int j) const;
  SmoothnessEstimates estimate_smoothness() const;

  // Upper bound for the oracle variance E||grad f_i(x;xi) - grad f_i(x)||^2,
  // uniform over x and i: worst-node per-sample gradient-norm bound plus
  // noise_sigma^2.
  double sigma_sq_bound() const;

 private:
  void check_node(int node) const;
  void check_x(const Eigen::VectorXd& x) const;
  double sample_value_grad(int sample, const Eigen::VectorXd& x,
                           Eigen::VectorXd* grad_acc, double weight) const;

  Loss loss_;
  Dataset dataset_;
  std::vector<NodeShard> shards_;
  double lambda_;
  double noise_sigma_;
  int m_;
  int dim_;
};

// max |d^2/dt^2 sigmoid(t)^2|: the scalar curvature constant behind the
// squared-sigmoid smoothness bounds.
double squared_sigmoid_curvature();

// Largest eigenvalue of (1/count) sum a_s a_s^T over the listed samples,
// by power iteration (matrix-free).
double feature_gram_lambda_max(const Dataset& dataset,
                               const std::vector<NodeShard>& shards,
                               int iters = 300);

}  // namespace dashapp

#endif

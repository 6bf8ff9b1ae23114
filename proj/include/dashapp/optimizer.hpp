#ifndef DASHAPP_OPTIMIZER_HPP
#define DASHAPP_OPTIMIZER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "dashapp/compressors.hpp"
#include "dashapp/participation.hpp"
#include "dashapp/problems.hpp"
#include "dashapp/theory.hpp"

namespace dashapp {

// Per-run algorithm parameters.  a and b are momenta in (0,1]; gamma >= 0
// (zero is allowed for fixed-point tests).  B is the mini-batch size,
// B_prime the mega-batch (sync-mvr, must be >= B), B_init the batch used to
// initialize h_i = g_i in the stochastic variants.
struct VariantConfig {
  Variant variant = Variant::Gradient;
  double gamma = 0.0;
  double a = 1.0;
  double b = 1.0;
  int B = 1;
  int B_prime = 1;
  int B_init = 1;
  double p_page = 0.5;
  double p_mega = 0.5;

  // Copies the calculator's prescribed values (a, b, probabilities, batch
  // sizes) and sets gamma = gamma_max.
  static VariantConfig from_theory(Variant variant, const TheoryParams& tp,
                                   int B);
};

struct OptimizerState {
  Eigen::VectorXd x;
  Eigen::VectorXd g_server;            // (1/n) sum_i g_i, kept incrementally
  std::vector<Eigen::VectorXd> g;      // per node
  std::vector<Eigen::VectorXd> h;      // per node
  std::vector<Eigen::MatrixXd> h_ij;   // per node, dim x m; finite-mvr only
  int round = 0;
  long long coords_sent_total = 0;     // stored message entries, all nodes
  int last_participants = 0;
  long long last_coords = 0;
};

struct RoundRow {
  int t = 0;
  double f = 0.0;
  double grad_norm_sq = 0.0;
  long long coords_sent_cum = 0;  // total across nodes, after this round
  int participants = 0;
};

struct RunRecord {
  std::vector<RoundRow> rounds;
  Eigen::VectorXd x_final;        // x^T
  double f_final = 0.0;
  double grad_norm_sq_final = 0.0;
  Eigen::VectorXd x_hat;          // uniform draw from {x^0, ..., x^{T-1}}
  int x_hat_round = 0;
  long long init_coords_total = 0;  // n*d: the h^0/g^0 synchronization
  std::optional<double> f_star;
  std::optional<double> delta0_estimate;  // f(x^0) - f_star
};

/*
    The server/node loop.  One step:

      x^{t+1} = x^t - gamma g^t, broadcast (x^{t+1}, x^t);
      participating node i:
        compute k_i^{t+1} by the variant rule,
        h_i <- h_i + k_i / p_a,
        m_i = C_i(k_i / p_a - (a / p_a)(g_i - h_i^t))   [h_i^t = pre-update h_i],
        g_i <- g_i + m_i;
      idle nodes keep g_i, h_i (and h_ij) untouched and contribute m_i = 0;
      server: g^{t+1} = g^t + (1/n) sum_i m_i.

    The sync-mvr variant flips a shared coin instead: mega rounds replace the
    compressor with the raw message and a B'-sample recursion with momentum
    b/p_mega; regular rounds send the compressed plain batch difference.

    Randomness is split into named sub-streams keyed by (seed, stream, round,
    node), so node processing order never affects results, idle nodes leave
    other nodes' draws unchanged, and a full-participation run consumes
    exactly the streams a reference single-coin implementation would.
*/
class Engine {
 public:
  Engine(const Problem& problem, std::vector<Compressor> compressors,
         ParticipationScheme scheme, VariantConfig config,
         std::uint64_t seed, Eigen::VectorXd x0);

  // One round with mask and (page/mega) coin drawn from the streams.
  void step();
  // One round with the participation mask (and coin, for the coin variants)
  // forced; batch/compressor streams are still used.  Enumeration hook.
  void step_forced(const Mask& mask, int coin);

  RunRecord run(int T, std::optional<double> f_star = {});

  const OptimizerState& state() const { return state_; }
  void set_state(const OptimizerState& s) { state_ = s; }

  const Problem& problem() const { return *problem_; }
  const VariantConfig& config() const { return config_; }

  // Invariant gaps, for tests: ||g_server - (1/n) sum g_i|| and, for
  // finite-mvr, max_i ||h_i - (1/m) sum_j h_ij||.
  double server_aggregate_gap() const;
  double h_consistency_gap() const;

 private:
  Eigen::VectorXd compute_k(int node, const Eigen::VectorXd& x_new,
                            const Eigen::VectorXd& x_old, int coin, int round);
  void apply_round(const Mask& mask, int coin);

  const Problem* problem_;
  std::vector<Compressor> compressors_;
  ParticipationScheme scheme_;
  VariantConfig config_;
  std::uint64_t seed_;
  OptimizerState state_;
};

}  // namespace dashapp

#endif

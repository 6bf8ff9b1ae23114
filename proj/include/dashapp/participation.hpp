#ifndef DASHAPP_PARTICIPATION_HPP
#define DASHAPP_PARTICIPATION_HPP

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "dashapp/rng.hpp"

namespace dashapp {

using Mask = std::vector<std::uint8_t>;

/*
    Per-round node availability.

    Three schemes: Full (all nodes, every round), SNice (uniformly s of n
    without replacement), Independent (i.i.d. Bernoulli(p) per node).  Each
    scheme exposes its first two participation moments:

      p_a  = P(node i participates)
      p_aa = P(nodes i and j both participate), i != j

    Every constructible scheme satisfies p_aa <= p_a^2.
*/
class ParticipationScheme {
 public:
  enum class Kind { Full, SNice, Independent };

  static ParticipationScheme full(int n);
  static ParticipationScheme s_nice(int n, int s);        // 1 <= s <= n
  static ParticipationScheme independent(int n, double p);  // p in (0, 1]

  // One round's availability bits; draws are independent across calls given
  // independent stream positions.
  Mask sample_round(Rng& rng) const;

  double p_a() const;
  double p_aa() const;

  // sqrt(1 - p_aa/p_a): the factor multiplying the cross-node variance terms;
  // zero under full participation.
  double pp_indicator() const;

  // All masks with positive probability, as (probability, mask) pairs.
  // Guarded to n <= 12 for SNice/Independent (2^n or C(n,s) outcomes).
  std::vector<std::pair<double, Mask>> enumerate_masks() const;

  // Exact variance of the partial-participation mean estimator
  //   (1/n) sum_i v_i,   v_i = r_i + s_i / p_a if i in S else r_i,
  // given only per-node summaries E s_i (means) and E||s_i - E s_i||^2
  // (vars):
  //   (1/(n^2 p_a)) sum_i vars_i
  //   + ((p_a - p_aa)/(n^2 p_a^2)) sum_i ||means_i||^2
  //   + ((p_aa - p_a^2)/p_a^2) ||(1/n) sum_i means_i||^2.
  // SNice is guarded to n <= 12 so the value stays checkable against direct
  // mask enumeration.
  double pp_mean_variance_oracle(const std::vector<Eigen::VectorXd>& s_means,
                                 const std::vector<double>& s_vars) const;

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int s() const { return s_; }

 private:
  ParticipationScheme(Kind kind, int n, int s, double p)
      : kind_(kind), n_(n), s_(s), p_(p) {}

  Kind kind_;
  int n_;
  int s_;     // SNice only
  double p_;  // Independent only
};

}  // namespace dashapp

#endif

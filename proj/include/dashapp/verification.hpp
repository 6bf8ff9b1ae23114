#ifndef DASHAPP_VERIFICATION_HPP
#define DASHAPP_VERIFICATION_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dashapp/participation.hpp"

namespace dashapp {

/*
    Brute-force oracles for the probabilistic identities the algorithm's
    analysis rests on.  Each check computes the left side by exhaustive
    enumeration of every random outcome and the right side from the closed
    form, re-deriving all probabilities locally — none of them call the
    optimizer, the compressor, or the participation sampling paths, so
    agreement is evidence rather than tautology.

    Enumeration guards are hard-coded (n <= 5, m <= 4, d <= 6); larger
    instances are rejected with EnumerationLimitError.
*/

// A finite distribution over vectors.  Probabilities must be nonnegative and
// sum to 1 within 1e-12 (checked before use).
struct EnumeratedDistribution {
  std::vector<double> probs;
  std::vector<Eigen::VectorXd> values;

  void validate() const;
  Eigen::VectorXd mean() const;
  double variance() const;  // E||X - E X||^2
};

struct VerifyResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  bool pass = false;
};

// Variance of the partial-participation mean estimator (1/n) sum v_i with
// v_i = r_i + s_i/p_a on participating nodes, r_i otherwise: enumerated over
// mask x s-outcomes vs the three-term closed form.
VerifyResult verify_sampling_lemma(
    const ParticipationScheme& scheme,
    const std::vector<EnumeratedDistribution>& s_dists,
    const std::vector<Eigen::VectorXd>& r, double tol = 1e-12);

// Distributed mean estimation with per-node with-replacement B-batches:
// variance under full participation and under uniform s-of-n participation,
// enumerated (all m^B tuples per node, all s-subsets) vs both closed forms.
struct Section7Result {
  double full_enumerated = 0.0;
  double full_closed = 0.0;
  double snice_enumerated = 0.0;
  double snice_closed = 0.0;
  double max_abs_diff = 0.0;
  bool pass = false;
};
Section7Result verify_section7_variances(
    const std::vector<std::vector<Eigen::VectorXd>>& x, int B, int s,
    double tol = 1e-12);

// E C(x) = x and E||C(x) - x||^2 = (d/K - 1)||x||^2 for the K-sparse
// rescaling operator, by enumerating all C(d,K) subsets with exact counts.
// K = d doubles as the identity case.
struct MomentsResult {
  double mean_abs_err = 0.0;
  double second_moment_abs_err = 0.0;
  bool pass = false;
};
MomentsResult verify_compressor_moments(int d, int K, const Eigen::VectorXd& x,
                                        double tol = 1e-12);

// One round of the main loop in the exact-gradient variant, state given
// directly as vectors: enumerates participation masks and (for the K-sparse
// compressor) every per-node subset combination, and checks the tracking
// identities  E[h_i'] = h_i + k_i  and  E[g_i'] = g_i + k_i - a(g_i - h_i)
// with k_i = grad_new_i - grad_old_i - b(h_i - grad_old_i).
struct OneRoundInputs {
  std::vector<Eigen::VectorXd> grad_new;
  std::vector<Eigen::VectorXd> grad_old;
  std::vector<Eigen::VectorXd> h;
  std::vector<Eigen::VectorXd> g;
  double a = 1.0;
  double b = 1.0;
  bool rand_k = false;  // false: identity messages
  int K = 1;
};
struct OneRoundResult {
  double max_h_err = 0.0;
  double max_g_err = 0.0;
  bool pass = false;
};
OneRoundResult verify_one_round_expectations(const ParticipationScheme& scheme,
                                             const OneRoundInputs& in,
                                             double tol = 1e-12);

// Canned battery over randomized small instances; backs the CLI table.
std::vector<VerifyResult> verify_standard_battery(std::uint64_t seed);

}  // namespace dashapp

#endif

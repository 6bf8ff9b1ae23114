#ifndef DASHAPP_THEORY_HPP
#define DASHAPP_THEORY_HPP

#include <optional>
#include <string>
#include <vector>

namespace dashapp {

enum class Variant { Gradient, Page, FiniteMvr, Mvr, SyncMvr };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Everything the parameter formulas consume.  delta0 defaults to 1 so the
// round-count expressions are usable before f* is known.
struct TheoryInputs {
  double omega = 0.0;  // compressor variance parameter
  int n = 1;           // nodes
  double p_a = 1.0;    // participation moments
  double p_aa = 1.0;
  double L = 1.0;  // smoothness constants
  double L_hat = 1.0;
  double L_max = 1.0;
  double L_sigma = 1.0;
  double sigma_sq = 0.0;  // stochastic-oracle variance
  int m = 1;              // local samples
  int B = 1;              // batch size
  double epsilon = 1e-4;  // target stationarity
  std::optional<double> mu;  // gradient-dominance constant
  int d = 1;              // ambient dimension
  double zeta_C = 1.0;    // compressor expected density
  double delta0 = 1.0;    // initial gap f(x0) - f*
};

struct TheoryParams {
  double a = 1.0;
  double b = 1.0;
  double gamma_max = 0.0;
  std::optional<double> p_page;
  std::optional<double> p_mega;
  std::optional<long long> B_init;
  std::optional<long long> B_prime;
  // Rounds to reach epsilon at gamma = gamma_max: 2*delta0/(gamma*eps), or
  // log(delta0/eps) / -log(rate_factor) in the gradient-dominated case.
  std::optional<double> T_bound;
  std::optional<double> rate_factor;  // 1 - gamma*mu
  std::vector<std::string> notes;     // regime warnings, never errors
};

/*
    Momentum and step-size prescriptions, one function per variant's
    convergence analysis.  All are pure: same inputs, same outputs, no
    clamping — inputs violating a precondition are rejected with
    InvalidArgumentError.

    Common pieces: a = p_a/(2w+1); the step-size bound has the shape
    1/(L + sqrt(bracket)) where the bracket collects the compression term
    (vanishes when omega = 0) and the partial-participation term (vanishes
    when p_aa/p_a = 1), so (p_a, p_aa, omega) = (1, 1, 0) gives exactly 1/L
    in the gradient setting.
*/
TheoryParams params_gradient(const TheoryInputs& in);
TheoryParams params_page(const TheoryInputs& in,
                         std::optional<double> p_page_override = {});
TheoryParams params_finite_mvr(const TheoryInputs& in);
TheoryParams params_mvr(const TheoryInputs& in);
TheoryParams params_sync_mvr(const TheoryInputs& in,
                             std::optional<double> p_mega_override = {});

// Linear-rate parameters under gradient dominance (mu required).  Uses the
// enlarged radical constants of the linear-rate analyses and intersects
// gamma with the momentum caps (a/(4 mu) in the gradient setting, a/(2 mu)
// and b/(2 mu) otherwise).  FiniteMvr has no such rate and is rejected.
TheoryParams params_pl(const TheoryInputs& in, Variant variant);

// Leading complexity terms for RandK runs (finite-sum and stochastic
// recursive variants).  Advisory numbers with all order constants set to 1.
struct ComplexityReport {
  double comm_complexity = 0.0;    // total coordinates sent
  double oracle_complexity = 0.0;  // gradient calls per node
  double K = 0.0;                  // suggested RandK parameter (unclamped)
  double B_cap = 0.0;              // largest batch keeping the 1/p_a scaling
};
ComplexityReport complexity_randk(const TheoryInputs& in, Variant variant);

}  // namespace dashapp

#endif

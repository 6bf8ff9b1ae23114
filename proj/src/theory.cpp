#include "dashapp/theory.hpp"

#include <cmath>
#include <limits>

#include "dashapp/errors.hpp"

namespace dashapp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_common(const TheoryInputs& in) {
  if (in.n < 1) throw InvalidArgumentError("theory: n must be >= 1");
  if (!(in.p_a > 0.0) || in.p_a > 1.0) {
    throw InvalidArgumentError("theory: p_a must lie in (0, 1]");
  }
  if (in.p_aa < 0.0 || in.p_aa > 1.0) {
    throw InvalidArgumentError("theory: p_aa must lie in [0, 1]");
  }
  if (in.p_aa > in.p_a * in.p_a * (1.0 + 1e-12)) {
    throw InvalidArgumentError("theory: p_aa must not exceed p_a^2");
  }
  if (in.omega < 0.0) throw InvalidArgumentError("theory: omega must be >= 0");
  if (!(in.L > 0.0) || !(in.L_hat > 0.0)) {
    throw InvalidArgumentError("theory: smoothness constants must be > 0");
  }
  if (in.m < 1 || in.B < 1) {
    throw InvalidArgumentError("theory: m and B must be >= 1");
  }
  if (!(in.epsilon > 0.0)) {
    throw InvalidArgumentError("theory: epsilon must be > 0");
  }
}

// 1 - p_aa/p_a: squared participation indicator; exactly 0 when p_aa = p_a.
double indicator_sq(const TheoryInputs& in) {
  return 1.0 - in.p_aa / in.p_a;
}

double momentum_a(const TheoryInputs& in) {
  return in.p_a / (2.0 * in.omega + 1.0);
}

double gamma_from_bracket(double L, double bracket) {
  return 1.0 / (L + std::sqrt(bracket));
}

double rounds_to_eps(const TheoryInputs& in, double gamma) {
  return 2.0 * in.delta0 / (gamma * in.epsilon);
}

double require_mu(const TheoryInputs& in) {
  if (!in.mu.has_value() || !(*in.mu > 0.0)) {
    throw InvalidArgumentError("theory: gradient-dominance constant mu > 0 required");
  }
  return *in.mu;
}

void fill_pl_tail(const TheoryInputs& in, TheoryParams& p, double mu) {
  p.rate_factor = 1.0 - p.gamma_max * mu;
  if (*p.rate_factor <= 0.0 || *p.rate_factor >= 1.0) {
    p.notes.push_back("rate factor outside (0,1); inputs are degenerate");
    p.T_bound.reset();
    return;
  }
  if (in.delta0 > in.epsilon) {
    p.T_bound = std::log(in.delta0 / in.epsilon) / -std::log1p(-p.gamma_max * mu);
  } else {
    p.T_bound = 0.0;
  }
}

// Momentum b for the stochastic recursive variant: any b in
// (0, p_a/(2-p_a)] is admissible; the default picks
// min{(p_a/w) sqrt(scale), p_a * scale} with scale = n*eps*B/sigma^2 (the
// omega branch dropped when omega = 0, both dropped when sigma = 0).
double mvr_momentum_b(const TheoryInputs& in, double noise_scale,
                      TheoryParams& p) {
  const double cap = in.p_a / (2.0 - in.p_a);
  if (in.sigma_sq <= 0.0) return cap;
  if (noise_scale > 1.0) {
    p.notes.push_back("low-noise regime: sigma^2 < n*eps*B lies outside the "
                      "prescription's assumed range; momentum clipped at its "
                      "cap");
  }
  double b = in.p_a * noise_scale;
  if (in.omega > 0.0) {
    b = std::min(b, in.p_a / in.omega * std::sqrt(noise_scale));
  }
  return std::min(cap, b);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Gradient:
      return "gradient";
    case Variant::Page:
      return "page";
    case Variant::FiniteMvr:
      return "finite-mvr";
    case Variant::Mvr:
      return "mvr";
    case Variant::SyncMvr:
      return "sync-mvr";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "gradient") return Variant::Gradient;
  if (name == "page") return Variant::Page;
  if (name == "finite-mvr") return Variant::FiniteMvr;
  if (name == "mvr") return Variant::Mvr;
  if (name == "sync-mvr") return Variant::SyncMvr;
  throw InvalidArgumentError("unknown variant name: " + name);
}

TheoryParams params_gradient(const TheoryInputs& in) {
  check_common(in);
  TheoryParams p;
  p.a = momentum_a(in);
  p.b = in.p_a / (2.0 - in.p_a);
  const double npa2 = in.n * in.p_a * in.p_a;
  const double bracket =
      (48.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 +
       16.0 / npa2 * indicator_sq(in)) *
      (in.L_hat * in.L_hat);
  p.gamma_max = gamma_from_bracket(in.L, bracket);
  p.T_bound = rounds_to_eps(in, p.gamma_max);
  return p;
}

TheoryParams params_page(const TheoryInputs& in,
                         std::optional<double> p_page_override) {
  check_common(in);
  if (!(in.L_max > 0.0)) {
    throw InvalidArgumentError("theory: L_max must be > 0");
  }
  TheoryParams p;
  const double pp = p_page_override.value_or(
      static_cast<double>(in.B) / (in.m + in.B));
  if (!(pp > 0.0) || pp > 1.0) {
    throw InvalidArgumentError("theory: p_page must lie in (0, 1]");
  }
  p.p_page = pp;
  p.a = momentum_a(in);
  p.b = pp * in.p_a / (2.0 - in.p_a);
  const double npa2 = in.n * in.p_a * in.p_a;
  const double variance_term = (1.0 - pp) * in.L_max * in.L_max / in.B;
  const double Lh2 = in.L_hat * in.L_hat;
  const double bracket =
      48.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 * (Lh2 + variance_term) +
      16.0 / (npa2 * pp) * (indicator_sq(in) * Lh2 + variance_term);
  p.gamma_max = gamma_from_bracket(in.L, bracket);
  p.T_bound = rounds_to_eps(in, p.gamma_max);
  return p;
}

TheoryParams params_finite_mvr(const TheoryInputs& in) {
  check_common(in);
  if (!(in.L_max > 0.0)) {
    throw InvalidArgumentError("theory: L_max must be > 0");
  }
  if (in.B > in.m) {
    throw InvalidArgumentError("theory: finite-mvr requires B <= m");
  }
  TheoryParams p;
  p.a = momentum_a(in);
  const double ratio = in.p_a * in.B / in.m;
  p.b = ratio / (2.0 - ratio);
  const double npa2 = in.n * in.p_a * in.p_a;
  const double variance_term = in.L_max * in.L_max / in.B;
  const double Lh2 = in.L_hat * in.L_hat;
  const double bracket =
      148.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 *
          (Lh2 + variance_term) +
      72.0 * in.m / (npa2 * in.B) * (indicator_sq(in) * Lh2 + variance_term);
  p.gamma_max = gamma_from_bracket(in.L, bracket);
  p.T_bound = rounds_to_eps(in, p.gamma_max);
  return p;
}

TheoryParams params_mvr(const TheoryInputs& in) {
  check_common(in);
  if (!(in.L_sigma > 0.0)) {
    throw InvalidArgumentError("theory: L_sigma must be > 0");
  }
  if (in.sigma_sq < 0.0) {
    throw InvalidArgumentError("theory: sigma_sq must be >= 0");
  }
  TheoryParams p;
  p.a = momentum_a(in);
  const double noise_scale =
      (in.sigma_sq > 0.0) ? in.n * in.epsilon * in.B / in.sigma_sq : kInf;
  p.b = mvr_momentum_b(in, noise_scale, p);
  p.B_init = static_cast<long long>(
      std::ceil(std::sqrt(in.p_a) * in.B / p.b));
  const double npa2 = in.n * in.p_a * in.p_a;
  const double variance_term =
      (1.0 - p.b) * (1.0 - p.b) * in.L_sigma * in.L_sigma / in.B;
  const double Lh2 = in.L_hat * in.L_hat;
  const double bracket =
      48.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 * (Lh2 + variance_term) +
      12.0 / (in.n * in.p_a * p.b) *
          (indicator_sq(in) * Lh2 + variance_term);
  p.gamma_max = gamma_from_bracket(in.L, bracket);
  p.T_bound = rounds_to_eps(in, p.gamma_max);
  return p;
}

TheoryParams params_sync_mvr(const TheoryInputs& in,
                             std::optional<double> p_mega_override) {
  check_common(in);
  if (!(in.L_sigma > 0.0)) {
    throw InvalidArgumentError("theory: L_sigma must be > 0");
  }
  if (in.d < 1 || !(in.zeta_C > 0.0) || in.zeta_C > in.d) {
    throw InvalidArgumentError("theory: need 0 < zeta_C <= d");
  }
  TheoryParams p;
  double pm;
  if (p_mega_override.has_value()) {
    pm = *p_mega_override;
  } else {
    pm = in.zeta_C / in.d;
    if (in.sigma_sq > 0.0) {
      pm = std::min(pm, in.n * in.epsilon * in.B / in.sigma_sq);
    }
  }
  if (!(pm > 0.0) || pm > 1.0) {
    throw InvalidArgumentError("theory: p_mega must lie in (0, 1]");
  }
  p.p_mega = pm;
  p.a = momentum_a(in);
  p.b = pm * in.p_a / (2.0 - in.p_a);
  const double npa2 = in.n * in.p_a * in.p_a;
  const double variance_term = in.L_sigma * in.L_sigma / in.B;
  const double Lh2 = in.L_hat * in.L_hat;
  const double bracket =
      8.0 * (2.0 * in.omega + 1.0) * in.omega / npa2 * (Lh2 + variance_term) +
      16.0 / (in.n * pm * in.p_a * in.p_a) *
          (indicator_sq(in) * Lh2 + variance_term);
  p.gamma_max = gamma_from_bracket(in.L, bracket);
  // Mega-batch size Theta(sigma^2/(n*eps)), at least B.
  const double bp = (in.sigma_sq > 0.0)
                        ? std::ceil(in.sigma_sq / (in.n * in.epsilon))
                        : static_cast<double>(in.B);
  p.B_prime = static_cast<long long>(std::max<double>(in.B, bp));
  p.B_init = static_cast<long long>(
      std::ceil(in.B / (pm * std::sqrt(in.p_a))));
  p.T_bound = rounds_to_eps(in, p.gamma_max);
  return p;
}

TheoryParams params_pl(const TheoryInputs& in, Variant variant) {
  check_common(in);
  const double mu = require_mu(in);
  const double npa2 = in.n * in.p_a * in.p_a;
  const double Lh2 = in.L_hat * in.L_hat;
  TheoryParams p;
  p.a = momentum_a(in);
  switch (variant) {
    case Variant::Gradient: {
      p.b = in.p_a / (2.0 - in.p_a);
      const double bracket = (200.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 +
                              48.0 / npa2 * indicator_sq(in)) *
                             Lh2;
      p.gamma_max = std::min(gamma_from_bracket(in.L, bracket),
                             p.a / (4.0 * mu));
      break;
    }
    case Variant::Page: {
      if (!(in.L_max > 0.0)) {
        throw InvalidArgumentError("theory: L_max must be > 0");
      }
      const double pp = static_cast<double>(in.B) / (in.m + in.B);
      p.p_page = pp;
      p.b = pp * in.p_a / (2.0 - in.p_a);
      const double variance_term = (1.0 - pp) * in.L_max * in.L_max / in.B;
      const double bracket =
          200.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 *
              (Lh2 + variance_term) +
          48.0 / (npa2 * pp) * (indicator_sq(in) * Lh2 + variance_term);
      p.gamma_max = std::min({gamma_from_bracket(in.L, bracket),
                              p.a / (2.0 * mu), p.b / (2.0 * mu)});
      break;
    }
    case Variant::Mvr: {
      if (!(in.L_sigma > 0.0)) {
        throw InvalidArgumentError("theory: L_sigma must be > 0");
      }
      const double noise_scale =
          (in.sigma_sq > 0.0) ? mu * in.n * in.epsilon * in.B / in.sigma_sq
                              : kInf;
      p.b = mvr_momentum_b(in, noise_scale, p);
      p.B_init = static_cast<long long>(
          std::ceil(std::sqrt(in.p_a) * in.B / p.b));
      const double variance_term =
          (1.0 - p.b) * (1.0 - p.b) * in.L_sigma * in.L_sigma / in.B;
      const double bracket =
          200.0 * in.omega * (2.0 * in.omega + 1.0) / npa2 *
              (variance_term + Lh2) +
          40.0 / (in.n * in.p_a * p.b) *
              (variance_term + indicator_sq(in) * Lh2);
      p.gamma_max = std::min({gamma_from_bracket(in.L, bracket),
                              p.a / (2.0 * mu), p.b / (2.0 * mu)});
      break;
    }
    case Variant::SyncMvr: {
      if (!(in.L_sigma > 0.0)) {
        throw InvalidArgumentError("theory: L_sigma must be > 0");
      }
      if (in.d < 1 || !(in.zeta_C > 0.0) || in.zeta_C > in.d) {
        throw InvalidArgumentError("theory: need 0 < zeta_C <= d");
      }
      double pm = in.zeta_C / in.d;
      if (in.sigma_sq > 0.0) {
        pm = std::min(pm, mu * in.n * in.epsilon * in.B / in.sigma_sq);
      }
      p.p_mega = pm;
      p.b = pm * in.p_a / (2.0 - in.p_a);
      const double Ls2B = in.L_sigma * in.L_sigma / in.B;
      const double bracket =
          16.0 * (2.0 * in.omega + 1.0) * in.omega / npa2 * (Ls2B + Lh2) +
          48.0 * Ls2B / (in.n * pm * in.p_a * in.p_a) +
          24.0 * indicator_sq(in) * Lh2 / (in.n * pm * in.p_a * in.p_a);
      const double bp = (in.sigma_sq > 0.0)
                            ? std::ceil(in.sigma_sq / (mu * in.n * in.epsilon))
                            : static_cast<double>(in.B);
      p.B_prime = static_cast<long long>(std::max<double>(in.B, bp));
      p.gamma_max = std::min({gamma_from_bracket(in.L, bracket),
                              p.a / (2.0 * mu), p.b / (2.0 * mu)});
      break;
    }
    case Variant::FiniteMvr:
      throw InvalidArgumentError(
          "theory: no linear-rate parameters for the finite-mvr variant");
  }
  fill_pl_tail(in, p, mu);
  return p;
}

ComplexityReport complexity_randk(const TheoryInputs& in, Variant variant) {
  check_common(in);
  ComplexityReport r;
  const double ind2 = indicator_sq(in);
  const double sqrt_n = std::sqrt(static_cast<double>(in.n));
  if (variant == Variant::Page) {
    if (!(in.L_max > 0.0)) {
      throw InvalidArgumentError("theory: L_max must be > 0");
    }
    r.K = in.B * in.d / std::sqrt(static_cast<double>(in.m));
    const double cap_var =
        (ind2 > 0.0) ? in.L_max * in.L_max / (ind2 * in.L_hat * in.L_hat)
                     : kInf;
    r.B_cap = std::min(std::sqrt(static_cast<double>(in.m) / in.n) / in.p_a,
                       cap_var);
    r.comm_complexity =
        in.d + in.L_max * in.delta0 * in.d / (in.p_a * in.epsilon * sqrt_n);
    r.oracle_complexity =
        in.m + in.L_max * in.delta0 * std::sqrt(static_cast<double>(in.m)) /
                   (in.p_a * in.epsilon * sqrt_n);
    return r;
  }
  if (variant == Variant::Mvr) {
    if (!(in.L_sigma > 0.0) || !(in.sigma_sq > 0.0)) {
      throw InvalidArgumentError(
          "theory: stochastic complexity needs L_sigma > 0 and sigma_sq > 0");
    }
    const double sigma = std::sqrt(in.sigma_sq);
    const double sqrt_eps = std::sqrt(in.epsilon);
    r.K = in.B * in.d * std::sqrt(in.epsilon * in.n) / sigma;
    const double cap_var =
        (ind2 > 0.0)
            ? in.L_sigma * in.L_sigma / (ind2 * in.L_hat * in.L_hat)
            : kInf;
    r.B_cap = std::min(sigma / (in.p_a * sqrt_eps * in.n), cap_var);
    r.comm_complexity =
        in.d * sigma / (std::sqrt(in.p_a) * std::sqrt(in.n * in.epsilon)) +
        in.L_sigma * in.delta0 * in.d / (in.p_a * sqrt_n * in.epsilon);
    r.oracle_complexity =
        in.sigma_sq / (std::sqrt(in.p_a) * in.n * in.epsilon) +
        in.L_sigma * in.delta0 * sigma /
            (in.p_a * in.epsilon * sqrt_eps * in.n);
    return r;
  }
  throw InvalidArgumentError(
      "theory: RandK complexity expressions cover the page and mvr variants");
}

}  // namespace dashapp

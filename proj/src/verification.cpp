#include "dashapp/verification.hpp"

#include <cmath>
#include <sstream>

#include "dashapp/errors.hpp"
#include "dashapp/rng.hpp"

namespace dashapp {

namespace {

constexpr int kMaxNodes = 5;
constexpr int kMaxSamples = 4;
constexpr int kMaxDim = 6;

double binomial(int n, int k) {
  double c = 1.0;
  for (int t = 0; t < k; ++t) c = c * (n - t) / (t + 1);
  return c;
}

// All masks with their probabilities, re-derived from the scheme parameters
// (not from the participation module's own enumeration).
std::vector<std::pair<double, Mask>> local_masks(
    const ParticipationScheme& scheme) {
  const int n = scheme.n();
  if (n > kMaxNodes) {
    throw EnumerationLimitError("verification: scheme n exceeds guard");
  }
  std::vector<std::pair<double, Mask>> out;
  switch (scheme.kind()) {
    case ParticipationScheme::Kind::Full:
      out.emplace_back(1.0, Mask(n, 1));
      break;
    case ParticipationScheme::Kind::SNice: {
      const double prob = 1.0 / binomial(n, scheme.s());
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Mask m(n, 0);
        int ones = 0;
        for (int i = 0; i < n; ++i) {
          if (bits & (1u << i)) {
            m[i] = 1;
            ++ones;
          }
        }
        if (ones == scheme.s()) out.emplace_back(prob, std::move(m));
      }
      break;
    }
    case ParticipationScheme::Kind::Independent: {
      const double p = scheme.p_a();
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Mask m(n, 0);
        double prob = 1.0;
        for (int i = 0; i < n; ++i) {
          if (bits & (1u << i)) {
            m[i] = 1;
            prob *= p;
          } else {
            prob *= 1.0 - p;
          }
        }
        out.emplace_back(prob, std::move(m));
      }
      break;
    }
  }
  double total = 0.0;
  for (const auto& [q, m] : out) total += q;
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgumentError("verification: mask probabilities do not sum to 1");
  }
  return out;
}

// All K-subsets of {0..d-1} as bitmasks.
std::vector<std::uint32_t> k_subsets(int d, int K) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t bits = 0; bits < (1u << d); ++bits) {
    if (__builtin_popcount(bits) == K) out.push_back(bits);
  }
  return out;
}

}  // namespace

void EnumeratedDistribution::validate() const {
  if (probs.size() != values.size() || probs.empty()) {
    throw InvalidArgumentError("EnumeratedDistribution: outcome/probability size mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) {
      throw InvalidArgumentError("EnumeratedDistribution: negative probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgumentError("EnumeratedDistribution: probabilities must sum to 1");
  }
  for (const auto& v : values) {
    if (v.size() != values[0].size()) {
      throw InvalidArgumentError("EnumeratedDistribution: ragged outcome dimensions");
    }
  }
}

Eigen::VectorXd EnumeratedDistribution::mean() const {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(values[0].size());
  for (std::size_t k = 0; k < probs.size(); ++k) mu += probs[k] * values[k];
  return mu;
}

double EnumeratedDistribution::variance() const {
  const Eigen::VectorXd mu = mean();
  double var = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    var += probs[k] * (values[k] - mu).squaredNorm();
  }
  return var;
}

VerifyResult verify_sampling_lemma(
    const ParticipationScheme& scheme,
    const std::vector<EnumeratedDistribution>& s_dists,
    const std::vector<Eigen::VectorXd>& r, double tol) {
  const int n = scheme.n();
  if (n > kMaxNodes) {
    throw EnumerationLimitError("verify_sampling_lemma: n exceeds guard of 5");
  }
  if (static_cast<int>(s_dists.size()) != n ||
      static_cast<int>(r.size()) != n) {
    throw DimensionError("verify_sampling_lemma", n,
                         static_cast<int>(s_dists.size()));
  }
  for (const auto& dist : s_dists) dist.validate();
  const int d = static_cast<int>(s_dists[0].values[0].size());
  const double pa = scheme.p_a();
  const double paa = scheme.p_aa();

  // Left side: exhaustive joint enumeration over mask x per-node outcomes.
  const auto masks = local_masks(scheme);
  Eigen::VectorXd first = Eigen::VectorXd::Zero(d);
  double second = 0.0;
  std::vector<std::size_t> idx(n, 0);
  for (const auto& [mask_prob, mask] : masks) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double prob = mask_prob;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < n; ++i) {
        prob *= s_dists[i].probs[idx[i]];
        v += r[i];
        if (mask[i]) v += s_dists[i].values[idx[i]] / pa;
      }
      v /= n;
      first += prob * v;
      second += prob * v.squaredNorm();
      int pos = 0;
      while (pos < n && ++idx[pos] == s_dists[pos].probs.size()) {
        idx[pos] = 0;
        ++pos;
      }
      if (pos == n) break;
    }
  }
  const double lhs = second - first.squaredNorm();

  // Right side: the closed form from per-node first/second moments.
  double sum_vars = 0.0;
  double sum_mean_sq = 0.0;
  Eigen::VectorXd mean_of_means = Eigen::VectorXd::Zero(d);
  for (const auto& dist : s_dists) {
    sum_vars += dist.variance();
    const Eigen::VectorXd mu = dist.mean();
    sum_mean_sq += mu.squaredNorm();
    mean_of_means += mu;
  }
  mean_of_means /= n;
  const double nn = static_cast<double>(n) * n;
  const double rhs = sum_vars / (nn * pa) +
                     (pa - paa) / (nn * pa * pa) * sum_mean_sq +
                     (paa - pa * pa) / (pa * pa) *
                         mean_of_means.squaredNorm();

  VerifyResult res;
  res.name = "sampling-lemma variance identity";
  res.lhs = lhs;
  res.rhs = rhs;
  res.abs_diff = std::abs(lhs - rhs);
  res.pass = res.abs_diff <= tol;
  return res;
}

Section7Result verify_section7_variances(
    const std::vector<std::vector<Eigen::VectorXd>>& x, int B, int s,
    double tol) {
  const int n = static_cast<int>(x.size());
  if (n < 1 || n > 4) {
    throw EnumerationLimitError("verify_section7_variances: need 1 <= n <= 4");
  }
  const int m = static_cast<int>(x[0].size());
  if (m < 1 || m > kMaxSamples) {
    throw EnumerationLimitError("verify_section7_variances: need 1 <= m <= 4");
  }
  if (B < 1 || B > m) {
    throw InvalidArgumentError("verify_section7_variances: need 1 <= B <= m");
  }
  if (s < 1 || s > n) {
    throw InvalidArgumentError("verify_section7_variances: need 1 <= s <= n");
  }
  const int d = static_cast<int>(x[0][0].size());
  for (const auto& node : x) {
    if (static_cast<int>(node.size()) != m) {
      throw InvalidArgumentError("verify_section7_variances: ragged samples");
    }
    for (const auto& v : node) {
      if (static_cast<int>(v.size()) != d) {
        throw InvalidArgumentError("verify_section7_variances: ragged dims");
      }
    }
  }

  std::vector<Eigen::VectorXd> node_mean(n, Eigen::VectorXd::Zero(d));
  Eigen::VectorXd global_mean = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) node_mean[i] += x[i][j];
    node_mean[i] /= m;
    global_mean += node_mean[i];
  }
  global_mean /= n;

  // Per-node batch-mean variance: enumerate all m^B with-replacement tuples.
  std::vector<double> node_var(n, 0.0);
  double tuple_count = 1.0;
  for (int t = 0; t < B; ++t) tuple_count *= m;
  for (int i = 0; i < n; ++i) {
    std::vector<int> tup(B, 0);
    double acc = 0.0;
    while (true) {
      Eigen::VectorXd mean_b = Eigen::VectorXd::Zero(d);
      for (int t = 0; t < B; ++t) mean_b += x[i][tup[t]];
      mean_b /= B;
      acc += (mean_b - node_mean[i]).squaredNorm();
      int pos = 0;
      while (pos < B && ++tup[pos] == m) {
        tup[pos] = 0;
        ++pos;
      }
      if (pos == B) break;
    }
    node_var[i] = acc / tuple_count;
  }

  Section7Result res;
  // Full participation: batches are independent across nodes, so the
  // variance of the n-node average is the per-node sum over n^2.
  double full_enum = 0.0;
  for (int i = 0; i < n; ++i) full_enum += node_var[i];
  full_enum /= static_cast<double>(n) * n;
  res.full_enumerated = full_enum;

  double spread = 0.0;  // (1/(nm)) sum_ij ||x_ij - node mean||^2
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      spread += (x[i][j] - node_mean[i]).squaredNorm();
    }
  }
  spread /= static_cast<double>(n) * m;
  res.full_closed = spread / (static_cast<double>(n) * B);

  // s-of-n participation: enumerate every s-subset; conditioned on the
  // subset the batch randomness contributes (1/s^2) sum of node variances
  // plus the squared bias of the subset's node-mean average.
  double snice_enum = 0.0;
  const double subset_count = binomial(n, s);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    if (__builtin_popcount(bits) != s) continue;
    double var_term = 0.0;
    Eigen::VectorXd mean_term = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i) {
      if (bits & (1u << i)) {
        var_term += node_var[i];
        mean_term += node_mean[i];
      }
    }
    mean_term /= s;
    snice_enum += var_term / (static_cast<double>(s) * s) +
                  (mean_term - global_mean).squaredNorm();
  }
  snice_enum /= subset_count;
  res.snice_enumerated = snice_enum;

  double disp = 0.0;  // (1/n) sum_i ||node mean - global mean||^2
  for (int i = 0; i < n; ++i) {
    disp += (node_mean[i] - global_mean).squaredNorm();
  }
  disp /= n;
  res.snice_closed = spread / (static_cast<double>(s) * B);
  if (n > 1) {
    res.snice_closed +=
        static_cast<double>(n - s) / (static_cast<double>(s) * (n - 1)) * disp;
  }

  res.max_abs_diff = std::max(std::abs(res.full_enumerated - res.full_closed),
                              std::abs(res.snice_enumerated - res.snice_closed));
  res.pass = res.max_abs_diff <= tol;
  return res;
}

MomentsResult verify_compressor_moments(int d, int K, const Eigen::VectorXd& x,
                                        double tol) {
  if (d < 1 || d > kMaxDim) {
    throw EnumerationLimitError("verify_compressor_moments: need 1 <= d <= 6");
  }
  if (K < 1 || K > d) {
    throw InvalidArgumentError("verify_compressor_moments: need 1 <= K <= d");
  }
  if (x.size() != d) {
    throw DimensionError("verify_compressor_moments", d,
                         static_cast<int>(x.size()));
  }
  const auto subsets = k_subsets(d, K);
  const double count = static_cast<double>(subsets.size());
  const double scale = static_cast<double>(d) / K;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  double second = 0.0;
  for (std::uint32_t bits : subsets) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
      if (bits & (1u << j)) out[j] = scale * x[j];
    }
    mean += out;
    second += (out - x).squaredNorm();
  }
  mean /= count;
  second /= count;

  MomentsResult res;
  res.mean_abs_err = (mean - x).cwiseAbs().maxCoeff();
  res.second_moment_abs_err =
      std::abs(second - (scale - 1.0) * x.squaredNorm());
  res.pass = res.mean_abs_err <= tol && res.second_moment_abs_err <= tol;
  return res;
}

OneRoundResult verify_one_round_expectations(const ParticipationScheme& scheme,
                                             const OneRoundInputs& in,
                                             double tol) {
  const int n = scheme.n();
  if (n > kMaxNodes) {
    throw EnumerationLimitError("verify_one_round_expectations: n exceeds guard");
  }
  if (static_cast<int>(in.grad_new.size()) != n ||
      static_cast<int>(in.grad_old.size()) != n ||
      static_cast<int>(in.h.size()) != n ||
      static_cast<int>(in.g.size()) != n) {
    throw DimensionError("verify_one_round_expectations", n,
                         static_cast<int>(in.grad_new.size()));
  }
  const int d = static_cast<int>(in.grad_new[0].size());
  if (d > kMaxDim) {
    throw EnumerationLimitError("verify_one_round_expectations: d exceeds guard");
  }
  if (in.rand_k && (in.K < 1 || in.K > d)) {
    throw InvalidArgumentError("verify_one_round_expectations: bad K");
  }
  const double pa = scheme.p_a();

  std::vector<Eigen::VectorXd> k(n), u(n);
  for (int i = 0; i < n; ++i) {
    k[i] = in.grad_new[i] - in.grad_old[i] -
           in.b * (in.h[i] - in.grad_old[i]);
    u[i] = k[i] / pa - (in.a / pa) * (in.g[i] - in.h[i]);
  }

  const auto masks = local_masks(scheme);
  const auto subsets = in.rand_k ? k_subsets(d, in.K)
                                 : std::vector<std::uint32_t>{(1u << d) - 1};
  const double scale = in.rand_k ? static_cast<double>(d) / in.K : 1.0;
  const double subset_prob = 1.0 / static_cast<double>(subsets.size());

  std::vector<Eigen::VectorXd> exp_h(n, Eigen::VectorXd::Zero(d));
  std::vector<Eigen::VectorXd> exp_g(n, Eigen::VectorXd::Zero(d));

  for (const auto& [mask_prob, mask] : masks) {
    // Odometer over one subset choice per participating node.
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
      if (mask[i]) active.push_back(i);
    }
    std::vector<std::size_t> pick(active.size(), 0);
    while (true) {
      double prob = mask_prob;
      for (std::size_t t = 0; t < active.size(); ++t) prob *= subset_prob;
      std::vector<Eigen::VectorXd> h_next = in.h;
      std::vector<Eigen::VectorXd> g_next = in.g;
      for (std::size_t t = 0; t < active.size(); ++t) {
        const int i = active[t];
        const std::uint32_t bits = subsets[pick[t]];
        h_next[i] = in.h[i] + k[i] / pa;
        Eigen::VectorXd msg = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < d; ++j) {
          if (bits & (1u << j)) msg[j] = scale * u[i][j];
        }
        g_next[i] = in.g[i] + msg;
      }
      for (int i = 0; i < n; ++i) {
        exp_h[i] += prob * h_next[i];
        exp_g[i] += prob * g_next[i];
      }
      if (active.empty()) break;
      std::size_t pos = 0;
      while (pos < active.size() && ++pick[pos] == subsets.size()) {
        pick[pos] = 0;
        ++pos;
      }
      if (pos == active.size()) break;
    }
  }

  OneRoundResult res;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd want_h = in.h[i] + k[i];
    const Eigen::VectorXd want_g =
        in.g[i] + k[i] - in.a * (in.g[i] - in.h[i]);
    res.max_h_err =
        std::max(res.max_h_err, (exp_h[i] - want_h).cwiseAbs().maxCoeff());
    res.max_g_err =
        std::max(res.max_g_err, (exp_g[i] - want_g).cwiseAbs().maxCoeff());
  }
  res.pass = res.max_h_err <= tol && res.max_g_err <= tol;
  return res;
}

namespace {

EnumeratedDistribution random_two_point(int d, Rng& rng) {
  EnumeratedDistribution dist;
  const double p = 0.05 + 0.9 * rng.uniform();
  dist.probs = {p, 1.0 - p};
  Eigen::VectorXd v0(d), v1(d);
  for (int j = 0; j < d; ++j) {
    v0[j] = 2.0 * rng.uniform() - 1.0;
    v1[j] = 2.0 * rng.uniform() - 1.0;
  }
  dist.values = {v0, v1};
  return dist;
}

VerifyResult summarize(const std::string& name, double err, double tol) {
  VerifyResult r;
  r.name = name;
  r.abs_diff = err;
  r.pass = err <= tol;
  return r;
}

}  // namespace

std::vector<VerifyResult> verify_standard_battery(std::uint64_t seed) {
  std::vector<VerifyResult> out;
  Rng rng(seed);

  {
    double worst = 0.0;
    for (int d = 1; d <= kMaxDim; ++d) {
      for (int K = 1; K <= d; ++K) {
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) x[j] = 2.0 * rng.uniform() - 1.0;
        const auto res = verify_compressor_moments(d, K, x);
        worst = std::max(
            worst, std::max(res.mean_abs_err, res.second_moment_abs_err));
      }
    }
    out.push_back(summarize("compressor moment equalities (all d <= 6)",
                            worst, 1e-12));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const int n = 2 + static_cast<int>(rng.uniform_index(3));
      const int d = 1 + static_cast<int>(rng.uniform_index(3));
      std::vector<EnumeratedDistribution> dists;
      std::vector<Eigen::VectorXd> r;
      for (int i = 0; i < n; ++i) {
        dists.push_back(random_two_point(d, rng));
        Eigen::VectorXd ri(d);
        for (int j = 0; j < d; ++j) ri[j] = 2.0 * rng.uniform() - 1.0;
        r.push_back(ri);
      }
      const int s = 1 + static_cast<int>(rng.uniform_index(n));
      const auto schemes = {
          ParticipationScheme::s_nice(n, s),
          ParticipationScheme::independent(n, 0.25 + 0.5 * rng.uniform())};
      for (const auto& scheme : schemes) {
        worst = std::max(worst,
                         verify_sampling_lemma(scheme, dists, r).abs_diff);
      }
    }
    out.push_back(
        summarize("sampling-lemma variance identity (random cases)", worst,
                  1e-12));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const int n = 2 + static_cast<int>(rng.uniform_index(3));
      const int m = 2 + static_cast<int>(rng.uniform_index(3));
      const int d = 1 + static_cast<int>(rng.uniform_index(3));
      const int B = 1 + static_cast<int>(rng.uniform_index(m));
      const int s = 1 + static_cast<int>(rng.uniform_index(n));
      std::vector<std::vector<Eigen::VectorXd>> x(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          Eigen::VectorXd v(d);
          for (int c = 0; c < d; ++c) v[c] = 2.0 * rng.uniform() - 1.0;
          x[i].push_back(v);
        }
      }
      worst = std::max(worst,
                       verify_section7_variances(x, B, s).max_abs_diff);
    }
    out.push_back(summarize(
        "mean-estimation variance formulas (full and s-of-n)", worst, 1e-12));
  }

  {
    double worst = 0.0;
    for (const bool rand_k : {false, true}) {
      for (const int scheme_case : {0, 1, 2}) {
        const int n = 2;
        const int d = 2;
        OneRoundInputs in;
        in.a = 0.4;
        in.b = 0.7;
        in.rand_k = rand_k;
        in.K = 1;
        for (int i = 0; i < n; ++i) {
          Eigen::VectorXd gn(d), go(d), h(d), g(d);
          for (int j = 0; j < d; ++j) {
            gn[j] = 2.0 * rng.uniform() - 1.0;
            go[j] = 2.0 * rng.uniform() - 1.0;
            h[j] = 2.0 * rng.uniform() - 1.0;
            g[j] = 2.0 * rng.uniform() - 1.0;
          }
          in.grad_new.push_back(gn);
          in.grad_old.push_back(go);
          in.h.push_back(h);
          in.g.push_back(g);
        }
        const ParticipationScheme scheme =
            scheme_case == 0   ? ParticipationScheme::full(n)
            : scheme_case == 1 ? ParticipationScheme::s_nice(n, 1)
                               : ParticipationScheme::independent(n, 0.5);
        const auto res = verify_one_round_expectations(scheme, in);
        worst = std::max(worst, std::max(res.max_h_err, res.max_g_err));
      }
    }
    out.push_back(
        summarize("one-round estimator tracking identities", worst, 1e-12));
  }

  return out;
}

}  // namespace dashapp

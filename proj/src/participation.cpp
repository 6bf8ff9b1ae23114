#include "dashapp/participation.hpp"

#include <cmath>

#include "dashapp/compressors.hpp"
#include "dashapp/errors.hpp"

namespace dashapp {

namespace {

constexpr int kEnumLimit = 12;

}  // namespace

ParticipationScheme ParticipationScheme::full(int n) {
  if (n < 1) throw InvalidArgumentError("ParticipationScheme: n must be >= 1");
  return ParticipationScheme(Kind::Full, n, n, 1.0);
}

ParticipationScheme ParticipationScheme::s_nice(int n, int s) {
  if (n < 1) throw InvalidArgumentError("ParticipationScheme: n must be >= 1");
  if (s < 1 || s > n) {
    throw InvalidArgumentError(
        "ParticipationScheme::s_nice: s must satisfy 1 <= s <= n");
  }
  return ParticipationScheme(Kind::SNice, n, s, static_cast<double>(s) / n);
}

ParticipationScheme ParticipationScheme::independent(int n, double p) {
  if (n < 1) throw InvalidArgumentError("ParticipationScheme: n must be >= 1");
  if (!(p > 0.0) || p > 1.0) {
    throw InvalidArgumentError(
        "ParticipationScheme::independent: p must lie in (0, 1]");
  }
  return ParticipationScheme(Kind::Independent, n, n, p);
}

Mask ParticipationScheme::sample_round(Rng& rng) const {
  Mask mask(n_, 0);
  switch (kind_) {
    case Kind::Full:
      for (auto& b : mask) b = 1;
      break;
    case Kind::SNice: {
      for (int i : sample_subset_without_replacement(n_, s_, rng)) mask[i] = 1;
      break;
    }
    case Kind::Independent:
      for (auto& b : mask) b = rng.bernoulli(p_) ? 1 : 0;
      break;
  }
  return mask;
}

double ParticipationScheme::p_a() const {
  switch (kind_) {
    case Kind::Full:
      return 1.0;
    case Kind::SNice:
      return static_cast<double>(s_) / n_;
    case Kind::Independent:
      return p_;
  }
  return 1.0;
}

double ParticipationScheme::p_aa() const {
  switch (kind_) {
    case Kind::Full:
      return 1.0;
    case Kind::SNice:
      if (n_ == 1) return 1.0;  // no pairs; convention: matches full
      return static_cast<double>(s_) * (s_ - 1) /
             (static_cast<double>(n_) * (n_ - 1));
    case Kind::Independent:
      return p_ * p_;
  }
  return 1.0;
}

double ParticipationScheme::pp_indicator() const {
  const double ratio = p_aa() / p_a();
  return std::sqrt(std::max(0.0, 1.0 - ratio));
}

std::vector<std::pair<double, Mask>> ParticipationScheme::enumerate_masks()
    const {
  if (kind_ == Kind::Full) {
    return {{1.0, Mask(n_, 1)}};
  }
  if (n_ > kEnumLimit) {
    throw EnumerationLimitError(
        "ParticipationScheme::enumerate_masks: n > 12");
  }
  std::vector<std::pair<double, Mask>> out;
  if (kind_ == Kind::SNice) {
    // 1 / C(n, s) for each s-subset.
    double count = 1.0;
    for (int t = 0; t < s_; ++t) {
      count = count * (n_ - t) / (t + 1);
    }
    const double prob = 1.0 / count;
    for (std::uint32_t bits = 0; bits < (1u << n_); ++bits) {
      Mask mask(n_, 0);
      int ones = 0;
      for (int i = 0; i < n_; ++i) {
        if (bits & (1u << i)) {
          mask[i] = 1;
          ++ones;
        }
      }
      if (ones == s_) out.emplace_back(prob, std::move(mask));
    }
    return out;
  }
  for (std::uint32_t bits = 0; bits < (1u << n_); ++bits) {
    Mask mask(n_, 0);
    double prob = 1.0;
    for (int i = 0; i < n_; ++i) {
      if (bits & (1u << i)) {
        mask[i] = 1;
        prob *= p_;
      } else {
        prob *= 1.0 - p_;
      }
    }
    out.emplace_back(prob, std::move(mask));
  }
  return out;
}

double ParticipationScheme::pp_mean_variance_oracle(
    const std::vector<Eigen::VectorXd>& s_means,
    const std::vector<double>& s_vars) const {
  if (static_cast<int>(s_means.size()) != n_ ||
      static_cast<int>(s_vars.size()) != n_) {
    throw DimensionError("pp_mean_variance_oracle", n_,
                         static_cast<int>(s_means.size()));
  }
  if (kind_ == Kind::SNice && n_ > kEnumLimit) {
    throw EnumerationLimitError(
        "pp_mean_variance_oracle: SNice guarded to n <= 12");
  }
  const double pa = p_a();
  const double paa = p_aa();
  const double n = static_cast<double>(n_);

  double sum_vars = 0.0;
  for (double v : s_vars) sum_vars += v;

  double sum_mean_sq = 0.0;
  Eigen::VectorXd mean_of_means = Eigen::VectorXd::Zero(s_means[0].size());
  for (const auto& mu : s_means) {
    if (mu.size() != mean_of_means.size()) {
      throw DimensionError("pp_mean_variance_oracle: ragged means",
                           static_cast<int>(mean_of_means.size()),
                           static_cast<int>(mu.size()));
    }
    sum_mean_sq += mu.squaredNorm();
    mean_of_means += mu;
  }
  mean_of_means /= n;

  return sum_vars / (n * n * pa) +
         (pa - paa) / (n * n * pa * pa) * sum_mean_sq +
         (paa - pa * pa) / (pa * pa) * mean_of_means.squaredNorm();
}

}  // namespace dashapp

#include <doctest.h>

#include <Eigen/Core>
#include <vector>

#include "dashapp/errors.hpp"
#include "dashapp/participation.hpp"
#include "dashapp/verification.hpp"

using namespace dashapp;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Point mass at a single vector.
EnumeratedDistribution point(const Eigen::VectorXd& v) {
  return EnumeratedDistribution{{1.0}, {v}};
}

}  // namespace

TEST_CASE("enumerated distribution: moments of a worked example") {
  EnumeratedDistribution dist{{0.25, 0.75}, {vec2(1, 0), vec2(0, 2)}};
  dist.validate();
  CHECK(dist.mean()(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(dist.mean()(1) == doctest::Approx(1.5).epsilon(1e-15));
  // 0.25*(0.75^2 + 1.5^2) + 0.75*(0.25^2 + 0.5^2) = 0.9375
  CHECK(dist.variance() == doctest::Approx(0.9375).epsilon(1e-14));
}

TEST_CASE("enumerated distribution: validation rejects malformed inputs") {
  CHECK_THROWS_AS(EnumeratedDistribution{}.validate(), InvalidArgumentError);

  EnumeratedDistribution mismatch{{1.0}, {vec1(0), vec1(1)}};
  CHECK_THROWS_AS(mismatch.validate(), InvalidArgumentError);

  EnumeratedDistribution negative{{-0.5, 1.5}, {vec1(0), vec1(1)}};
  CHECK_THROWS_AS(negative.validate(), InvalidArgumentError);

  EnumeratedDistribution off_total{{0.5, 0.4}, {vec1(0), vec1(1)}};
  CHECK_THROWS_AS(off_total.validate(), InvalidArgumentError);

  EnumeratedDistribution ragged{{0.5, 0.5}, {vec1(0), vec2(1, 2)}};
  CHECK_THROWS_AS(ragged.validate(), InvalidArgumentError);
}

TEST_CASE("compressor moments oracle: worked example and all small shapes") {
  // d=2, K=1, x=(3,4): both unbiasedness and the (d/K - 1)||x||^2 second
  // moment come out exactly 25 = 1 * 25.
  auto res = verify_compressor_moments(2, 1, vec2(3, 4));
  CHECK(res.pass);
  CHECK(res.mean_abs_err <= 1e-14);
  CHECK(res.second_moment_abs_err <= 1e-12);

  for (int d = 1; d <= 6; ++d) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = 0.3 * j - 1.1;
    for (int K = 1; K <= d; ++K) {
      CHECK(verify_compressor_moments(d, K, x).pass);
    }
  }
}

TEST_CASE("compressor moments oracle: guards") {
  CHECK_THROWS_AS(verify_compressor_moments(7, 1, Eigen::VectorXd::Zero(7)),
                  EnumerationLimitError);
  CHECK_THROWS_AS(verify_compressor_moments(3, 0, Eigen::VectorXd::Zero(3)),
                  InvalidArgumentError);
  CHECK_THROWS_AS(verify_compressor_moments(3, 4, Eigen::VectorXd::Zero(3)),
                  InvalidArgumentError);
  CHECK_THROWS_AS(verify_compressor_moments(3, 1, Eigen::VectorXd::Zero(2)),
                  DimensionError);
}

TEST_CASE("sampling-lemma oracle: single node with unit coin flip") {
  // One always-participating node, zero shift: the estimator is the coin
  // itself, so both sides must equal its variance, exactly 1.
  EnumeratedDistribution coin{{0.5, 0.5}, {vec1(1), vec1(-1)}};
  auto res = verify_sampling_lemma(ParticipationScheme::full(1), {coin},
                                   {vec1(0)});
  CHECK(res.pass);
  CHECK(res.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(res.rhs == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sampling-lemma oracle: deterministic summands, 1-of-2 scheme") {
  // Point masses +2 and -2, p_a = 1/2: the only randomness is which node
  // participates, giving (1/2)(s_i/p_a) = +-2, variance 4.  The closed form
  // reproduces it entirely through its middle term.
  auto res = verify_sampling_lemma(ParticipationScheme::s_nice(2, 1),
                                   {point(vec1(2)), point(vec1(-2))},
                                   {vec1(0), vec1(0)});
  CHECK(res.pass);
  CHECK(res.lhs == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(res.rhs == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("sampling-lemma oracle: nonzero shifts cancel") {
  // The r_i enter both sides only through the mean, so any shift leaves the
  // identity intact.
  EnumeratedDistribution coin{{0.3, 0.7}, {vec2(1, -2), vec2(-0.5, 0.25)}};
  std::vector<EnumeratedDistribution> dists = {coin, coin, coin};
  std::vector<Eigen::VectorXd> r = {vec2(5, -1), vec2(0.25, 8), vec2(-3, 2)};
  for (const auto& scheme :
       {ParticipationScheme::s_nice(3, 2),
        ParticipationScheme::independent(3, 0.35),
        ParticipationScheme::full(3)}) {
    auto res = verify_sampling_lemma(scheme, dists, r);
    CHECK(res.pass);
    CHECK(res.abs_diff <= 1e-12);
  }
}

TEST_CASE("sampling-lemma oracle: guards") {
  std::vector<EnumeratedDistribution> dists(6, point(vec1(0)));
  std::vector<Eigen::VectorXd> r(6, vec1(0));
  CHECK_THROWS_AS(
      verify_sampling_lemma(ParticipationScheme::s_nice(6, 2), dists, r),
      EnumerationLimitError);
  CHECK_THROWS_AS(verify_sampling_lemma(ParticipationScheme::full(2),
                                        {point(vec1(0))}, {vec1(0)}),
                  DimensionError);
}

TEST_CASE("mean-estimation oracle: worked example") {
  // Two nodes with samples {0,2} and {1,3}, B=1: node means 1 and 2,
  // within-node spread 1, so the full-participation variance is 1/2 and the
  // 1-of-2 variance is 1 + dispersion 0.25 = 1.25.
  std::vector<std::vector<Eigen::VectorXd>> x = {{vec1(0), vec1(2)},
                                                 {vec1(1), vec1(3)}};
  auto res = verify_section7_variances(x, 1, 1);
  CHECK(res.pass);
  CHECK(res.full_closed == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(res.full_enumerated == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(res.snice_closed == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(res.snice_enumerated == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("mean-estimation oracle: everyone-participates degeneracy") {
  // With s = n the s-of-n formula must collapse to the independent-batches
  // formula: the dispersion coefficient (n-s)/(s(n-1)) vanishes.
  std::vector<std::vector<Eigen::VectorXd>> x = {
      {vec2(0.5, -1), vec2(2, 0.25), vec2(-1, 1)},
      {vec2(1, 1), vec2(0, -2), vec2(3, 0)},
      {vec2(-2, 0.5), vec2(0.75, 0.75), vec2(1, -1)}};
  for (int B = 1; B <= 3; ++B) {
    auto res = verify_section7_variances(x, B, 3);
    CHECK(res.pass);
    CHECK(res.snice_closed == doctest::Approx(res.full_closed).epsilon(1e-14));
    CHECK(res.snice_enumerated ==
          doctest::Approx(res.full_enumerated).epsilon(1e-12));
  }
}

TEST_CASE("mean-estimation oracle: guards") {
  std::vector<std::vector<Eigen::VectorXd>> big(5, {vec1(0)});
  CHECK_THROWS_AS(verify_section7_variances(big, 1, 1), EnumerationLimitError);

  std::vector<std::vector<Eigen::VectorXd>> wide(
      2, std::vector<Eigen::VectorXd>(5, vec1(0)));
  CHECK_THROWS_AS(verify_section7_variances(wide, 1, 1),
                  EnumerationLimitError);

  std::vector<std::vector<Eigen::VectorXd>> ok(2, {vec1(0), vec1(1)});
  CHECK_THROWS_AS(verify_section7_variances(ok, 3, 1), InvalidArgumentError);
  CHECK_THROWS_AS(verify_section7_variances(ok, 1, 3), InvalidArgumentError);

  std::vector<std::vector<Eigen::VectorXd>> ragged = {{vec1(0), vec1(1)},
                                                      {vec1(0)}};
  CHECK_THROWS_AS(verify_section7_variances(ragged, 1, 1),
                  InvalidArgumentError);
}

TEST_CASE("one-round oracle: identity and sparse messages, every scheme") {
  OneRoundInputs in;
  in.a = 0.3;
  in.b = 0.6;
  in.grad_new = {vec2(1, -1), vec2(0.5, 2), vec2(-2, 0.25)};
  in.grad_old = {vec2(0.5, -2), vec2(1, 1), vec2(-1, 0.5)};
  in.h = {vec2(0.25, -1.5), vec2(0.75, 1.5), vec2(-1.5, 0.4)};
  in.g = {vec2(0.1, -1.2), vec2(0.9, 1.1), vec2(-1.2, 0.3)};

  for (const auto& scheme :
       {ParticipationScheme::full(3), ParticipationScheme::s_nice(3, 2),
        ParticipationScheme::s_nice(3, 1),
        ParticipationScheme::independent(3, 0.4)}) {
    CAPTURE(scheme.p_a());
    auto plain = verify_one_round_expectations(scheme, in);
    CHECK(plain.pass);
    CHECK(plain.max_h_err <= 1e-12);
    CHECK(plain.max_g_err <= 1e-12);

    auto sparse = in;
    sparse.rand_k = true;
    sparse.K = 1;
    auto res = verify_one_round_expectations(scheme, sparse);
    CHECK(res.pass);
    CHECK(res.max_g_err <= 1e-12);
  }
}

TEST_CASE("one-round oracle: guards") {
  OneRoundInputs in;
  in.grad_new = {vec1(0)};
  in.grad_old = {vec1(0)};
  in.h = {vec1(0)};
  in.g = {vec1(0)};

  auto wide = in;
  wide.grad_new = {Eigen::VectorXd::Zero(7)};
  wide.grad_old = {Eigen::VectorXd::Zero(7)};
  wide.h = {Eigen::VectorXd::Zero(7)};
  wide.g = {Eigen::VectorXd::Zero(7)};
  CHECK_THROWS_AS(
      verify_one_round_expectations(ParticipationScheme::full(1), wide),
      EnumerationLimitError);

  auto bad_k = in;
  bad_k.rand_k = true;
  bad_k.K = 2;  // exceeds d = 1
  CHECK_THROWS_AS(
      verify_one_round_expectations(ParticipationScheme::full(1), bad_k),
      InvalidArgumentError);

  CHECK_THROWS_AS(
      verify_one_round_expectations(ParticipationScheme::full(2), in),
      DimensionError);
}

TEST_CASE("standard battery: four groups, all passing, for several seeds") {
  for (std::uint64_t seed : {1ull, 7ull, 123456789ull}) {
    auto results = verify_standard_battery(seed);
    REQUIRE(results.size() == 4);
    for (const auto& r : results) {
      CAPTURE(r.name);
      CHECK_FALSE(r.name.empty());
      CHECK(r.pass);
      CHECK(r.abs_diff <= 1e-12);
    }
  }
}

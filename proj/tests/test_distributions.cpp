#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "majorate/distributions.hpp"
#include "majorate/error.hpp"
#include "support.hpp"

using namespace majorate;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("make_prob_vec validates and renormalises") {
  const ProbVec u = make_prob_vec({0.5, 0.5});
  CHECK(u.dim() == 2);
  CHECK(make_prob_vec({1.0}).dim() == 1);
  CHECK(code_of([] { make_prob_vec({0.7, 0.4}); }) == ErrorCode::NotNormalised);
  CHECK(code_of([] { make_prob_vec({1.1, -0.1}); }) == ErrorCode::NegativeEntry);
  const ProbVec clamped = make_prob_vec({1.0 + 1e-13, -1e-13});
  CHECK(clamped[1] == 0.0);
  CHECK(std::abs(clamped[0] - 1.0) < 1e-15);
}

TEST_CASE("from_amplitudes squares moduli") {
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<double> bell{r, r};
  CHECK(from_amplitudes(bell)[0] == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> prod{1.0, 0.0};
  CHECK(from_amplitudes(prod)[0] == 1.0);
  const std::vector<double> signed_amp{std::sqrt(0.9), -std::sqrt(0.1)};
  const ProbVec p = from_amplitudes(signed_amp);
  CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("sort_desc keeps a permutation back to the original") {
  const ProbVec p = make_prob_vec({0.2, 0.5, 0.3});
  const SortedProbVec s = sort_desc(p);
  CHECK(s.entries == std::vector<double>{0.5, 0.3, 0.2});
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[s.permutation[i]] == s.entries[i]);
}

TEST_CASE("embedding splits outcomes by rational weights") {
  const std::vector<Rational> half{{1, 2}, {1, 2}};
  const GibbsSpec g1 = GibbsSpec::from_weights(half);
  const ProbVec e1 = embed(make_prob_vec({0.5, 0.5}), g1);
  CHECK(e1.dim() == 2);
  CHECK(e1[0] == 0.5);

  const std::vector<Rational> w{{2, 3}, {1, 3}};
  const GibbsSpec g = GibbsSpec::from_weights(w);
  CHECK(g.embedded_dim() == 3);
  const ProbVec e = embed(make_prob_vec({0.9, 0.1}), g);
  REQUIRE(e.dim() == 3);
  CHECK(e[0] == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(0.1).epsilon(1e-15));

  const ProbVec eta = embed(g.gamma(), g);
  for (double x : eta.entries()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK(code_of([&] { embed(make_prob_vec({0.2, 0.3, 0.5}), g); }) ==
        ErrorCode::DimensionMismatch);
  const GibbsSpec thermal = GibbsSpec::from_energies({0.0, 1.0}, 1.0);
  CHECK(code_of([&] { embed(make_prob_vec({0.5, 0.5}), thermal); }) ==
        ErrorCode::IrrationalWeights);
  const std::vector<Rational> bad{{1, 2}, {1, 3}};
  CHECK(code_of([&] { GibbsSpec::from_weights(bad); }) == ErrorCode::NotNormalised);
}

TEST_CASE("energies and rational weights must agree") {
  const std::vector<Rational> w{{2, 3}, {1, 3}};
  const GibbsSpec g = GibbsSpec::from_energies_and_weights({0.0, std::log(2.0)}, 1.0, w);
  CHECK(g.beta().value() == 1.0);
  CHECK(g.embedded_dim() == 3);
  CHECK(code_of([&] { GibbsSpec::from_energies_and_weights({0.0, 1.0}, 1.0, w); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("embedding preserves total mass") {
  std::mt19937_64 rng(7);
  const std::vector<Rational> w{{1, 6}, {1, 3}, {1, 2}};
  const GibbsSpec g = GibbsSpec::from_weights(w);
  for (int t = 0; t < 50; ++t) {
    const ProbVec p = testing::random_prob_vec(rng, 3);
    const ProbVec e = embed(p, g);
    CHECK(std::accumulate(e.entries().begin(), e.entries().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("tensor_product type classes") {
  const ProductDist u = tensor_power(make_prob_vec({0.5, 0.5}), 2);
  REQUIRE(u.class_count() == 1);
  CHECK(u.classes()[0].log_prob == doctest::Approx(std::log(0.25)).epsilon(1e-15));
  CHECK(u.classes()[0].multiplicity == 4);

  const ProductDist p2 = tensor_power(make_prob_vec({0.75, 0.25}), 2);
  REQUIRE(p2.class_count() == 3);
  CHECK(std::exp(p2.classes()[0].log_prob) == doctest::Approx(0.5625).epsilon(1e-14));
  CHECK(std::exp(p2.classes()[1].log_prob) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(std::exp(p2.classes()[2].log_prob) == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(p2.classes()[0].multiplicity == 1);
  CHECK(p2.classes()[1].multiplicity == 2);
  CHECK(p2.classes()[2].multiplicity == 1);

  const std::vector<Factor> fs{{make_prob_vec({0.75, 0.25}), 1}, {sharp(2), 3}};
  const ProductDist absorbed = tensor_product(fs);
  REQUIRE(absorbed.class_count() == 2);
  CHECK(absorbed.support_size() == 2);
  CHECK(absorbed.outcome_count() == 16);
  CHECK(std::exp(absorbed.classes()[0].log_prob) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("multiplicities sum to the outcome count") {
  const std::vector<Factor> fs{{make_prob_vec({0.5, 0.3, 0.2}), 40},
                               {make_prob_vec({0.6, 0.4}), 25}};
  const ProductDist d = tensor_product(fs);
  BigInt total = 0;
  for (const TypeClass& c : d.classes()) total += c.multiplicity;
  CHECK(total == d.outcome_count());
  CHECK(d.outcome_count() == boost::multiprecision::pow(BigInt(3), 40) *
                                 boost::multiprecision::pow(BigInt(2), 25));
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < d.class_count(); ++i) {
    CHECK(d.classes()[i].log_prob < d.classes()[i - 1].log_prob);
  }
}

TEST_CASE("large powers stay exact") {
  const ProductDist d = tensor_power(make_prob_vec({0.75, 0.25}), 1000);
  CHECK(d.class_count() == 1001);
  CHECK(d.outcome_count() == boost::multiprecision::pow(BigInt(2), 1000));
  CHECK(d.support_size() == d.outcome_count());
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.log_outcome_count() == doctest::Approx(1000 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("class cap is enforced") {
  ProductOptions opt;
  opt.class_cap = 100;
  CHECK(code_of([&] { tensor_power(make_prob_vec({0.5, 0.3, 0.2}), 30, opt); }) ==
        ErrorCode::ClassExplosion);
}

TEST_CASE("prefix sums at rank") {
  const ProductDist u = tensor_power(make_prob_vec({0.5, 0.5}), 2);
  CHECK(u.prefix_sum_at_rank(2) == doctest::Approx(0.5).epsilon(1e-15));
  const ProductDist p2 = tensor_power(make_prob_vec({0.75, 0.25}), 2);
  CHECK(p2.prefix_sum_at_rank(1) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(p2.prefix_sum_at_rank(4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p2.prefix_sum_at_rank(0) == 0.0);
  CHECK(code_of([&] { p2.prefix_sum_at_rank(5); }) == ErrorCode::RankOutOfRange);
  CHECK(p2.prefix_sum_at_log_rank(std::log(2.5)) ==
        doctest::Approx(0.5625 + 0.1875 * 1.5).epsilon(1e-14));
  CHECK(std::exp(p2.log_tail_after_rank(1)) == doctest::Approx(0.4375).epsilon(1e-14));
  CHECK(std::exp(p2.log_tail_after_log_rank(std::log(2.5))) ==
        doctest::Approx(0.1875 * 0.5 + 0.0625).epsilon(1e-14));
}

TEST_CASE("prefix sums match dense enumeration for d = 2, n <= 16") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 16; ++n) {
    const ProbVec p = testing::random_prob_vec(rng, 2);
    std::vector<double> dense = testing::dense_power(p, n);
    std::sort(dense.begin(), dense.end(), std::greater<>());
    const ProductDist d = tensor_power(p, static_cast<std::uint32_t>(n));
    double run = 0.0;
    for (std::size_t k = 1; k <= dense.size(); ++k) {
      run += dense[k - 1];
      CHECK(std::abs(d.prefix_sum_at_rank(BigInt(k)) - run) < 1e-10);
    }
  }
}

TEST_CASE("prefix sums are monotone and reach one") {
  const ProductDist d = tensor_power(make_prob_vec({0.6, 0.3, 0.1}), 12);
  double prev = 0.0;
  for (std::size_t i = 0; i < d.class_count(); ++i) {
    const double v = d.prefix_sum_at_rank(d.cumulative_count(i));
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  CHECK(d.prefix_sum_at_rank(d.outcome_count()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("densify reproduces sorted dense vector") {
  const ProbVec p = make_prob_vec({0.7, 0.2, 0.1});
  const ProductDist d = tensor_power(p, 5);
  std::vector<double> dense = testing::dense_power(p, 5);
  std::sort(dense.begin(), dense.end(), std::greater<>());
  const std::vector<double> got = d.densify();
  REQUIRE(got.size() == dense.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(dense[i]));
}

TEST_CASE("big integer log helpers") {
  const BigInt big = boost::multiprecision::pow(BigInt(3), 2000);
  CHECK(log_big(big) == doctest::Approx(2000 * std::log(3.0)).epsilon(1e-14));
  CHECK(log_big(BigInt(0)) == -std::numeric_limits<double>::infinity());
  const BigInt back = big_from_log(2000 * std::log(3.0));
  CHECK(log_big(back) == doctest::Approx(2000 * std::log(3.0)).epsilon(1e-14));
  CHECK(big_from_log(std::log(10.5)) == 10);
  CHECK(big_ceil_from_log(std::log(10.5)) == 11);
}

#include <doctest.h>

#include <cmath>

#include "majorate/error.hpp"
#include "majorate/majorisation.hpp"
#include "support.hpp"

using namespace majorate;

TEST_CASE("majorises") {
  CHECK(majorises(make_prob_vec({1.0, 0.0}), make_prob_vec({0.3, 0.7})));
  CHECK_FALSE(majorises(make_prob_vec({0.5, 0.5}), make_prob_vec({1.0, 0.0})));
  CHECK(majorises(make_prob_vec({0.6, 0.4, 0.0}), make_prob_vec({0.5, 0.3, 0.2})));
  CHECK(majorises(make_prob_vec({0.5, 0.5}), uniform(4)));
  CHECK_FALSE(majorises(uniform(4), make_prob_vec({0.5, 0.5})));
}

TEST_CASE("majorises_product") {
  const ProductDist a = tensor_power(make_prob_vec({0.75, 0.25}), 2);
  CHECK(majorises_product(a, a));
  CHECK(majorises_product(tensor_power(sharp(2), 1), tensor_power(uniform(2), 1)));
  const std::vector<Factor> fs{{make_prob_vec({0.8, 0.2}), 1}, {make_prob_vec({0.7, 0.3}), 1}};
  const ProductDist b = tensor_product(fs);
  const ProbVec da = kron(make_prob_vec({0.75, 0.25}), make_prob_vec({0.75, 0.25}));
  const ProbVec db = kron(make_prob_vec({0.8, 0.2}), make_prob_vec({0.7, 0.3}));
  CHECK(majorises(da, db) == majorises_product(a, b));
  CHECK_FALSE(majorises_product(a, b));
}

TEST_CASE("product majorisation agrees with dense checks") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 60; ++t) {
    const ProbVec p = testing::random_prob_vec(rng, 2);
    const ProbVec q = testing::random_prob_vec(rng, 2);
    const int n = 1 + t % 6;
    const ProductDist A = tensor_power(p, n);
    const ProductDist B = tensor_power(q, n);
    const ProbVec da = make_prob_vec(testing::dense_power(p, n));
    const ProbVec db = make_prob_vec(testing::dense_power(q, n));
    CHECK(majorises(da, db) == majorises_product(A, B));
    const double dense_eps = min_epsilon_post(da, db, Metric::tvd).epsilon;
    CHECK(std::abs(dense_eps - min_epsilon_post(A, B, Metric::tvd).epsilon) < 1e-12);
  }
}

TEST_CASE("distances") {
  const ProbVec a = make_prob_vec({0.9, 0.1});
  CHECK(tvd(a, a) == 0.0);
  CHECK(tvd(make_prob_vec({1.0, 0.0}), make_prob_vec({0.0, 1.0})) == 1.0);
  CHECK(tvd(a, make_prob_vec({0.7, 0.3})) == doctest::Approx(0.2));
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK(fidelity(make_prob_vec({1.0, 0.0}), make_prob_vec({0.0, 1.0})) == 0.0);
  CHECK(fidelity(uniform(2), make_prob_vec({1.0, 0.0})) == doctest::Approx(0.5));
}

TEST_CASE("minimal epsilon examples") {
  const ProbVec u = uniform(2);
  const ProbVec s = make_prob_vec({1.0, 0.0});
  const ApproxMajResult trivial = min_epsilon_post(s, u, Metric::tvd);
  CHECK(trivial.epsilon == 0.0);
  CHECK(trivial.witness == u);

  const ApproxMajResult post = min_epsilon_post(u, s, Metric::tvd);
  CHECK(post.epsilon == doctest::Approx(0.5));
  CHECK(post.witness[0] == doctest::Approx(0.5));

  const ApproxMajResult r = min_epsilon_post(make_prob_vec({0.7, 0.3}), make_prob_vec({0.9, 0.1}),
                                             Metric::tvd);
  CHECK(r.epsilon == doctest::Approx(0.2));
  CHECK(r.witness[0] == doctest::Approx(0.7));

  const ApproxMajResult pre = min_epsilon_pre(u, s, Metric::tvd);
  CHECK(pre.epsilon == doctest::Approx(0.5));
  CHECK(pre.witness[0] == doctest::Approx(1.0));

  const ApproxMajResult fid = min_epsilon_post(u, s, Metric::infidelity);
  CHECK(fid.epsilon == doctest::Approx(0.5));
  CHECK(brute_force_min_epsilon(u, s, Metric::infidelity) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(brute_force_min_epsilon(make_prob_vec({0.7, 0.3}), make_prob_vec({0.9, 0.1}),
                                Metric::tvd) == doctest::Approx(0.2));
  CHECK(brute_force_min_epsilon(u, u, Metric::tvd) == 0.0);
}

TEST_CASE("infidelity is refused on product distributions") {
  const ProductDist a = tensor_power(uniform(2), 3);
  bool threw = false;
  try {
    min_epsilon_post(a, a, Metric::infidelity);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::MetricUnsupported;
  }
  CHECK(threw);
}

TEST_CASE("oracle is limited to dimension four") {
  bool threw = false;
  try {
    brute_force_min_epsilon(uniform(5), uniform(2), Metric::tvd);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::DimensionTooLarge;
  }
  CHECK(threw);
}

TEST_CASE("tvd flattening matches the oracle, post equals pre") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 150; ++t) {
    const ProbVec a = testing::random_prob_vec(rng, 2 + t % 3, 0.15);
    const ProbVec b = testing::random_prob_vec(rng, 2 + (t / 3) % 3, 0.15);
    const ApproxMajResult post = min_epsilon_post(a, b, Metric::tvd);
    const ApproxMajResult pre = min_epsilon_pre(a, b, Metric::tvd);
    OracleOptions o;
    CHECK(std::abs(post.epsilon - brute_force_min_epsilon(a, b, Metric::tvd, o)) < 1e-6);
    o.side = ApproxSide::pre;
    CHECK(std::abs(pre.epsilon - brute_force_min_epsilon(a, b, Metric::tvd, o)) < 1e-6);
    CHECK(std::abs(post.epsilon - pre.epsilon) < 1e-9);
    CHECK(majorises(a, post.witness));
    CHECK(majorises(pre.witness, b));
    CHECK(std::abs(tvd(b, post.witness) - post.epsilon) < 1e-9);
    CHECK(std::abs(tvd(a, pre.witness) - pre.epsilon) < 1e-9);
    CHECK((post.epsilon == 0.0) == majorises(a, b));
  }
}

TEST_CASE("post and pre agree in higher dimension") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    const ProbVec a = testing::random_prob_vec(rng, 2 + t % 5, 0.1);
    const ProbVec b = testing::random_prob_vec(rng, 2 + (t / 5) % 5, 0.1);
    CHECK(std::abs(min_epsilon_post(a, b, Metric::tvd).epsilon -
                   min_epsilon_pre(a, b, Metric::tvd).epsilon) <= 1e-6);
  }
}

TEST_CASE("infidelity active-set search matches the oracle") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 40; ++t) {
    const ProbVec a = testing::random_prob_vec(rng, 2 + t % 3, 0.1);
    const ProbVec b = testing::random_prob_vec(rng, 2 + (t / 3) % 3, 0.1);
    const ApproxMajResult post = min_epsilon_post(a, b, Metric::infidelity);
    const ApproxMajResult pre = min_epsilon_pre(a, b, Metric::infidelity);
    OracleOptions o;
    o.seed = static_cast<std::uint64_t>(t);
    const double bp = brute_force_min_epsilon(a, b, Metric::infidelity, o);
    o.side = ApproxSide::pre;
    const double bq = brute_force_min_epsilon(a, b, Metric::infidelity, o);
    CHECK(std::abs(post.epsilon - bp) < 1e-6);
    CHECK(std::abs(pre.epsilon - bq) < 1e-6);
    CHECK(post.epsilon <= bp + 1e-9);
    CHECK(pre.epsilon <= bq + 1e-9);
    CHECK(majorises(a, post.witness));
    CHECK(majorises(pre.witness, b));
  }
}

TEST_CASE("Fuchs-van de Graaf sandwich") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const ProbVec a = testing::random_prob_vec(rng, 1 + t % 6, 0.2);
    const ProbVec b = testing::random_prob_vec(rng, 1 + t % 6, 0.2);
    const double f = fidelity(a, b);
    const double d = tvd(a, b);
    CHECK(1.0 - std::sqrt(f) <= d + 1e-12);
    CHECK(d <= std::sqrt(1.0 - f) + 1e-12);
  }
}

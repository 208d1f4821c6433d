#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "majorate/entropic.hpp"
#include "majorate/error.hpp"
#include "majorate/majorisation.hpp"
#include "majorate/moderate.hpp"
#include "support.hpp"

using namespace majorate;

namespace {

std::vector<double> sorted_dense(const ProbVec& p, int n) {
  std::vector<double> v = testing::dense_power(p, n);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

TEST_CASE("moderate sequence") {
  const ModerateSequence t;
  CHECK(t.t(1000.0) == doctest::Approx(0.1));
  CHECK(t.scale(1000.0) == doctest::Approx(10.0));
  CHECK(t.epsilon_direct(1000.0) == doctest::Approx(std::exp(-10.0)));
  CHECK(t.epsilon_converse(1000.0) == doctest::Approx(1.0 - std::exp(-10.0)));
  CHECK_THROWS_AS(ModerateSequence(0.0, 0.3), Error);
  CHECK_THROWS_AS(ModerateSequence(1.0, 0.5), Error);
  CHECK_THROWS_AS(ModerateSequence(1.0, 0.0), Error);
}

TEST_CASE("threshold logs") {
  const ModerateSequence t;
  const ProbVec u = uniform(2);
  CHECK(log_k_n(u, 0.0, 50, t) == doctest::Approx(50 * std::log(2.0)));
  CHECK(log_k_n(u, 1.0, 100, t) == doctest::Approx(90.85906495631337).epsilon(1e-12));
  CHECK(log_k_n(make_prob_vec({1.0, 0.0}), 0.0, 10, t) == 0.0);
  CHECK(log_K_n(u, sharp(2), 20, 20, 0.0, t) == doctest::Approx(20 * std::log(2.0)));
  CHECK(log_K_n(u, uniform(3), 20, 0, 0.0, t) == doctest::Approx(20 * std::log(3.0)));
}

TEST_CASE("shifted threshold identity") {
  const ModerateSequence t;
  const ProbVec p = make_prob_vec({0.9, 0.1});
  const ProbVec q = make_prob_vec({0.75, 0.25});
  const ProbVec f = sharp(2);
  const std::uint32_t n = 200;
  const double mu = -0.7;
  const double r = rate_at_mu(p, q, f, n, mu, t);
  const double hp = n * shannon_entropy(p);
  for (double x : {-2.0, 0.0, 1.5}) {
    const double kq = n * r * shannon_entropy(q) + x * n * t.t(n);
    const double kp = hp + (x - mu) * n * t.t(n);
    CHECK(kq == doctest::Approx(kp).epsilon(1e-12));
  }
}

TEST_CASE("tail sums trivial cases") {
  const ProbVec a = make_prob_vec({0.75, 0.25});
  CHECK(magnitude_tail_sum(a, 10, 10 * std::log(0.25) - 1.0, MagnitudeSide::above).sum ==
        doctest::Approx(1.0));
  CHECK(magnitude_tail_sum(uniform(2), 12, 12 * std::log(0.5) - 1e-3, MagnitudeSide::above).sum ==
        doctest::Approx(1.0));
  CHECK(rank_tail_sum(a, 10, 10 * std::log(2.0), RankSide::head).sum == doctest::Approx(1.0));
  CHECK(rank_tail_sum(a, 10, 0.0, RankSide::head).sum == doctest::Approx(std::pow(0.75, 10)));
  CHECK(rank_tail_sum(a, 10, 0.0, RankSide::tail).sum == doctest::Approx(1.0));
  CHECK(std::isnan(rank_tail_sum(a, 10, 0.0, RankSide::head).exponent_estimate));
}

TEST_CASE("tail sums agree with dense enumeration") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const ProbVec a = testing::random_prob_vec(rng, 2);
    const int n = 1 + trial % 16;
    const std::vector<double> v = sorted_dense(a, n);
    std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
    const double thr = std::log(v[pick(rng)]);
    double above = 0.0;
    double below = 0.0;
    for (double x : v) {
      if (std::log(x) >= thr - 1e-12 * std::max(1.0, std::abs(thr))) above += x;
      if (std::log(x) <= thr + 1e-12 * std::max(1.0, std::abs(thr))) below += x;
    }
    CHECK(std::abs(magnitude_tail_sum(a, n, thr, MagnitudeSide::above).sum - above) < 1e-10);
    CHECK(std::abs(magnitude_tail_sum(a, n, thr, MagnitudeSide::below).sum - below) < 1e-10);
    const std::size_t k = 1 + pick(rng);
    const double head = std::accumulate(v.begin(), v.begin() + k, 0.0);
    const double tail = std::accumulate(v.begin() + (k - 1), v.end(), 0.0);
    const double lk = std::log(static_cast<double>(k));
    CHECK(std::abs(rank_tail_sum(a, n, lk, RankSide::head).sum - head) < 1e-10);
    CHECK(std::abs(rank_tail_sum(a, n, lk, RankSide::tail).sum - tail) < 1e-10);
  }
}

TEST_CASE("exponent estimates at n = 1000") {
  const ModerateSequence t;
  const ProbVec a = make_prob_vec({0.75, 0.25});
  const std::uint32_t n = 1000;
  const double target = -1.0 / (2.0 * entropy_variance(a));
  const double lk = log_k_n(a, -1.0, n, t);
  const TailReport mag = magnitude_tail_sum(a, n, -lk, MagnitudeSide::above, &t);
  CHECK(mag.x == doctest::Approx(-1.0));
  CHECK(mag.predicted_exponent == doctest::Approx(target).epsilon(1e-12));
  CHECK(std::abs(mag.exponent_estimate - target) < 0.25 * std::abs(target));
  const TailReport rank = rank_tail_sum(a, n, lk, RankSide::head, &t);
  CHECK(rank.x == doctest::Approx(-1.0));
  CHECK(std::abs(rank.exponent_estimate - target) < 0.25 * std::abs(target));
}

TEST_CASE("iid tail probability") {
  const ModerateSequence t;
  const ProbVec a = make_prob_vec({0.75, 0.25});
  const std::vector<double> values{-std::log(0.75), -std::log(0.25)};
  const TailReport r = iid_upper_tail(values, a, 1000, t);
  const double target = -1.0 / (2.0 * entropy_variance(a));
  CHECK(r.predicted_exponent == doctest::Approx(target).epsilon(1e-12));
  CHECK(std::abs(r.exponent_estimate - target) < 0.3 * std::abs(target));
  const ProbVec b = make_prob_vec({0.5, 0.3, 0.2});
  const std::vector<double> w{-1.0, 0.5, 2.0};
  const TailReport r3 = iid_upper_tail(w, b, 6, t);
  double exact = 0.0;
  const double mean = -0.5 + 0.15 + 0.4;
  for (int code = 0; code < 729; ++code) {
    int c = code;
    double s = 0.0;
    double pr = 1.0;
    for (int j = 0; j < 6; ++j) {
      s += w[c % 3] - mean;
      pr *= b[c % 3];
      c /= 3;
    }
    if (s >= 6 * t.t(6) - 1e-12) exact += pr;
  }
  CHECK(r3.sum == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("crossing values and cutting point") {
  CrossingValues z = crossing_values(-1.0, 0.25);
  CHECK(z.z_C == doctest::Approx(-2.0));
  CHECK(z.z_T == doctest::Approx(-2.0 / 3.0));
  z = crossing_values(1.0, 4.0);
  CHECK(z.z_C == doctest::Approx(-1.0));
  CHECK(z.z_T == doctest::Approx(1.0 / 3.0));
  z = crossing_values(0.0, 2.0);
  CHECK(z.z_C == 0.0);
  CHECK(z.z_T == 0.0);
  CHECK(std::isinf(crossing_values(1.0, 1.0).z_C));
  CHECK(cutting_point(-1.0, 0.25) == doctest::Approx(0.0));
  CHECK(cutting_point(-1.0, 4.0) == doctest::Approx(1.0));
  CHECK(cutting_point(1.0, 4.0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(cutting_point(-1.0, 1.0), Error);
  CHECK_THROWS_AS(cutting_point(0.0, 2.0), Error);
}

TEST_CASE("crossing values balance the limiting exponents") {
  const double v = 0.43;
  for (double mu : {-2.0, -0.5, 0.3, 1.7}) {
    for (double nu : {0.1, 0.25, 2.0, 4.0, 9.0}) {
      const CrossingValues z = crossing_values(mu, nu);
      auto shifted = [&](double x) { return -(x - mu) * (x - mu) / (2.0 * v); };
      auto scaled = [&](double x) { return -nu * x * x / (2.0 * v); };
      CHECK(std::abs(shifted(z.z_C) - scaled(z.z_C)) < 1e-12 * std::max(1.0, std::abs(scaled(z.z_C))));
      CHECK(std::abs(shifted(z.z_T) - scaled(z.z_T)) < 1e-12 * std::max(1.0, std::abs(scaled(z.z_T))));
      CHECK((z.z_C - mu) == doctest::Approx(std::sqrt(nu) * z.z_C));
      CHECK((z.z_T - mu) == doctest::Approx(-std::sqrt(nu) * z.z_T));
    }
  }
}

TEST_CASE("cut and pile") {
  const ProductDist u = tensor_power(uniform(4), 1);
  const CutAndPile c = cut_and_pile(u, std::log(3.0));
  const std::vector<double> d = c.distribution.densify();
  REQUIRE(d.size() == 4);
  CHECK(d[0] == doctest::Approx(0.75));
  CHECK(d[1] == doctest::Approx(0.25));
  CHECK(d[2] == 0.0);
  CHECK(d[3] == 0.0);
  CHECK(std::exp(c.log_moved_mass) == doctest::Approx(0.5));
  CHECK(c.kept_ranks == 2);

  const std::vector<double> point = cut_and_pile(u, 0.0).distribution.densify();
  CHECK(point[0] == doctest::Approx(1.0));
  CHECK(point[1] == 0.0);

  const CutAndPile same = cut_and_pile(u, std::log(10.0));
  CHECK(same.distribution.densify() == u.densify());
  CHECK(std::isinf(same.log_moved_mass));
  CHECK_THROWS_AS(cut_and_pile(u, -1.0), Error);
}

TEST_CASE("cut and pile agrees with dense construction") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const ProbVec a = testing::random_prob_vec(rng, 3);
    const int n = 1 + trial % 7;
    const ProductDist P = tensor_power(a, n);
    const std::vector<double> v = sorted_dense(a, n);
    std::uniform_int_distribution<std::size_t> pick(1, v.size());
    const std::size_t K = pick(rng);
    std::vector<double> expect(v);
    const std::size_t keep = std::max<std::size_t>(K, 2) - 1;
    double moved = 0.0;
    for (std::size_t i = keep; i < expect.size(); ++i) {
      moved += expect[i];
      expect[i] = 0.0;
    }
    expect[0] += moved;
    const CutAndPile c = cut_and_pile(P, std::log(static_cast<double>(K)));
    const std::vector<double> got = c.distribution.densify();
    REQUIRE(got.size() == expect.size());
    double err = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - expect[i]));
    CHECK(err < 1e-12);
    CHECK(std::abs(c.distribution.total_mass() - 1.0) < 1e-9);
    CHECK(majorises_product(c.distribution, P));
  }
}

TEST_CASE("dominance of total states") {
  const ModerateSequence t;
  const ProbVec p = make_prob_vec({0.75, 0.25});
  const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0};
  const TotalStates same = build_total_states(p, p, sharp(2), 30, 30, t);
  for (bool b : dominance_check(same, grid, DominanceMode::cis)) CHECK(b);

  const ProbVec q = make_prob_vec({0.9, 0.1});
  const TotalStates low = total_states_at_mu(p, q, sharp(2), 1000, -1.0, t);
  CHECK(low.nu < 1.0);
  const double zc = crossing_values(-1.0, low.nu).z_C;
  std::vector<double> band;
  for (int i = 0; i <= 9; ++i) band.push_back(zc + 0.1 + 0.1 * i);
  for (bool b : dominance_check(low, band, DominanceMode::cis)) CHECK(b);

  const TotalStates high = total_states_at_mu(q, p, sharp(2), 500, 1.0, t);
  const double zt = crossing_values(1.0, high.nu).z_T;
  const std::vector<double> beyond{zt + 0.5, zt + 1.0};
  for (bool b : dominance_check(high, beyond, DominanceMode::trans)) CHECK_FALSE(b);
}

TEST_CASE("cut and pile construction") {
  const ModerateSequence t;
  const ProbVec eta = uniform(2);
  const ProbVec p = make_prob_vec({0.9, 0.1});
  const ProbVec q = make_prob_vec({0.6, 0.4});
  const CutAndPileConstruction c = cut_and_pile_construction(p, q, eta, 1000, -1.0, t);
  CHECK(c.states.m == 13313);
  CHECK(c.y == doctest::Approx(c.z - kDefaultZeta));
  CHECK(c.log_delta_bound < 0.0);
  CHECK(c.cut.log_moved_mass <= c.log_delta_bound);
  CHECK(majorises_product(c.cut.distribution, c.states.Q));
}

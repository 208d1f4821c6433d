#pragma once

#include <random>
#include <vector>

#include "majorate/distributions.hpp"

namespace majorate::testing {

/// Random probability vector; with probability `zero_rate` an entry is exactly zero.
inline ProbVec random_prob_vec(std::mt19937_64& rng, std::size_t dim, double zero_rate = 0.0) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(dim);
  double s = 0.0;
  for (double& x : v) {
    x = unit(rng) < zero_rate ? 0.0 : expo(rng);
    s += x;
  }
  if (s == 0.0) {
    v[0] = 1.0;
    s = 1.0;
  }
  for (double& x : v) x /= s;
  return make_prob_vec(std::move(v));
}

inline std::vector<double> dense_power(const ProbVec& p, int n) {
  ProbVec acc = make_prob_vec({1.0});
  for (int i = 0; i < n; ++i) acc = kron(acc, p);
  return {acc.entries().begin(), acc.entries().end()};
}

}  // namespace majorate::testing

#pragma once

#include <cstdint>

#include "majorate/distributions.hpp"

namespace majorate {

inline constexpr double kMajorisationSlack = 1e-12;

enum class Metric { tvd, infidelity };

/// post: modify the majorised side (a >= b~). pre: modify the majorising side (a~ >= b).
enum class ApproxSide { post, pre };

struct ApproxMajResult {
  double epsilon = 0.0;
  ProbVec witness;
  ApproxSide direction = ApproxSide::post;
  Metric metric = Metric::tvd;
};

struct ProductApproxResult {
  double epsilon = 0.0;
  ApproxSide direction = ApproxSide::post;
  Metric metric = Metric::tvd;
};

/// Sorted prefix sums of `p` padded with zeros to `dim`.
std::vector<double> lorenz(const ProbVec& p, std::size_t dim);

bool majorises(const ProbVec& a, const ProbVec& b, double slack = kMajorisationSlack);

/// max_k (L_B(k) - L_A(k)) over the merged class boundaries; <= 0 iff A majorises B.
double lorenz_excess(const ProductDist& A, const ProductDist& B);

bool majorises_product(const ProductDist& A, const ProductDist& B,
                       double slack = kMajorisationSlack);

double tvd(const ProbVec& a, const ProbVec& b);

double fidelity(const ProbVec& a, const ProbVec& b);

double distance(const ProbVec& a, const ProbVec& b, Metric metric);

/// Smallest epsilon such that a majorises some b~ within epsilon of b.
ApproxMajResult min_epsilon_post(const ProbVec& a, const ProbVec& b, Metric metric);

/// Smallest epsilon such that some a~ within epsilon of a majorises b.
ApproxMajResult min_epsilon_pre(const ProbVec& a, const ProbVec& b, Metric metric);

ProductApproxResult min_epsilon_post(const ProductDist& A, const ProductDist& B, Metric metric);

ProductApproxResult min_epsilon_pre(const ProductDist& A, const ProductDist& B, Metric metric);

struct OracleOptions {
  ApproxSide side = ApproxSide::post;
  /// Coarse simplex grid resolution used to seed the infidelity search.
  int grid = 40;
  std::uint64_t seed = 1;
};

/// Independent search over every sorted-order pattern, for dim <= 4.
double brute_force_min_epsilon(const ProbVec& a, const ProbVec& b, Metric metric,
                               const OracleOptions& options = {});

}  // namespace majorate

#pragma once

#include <cstdint>

#include "majorate/distributions.hpp"
#include "majorate/entropic.hpp"
#include "majorate/moderate.hpp"

namespace majorate {

/// Standard normal CDF.
double gaussian_cdf(double x);

/// ln Phi(x), accurate far into the lower tail.
double log_gaussian_cdf(double x);

/// Phi((x - mu) / sqrt(nu)).
double gaussian_cdf_shifted(double x, double mu, double nu);

double log_gaussian_cdf_shifted(double x, double mu, double nu);

/// Root of ln phi(a) - ln phi_{mu,nu}(a) - ln Phi(a) + ln Phi_{mu,nu}(a).
double crossing_point(double mu, double nu);

/// The log-ratio whose root is the crossing point.
double crossing_residual(double alpha, double mu, double nu);

enum class RayleighMethod { integral, expansion_minus, expansion_plus };

struct RayleighEval {
  double nu = 0.0;
  double mu = 0.0;
  double Z = 0.0;
  double log_Z = 0.0;
  double log_one_minus_Z = 0.0;
  double alpha_cross = 0.0;
  RayleighMethod method = RayleighMethod::integral;
};

/// Z_nu(mu) from the closed form through the crossing point. For nu < 1 the
/// crossing point is taken in the reflected problem Z_{1/nu}(mu / sqrt(nu)).
RayleighEval rayleigh_cdf(double nu, double mu);

/// ln Z ~ -mu^2 / 2(1 - sqrt(nu))^2 as mu -> -inf.
RayleighEval rayleigh_expansion_minus(double nu, double mu);

/// ln(1 - Z) ~ -mu^2 / 4(1 + nu) as mu -> +inf.
RayleighEval rayleigh_expansion_plus(double nu, double mu);

enum class InverseSide { direct, converse };

struct RayleighInverse {
  /// |1 - sqrt(nu)| sqrt(-2 ln eps) or sqrt(-4(1 + nu) ln(1 - eps)).
  double closed_form = 0.0;
  /// mu with Z_nu(mu) = eps; negative on the direct side.
  double refined = 0.0;
};

RayleighInverse rayleigh_inverse_approx(double nu, double eps, InverseSide side);

/// R_inf + sqrt(V(q) mean(p) / mean(q)^3) z_inverse / sqrt(n).
double small_deviation_rate(const ResourceMoments& p, const ResourceMoments& q, double z_inverse,
                            std::uint32_t n);

struct ConjecturedRate {
  double R_inf = 0.0;
  /// sqrt(2 V(p)) sqrt(1 + 1/nu) / mean(q)
  double coefficient = 0.0;
  double R_n = 0.0;
  static constexpr const char* status = "CONJECTURE";
};

/// Infidelity rate at eps_n = 1 - e^(-n t_n^2); not a theorem.
ConjecturedRate conjectured_converse_infidelity(const ProbVec& p, const ProbVec& q,
                                                const ResourceContext& ctx,
                                                const ModerateSequence& t, std::uint32_t n);

}  // namespace majorate

#include "majorate/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "majorate/error.hpp"
#include "majorate/numeric.hpp"

namespace majorate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void check_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  if (nu == 1.0) throw Error(ErrorCode::InvalidArgument, "nu = 1 has no crossing point");
}

template <class F>
double solve(F f, double lo, double hi) {
  boost::uintmax_t iters = 300;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_gaussian_cdf(double x) {
  if (std::isnan(x)) return kNaN;
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x >= -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double gaussian_cdf_shifted(double x, double mu, double nu) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  return gaussian_cdf((x - mu) / std::sqrt(nu));
}

double log_gaussian_cdf_shifted(double x, double mu, double nu) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  return log_gaussian_cdf((x - mu) / std::sqrt(nu));
}

double crossing_residual(double alpha, double mu, double nu) {
  const double d = alpha - mu;
  return -0.5 * alpha * alpha + d * d / (2.0 * nu) + 0.5 * std::log(nu) -
         log_gaussian_cdf(alpha) + log_gaussian_cdf_shifted(alpha, mu, nu);
}

double crossing_point(double mu, double nu) {
  check_nu(nu);
  auto g = [&](double a) { return crossing_residual(a, mu, nu); };
  const double s = std::sqrt(nu);
  double lo = std::min(mu / (1.0 - s), mu / (1.0 - nu));
  double hi = std::max(mu / (1.0 - s), mu / (1.0 - nu));
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; g(lo) * g(hi) > 0.0; ++i) {
    if (i == 10) throw Error(ErrorCode::NoBracket, "crossing point not bracketed");
    lo = mid - half * std::ldexp(1.0, i + 1);
    hi = mid + half * std::ldexp(1.0, i + 1);
  }
  const double a = solve(g, lo, hi);
  if (std::abs(g(a)) > 1e-10) {
    throw Error(ErrorCode::NoBracket, "crossing point residual above 1e-10");
  }
  return a;
}

RayleighEval rayleigh_cdf(double nu, double mu) {
  check_nu(nu);
  if (std::isnan(mu)) throw Error(ErrorCode::InvalidArgument, "mu is NaN");
  if (nu < 1.0) {
    RayleighEval r = rayleigh_cdf(1.0 / nu, mu / std::sqrt(nu));
    r.nu = nu;
    r.mu = mu;
    try {
      r.alpha_cross = crossing_point(mu, nu);
    } catch (const Error&) {
      r.alpha_cross = kNaN;
    }
    return r;
  }
  RayleighEval r;
  r.nu = nu;
  r.mu = mu;
  r.alpha_cross = crossing_point(mu, nu);
  const double a = r.alpha_cross;
  const double log_t1 = 0.5 * std::log(2.0 * std::sqrt(nu) / (1.0 + nu)) -
                        mu * mu / (4.0 * (1.0 + nu)) +
                        log_gaussian_cdf_shifted(-a, -mu / (1.0 + nu), 2.0 * nu / (1.0 + nu));
  const double log_t2 = 0.5 * (log_gaussian_cdf(a) + log_gaussian_cdf_shifted(a, mu, nu));
  const double log_s = std::min(0.0, log_add(log_t1, log_t2));
  const double one_minus_s = -std::expm1(log_t2) - std::exp(log_t1);
  r.log_one_minus_Z = 2.0 * log_s;
  if (r.log_one_minus_Z < -std::numbers::ln2) {
    r.Z = -std::expm1(r.log_one_minus_Z);
    r.log_Z = std::log1p(-std::exp(r.log_one_minus_Z));
  } else if (one_minus_s <= 0.0) {
    r.Z = 0.0;
    r.log_Z = -kInf;
  } else {
    r.log_Z = std::log(one_minus_s) + std::log1p(std::exp(log_s));
    r.Z = std::clamp(std::exp(r.log_Z), 0.0, 1.0);
  }
  return r;
}

RayleighEval rayleigh_expansion_minus(double nu, double mu) {
  const double d = 1.0 - std::sqrt(nu);
  RayleighEval r;
  r.nu = nu;
  r.mu = mu;
  r.alpha_cross = mu / d;
  r.log_Z = -0.5 * mu * mu / (d * d);
  r.Z = std::exp(r.log_Z);
  r.log_one_minus_Z = std::log1p(-r.Z);
  r.method = RayleighMethod::expansion_minus;
  return r;
}

RayleighEval rayleigh_expansion_plus(double nu, double mu) {
  RayleighEval r;
  r.nu = nu;
  r.mu = mu;
  r.alpha_cross = mu / (1.0 - nu);
  r.log_one_minus_Z = -mu * mu / (4.0 * (1.0 + nu));
  r.Z = -std::expm1(r.log_one_minus_Z);
  r.log_Z = std::log(r.Z);
  r.method = RayleighMethod::expansion_plus;
  return r;
}

RayleighInverse rayleigh_inverse_approx(double nu, double eps, InverseSide side) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  RayleighInverse out;
  if (side == InverseSide::direct) {
    if (!(eps > 0.0 && eps <= 0.01)) {
      throw Error(ErrorCode::OutOfExpansionRange, "direct inverse needs eps in (0, 0.01]");
    }
    out.closed_form = std::abs(1.0 - std::sqrt(nu)) * std::sqrt(-2.0 * std::log(eps));
  } else {
    if (!(eps >= 0.99 && eps < 1.0)) {
      throw Error(ErrorCode::OutOfExpansionRange, "converse inverse needs eps in [0.99, 1)");
    }
    out.closed_form = std::sqrt(-4.0 * (1.0 + nu) * std::log1p(-eps));
  }
  if (nu == 1.0) {
    out.refined = kNaN;
    return out;
  }
  std::function<double(double)> f;
  if (side == InverseSide::direct) {
    const double target = std::log(eps);
    f = [=](double mu) { return rayleigh_cdf(nu, mu).log_Z - target; };
  } else {
    const double target = std::log1p(-eps);
    f = [=](double mu) { return target - rayleigh_cdf(nu, mu).log_one_minus_Z; };
  }
  const double seed = std::max(out.closed_form, 1.0);
  double lo = side == InverseSide::direct ? -seed : 0.0;
  double hi = side == InverseSide::direct ? 0.0 : seed;
  for (int i = 0; f(lo) > 0.0; ++i) {
    if (i == 60) throw Error(ErrorCode::NoBracket, "inverse not bracketed");
    hi = lo;
    lo *= 2.0;
    if (lo == 0.0) lo = -1.0;
  }
  for (int i = 0; f(hi) < 0.0; ++i) {
    if (i == 60) throw Error(ErrorCode::NoBracket, "inverse not bracketed");
    lo = hi;
    hi = hi == 0.0 ? 1.0 : 2.0 * hi;
  }
  out.refined = solve(f, lo, hi);
  return out;
}

double small_deviation_rate(const ResourceMoments& p, const ResourceMoments& q, double z_inverse,
                            std::uint32_t n) {
  if (q.mean <= 1e-15) throw Error(ErrorCode::DegenerateTarget, "target has zero resource");
  return p.mean / q.mean +
         std::sqrt(q.variance * p.mean / (q.mean * q.mean * q.mean)) * z_inverse / std::sqrt(n);
}

ConjecturedRate conjectured_converse_infidelity(const ProbVec& p, const ProbVec& q,
                                                const ResourceContext& ctx,
                                                const ModerateSequence& t, std::uint32_t n) {
  ConjecturedRate r;
  r.R_inf = asymptotic_rate(p, q, ctx);
  const ResourceMoments mp = resource_moments(p, ctx);
  const ResourceMoments mq = resource_moments(q, ctx);
  const double vp = std::max(0.0, mp.variance);
  const double vq = std::max(0.0, mq.variance);
  r.coefficient = std::sqrt(2.0 * (vp + vq * mp.mean / mq.mean)) / mq.mean;
  r.R_n = r.R_inf + r.coefficient * t.t(n);
  return r;
}

}  // namespace majorate

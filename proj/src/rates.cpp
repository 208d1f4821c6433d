#include "majorate/rates.hpp"

#include <cmath>
#include <future>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "majorate/error.hpp"
#include "majorate/numeric.hpp"

namespace majorate {

namespace {

constexpr double kZero = 1e-15;

double sign_of(Regime regime) { return regime == Regime::direct ? -1.0 : 1.0; }

/// sqrt(2 V(p)) |1 -+ 1/sqrt(nu)|, written so that V(p) = 0 and V(q) = 0 stay finite.
double spread(double vp, double mp, double vq, double mq, const Irreversibility& nu,
              Regime regime) {
  vp = vp <= kZero ? 0.0 : vp;
  vq = vq <= kZero ? 0.0 : vq;
  if (nu.kind == Irreversibility::Kind::indeterminate) return 0.0;
  const double a = std::sqrt(2.0 * vp);
  if (nu.kind == Irreversibility::Kind::infinite) return a;
  if (vp == 0.0) return std::sqrt(2.0 * vq * std::abs(mp / mq));
  const double inv = 1.0 / std::sqrt(nu.value);
  return regime == Regime::direct ? a * std::abs(1.0 - inv) : a * (1.0 + inv);
}

ProbVec dense(const ProductDist& d) {
  if (d.outcome_count() > kDenseInfidelityCap) {
    throw Error(ErrorCode::MetricUnsupported,
                "infidelity rates need total dimension <= " +
                    std::to_string(kDenseInfidelityCap));
  }
  return make_prob_vec(d.densify());
}

}  // namespace

double regime_epsilon(Regime regime, const ModerateSequence& t, std::uint32_t n) {
  return regime == Regime::direct ? t.epsilon_direct(n) : t.epsilon_converse(n);
}

ExpandedRate expand_rate(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx,
                         Regime regime, const ModerateSequence& t, std::uint32_t n,
                         Metric metric) {
  if (regime == Regime::converse && metric != Metric::tvd) {
    throw Error(ErrorCode::ConverseInfidelityUnsupported,
                "the converse expansion is only established for TVD");
  }
  RateExpansion e;
  e.R_inf = asymptotic_rate(p, q, ctx);
  e.nu = irreversibility(p, q, ctx);
  e.regime = regime;
  e.direction = ctx.direction;
  const ResourceMoments mp = resource_moments(p, ctx);
  const ResourceMoments mq = resource_moments(q, ctx);
  e.coefficient =
      sign_of(regime) * spread(mp.variance, mp.mean, mq.variance, mq.mean, e.nu, regime) / mq.mean;
  return {e, e.evaluate(t.t(n))};
}

double free_state_rate(const ProbVec& p, const ProbVec& q, const ProbVec& f, Regime regime,
                       double t_n) {
  const double hf = shannon_entropy(f);
  const double gp = hf - shannon_entropy(p);
  const double gq = hf - shannon_entropy(q);
  if (std::abs(gq) <= kZero) throw Error(ErrorCode::DegenerateTarget, "H(f) = H(q)");
  const double vp = entropy_variance(p);
  const double vq = entropy_variance(q);
  Irreversibility nu;
  if (std::abs(gp) <= kZero) {
    nu = {Irreversibility::Kind::indeterminate, 0.0};
  } else if (vq <= kZero) {
    nu = vp <= kZero ? Irreversibility{Irreversibility::Kind::indeterminate, 0.0}
                     : Irreversibility{Irreversibility::Kind::infinite, kInf};
  } else {
    nu = {Irreversibility::Kind::finite, (vp / vq) * (gq / gp)};
  }
  return (gp + sign_of(regime) * spread(vp, gp, vq, gq, nu, regime) * t_n) / gq;
}

double total_state_epsilon(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                           std::uint32_t n, std::uint32_t m, Direction direction,
                           const ExactRateOptions& options) {
  const std::vector<Factor> pf{{p, n}, {f, m}};
  const std::vector<Factor> qf{{q, m}, {f, n}};
  const ProductDist P = tensor_product(pf, options.product);
  const ProductDist Q = tensor_product(qf, options.product);
  const bool ent = direction == Direction::entanglement;
  if (options.metric == Metric::tvd) {
    return ent ? min_epsilon_post(Q, P, Metric::tvd).epsilon
               : min_epsilon_post(P, Q, Metric::tvd).epsilon;
  }
  const ProbVec dp = dense(P);
  const ProbVec dq = dense(Q);
  return ent ? min_epsilon_post(dq, dp, options.metric).epsilon
             : min_epsilon_post(dp, dq, options.metric).epsilon;
}

ExactRatePoint exact_optimal_rate(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                                  std::uint32_t n, double epsilon, Direction direction,
                                  const ExactRateOptions& options) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1)");
  }
  const double slack = 1e-12;
  auto eps_at = [&](std::uint32_t m) {
    return total_state_epsilon(p, q, f, n, m, direction, options);
  };
  double best_eps = eps_at(0);
  if (best_eps > epsilon + slack) {
    throw Error(ErrorCode::InfeasibleAtZero, "no copies of the target are reachable");
  }
  std::uint32_t lo = 0;
  std::uint32_t hi = 1;
  for (;;) {
    if (hi > options.max_m) {
      throw Error(ErrorCode::ClassExplosion, "rate search exceeded the copy-count cap");
    }
    const double e = eps_at(hi);
    if (e > epsilon + slack) break;
    lo = hi;
    best_eps = e;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    const double e = eps_at(mid);
    if (e <= epsilon + slack) {
      lo = mid;
      best_eps = e;
    } else {
      hi = mid;
    }
  }
  ExactRatePoint r;
  r.n = n;
  r.epsilon = epsilon;
  r.achieved_epsilon = best_eps;
  r.m_star = lo;
  r.metric = options.metric;
  const std::uint64_t g = std::gcd<std::uint64_t, std::uint64_t>(lo, n);
  r.rate_num = lo / g;
  r.rate_den = n / g;
  return r;
}

ExactRatePoint exact_optimal_rate(const ProbVec& p, const ProbVec& q, const GibbsSpec& gibbs,
                                  std::uint32_t n, double epsilon,
                                  const ExactRateOptions& options) {
  const ProbVec ph = embed(p, gibbs);
  const ProbVec qh = embed(q, gibbs);
  return exact_optimal_rate(ph, qh, uniform(ph.dim()), n, epsilon, Direction::thermodynamic,
                            options);
}

ResonanceGap resonance_gap(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx) {
  asymptotic_rate(p, q, ctx);
  ResonanceGap r;
  r.nu = irreversibility(p, q, ctx);
  switch (r.nu.kind) {
    case Irreversibility::Kind::indeterminate:
      r.gap = 0.0;
      break;
    case Irreversibility::Kind::infinite:
      r.gap = 1.0;
      break;
    case Irreversibility::Kind::finite:
      r.gap = std::abs(1.0 - 1.0 / std::sqrt(r.nu.value));
      break;
  }
  return r;
}

ProbVec resonant_binary_partner(const ProbVec& q) {
  const double hq = shannon_entropy(q);
  const double vq = entropy_variance(q);
  if (hq <= kZero || vq <= kZero) {
    throw Error(ErrorCode::DegenerateTarget, "target needs positive entropy and variance");
  }
  const double target = vq / hq;
  auto g = [&](double x) {
    const ProbVec p = make_prob_vec({x, 1.0 - x});
    return entropy_variance(p) / shannon_entropy(p) - target;
  };
  double lo = 0.5 + 1e-9;
  double hi = 1.0 - 1e-15;
  if (g(lo) > 0.0 || g(hi) < 0.0) {
    throw Error(ErrorCode::NoBracket, "no binary partner with the required variance ratio");
  }
  boost::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      g, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  const double x = 0.5 * (root.first + root.second);
  return make_prob_vec({x, 1.0 - x});
}

std::vector<ConvergenceRow> convergence_report(const ProbVec& p, const ProbVec& q,
                                               const ProbVec& f, Direction direction,
                                               Regime regime, const ModerateSequence& t,
                                               std::span<const std::uint32_t> n_grid,
                                               const ExactRateOptions& options) {
  const ResourceContext ctx = direction == Direction::entanglement
                                  ? ResourceContext::entanglement()
                                  : ResourceContext::thermodynamic(f);
  std::vector<std::future<ConvergenceRow>> jobs;
  jobs.reserve(n_grid.size());
  for (std::uint32_t n : n_grid) {
    jobs.push_back(std::async(std::launch::async, [&, n] {
      ConvergenceRow row;
      row.n = n;
      row.epsilon = regime_epsilon(regime, t, n);
      const ExactRatePoint e = exact_optimal_rate(p, q, f, n, row.epsilon, direction, options);
      row.m_star = e.m_star;
      row.exact_rate = e.rate();
      row.expanded_rate = expand_rate(p, q, ctx, regime, t, n, options.metric).R_n;
      row.residual = row.exact_rate - row.expanded_rate;
      return row;
    }));
  }
  std::vector<ConvergenceRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

}  // namespace majorate

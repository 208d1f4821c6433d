#include "majorate/moderate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "majorate/entropic.hpp"
#include "majorate/error.hpp"
#include "majorate/numeric.hpp"

namespace majorate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double predicted(double x, double v) {
  if (v <= 0.0) return x == 0.0 ? 0.0 : -kInf;
  return -x * x / (2.0 * v);
}

TailReport make_report(std::uint32_t n, double x, double log_sum, double predicted_exponent,
                       const ModerateSequence* t) {
  TailReport r;
  r.n = n;
  r.x = x;
  r.log_sum = log_sum;
  r.sum = std::clamp(std::exp(log_sum), 0.0, 1.0);
  r.exponent_estimate = t != nullptr ? log_sum / t->scale(n) : kNaN;
  r.predicted_exponent = predicted_exponent;
  return r;
}

double prefix_clamped(const ProductDist& d, double log_k) {
  if (log_k >= d.log_outcome_count()) return d.total_mass();
  return d.prefix_sum_at_log_rank(log_k);
}

/// ln of the mass at ranks >= k, k = exp(log_k).
double log_mass_from_rank(const ProductDist& d, double log_k) {
  if (log_k <= 0.0) return d.log_suffix_mass(0);
  const double before = log_sub(log_k, 0.0);
  if (before >= d.log_outcome_count()) return -kInf;
  return d.log_tail_after_log_rank(before);
}

void check_log(double v, const char* what) {
  if (std::isnan(v) || v == kInf) throw Error(ErrorCode::RankOutOfRange, what);
}

}  // namespace

ModerateSequence::ModerateSequence(double c, double alpha) : c_(c), alpha_(alpha) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "moderate sequence needs c > 0");
  }
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "moderate sequence needs 0 < alpha < 1/2");
  }
}

double ModerateSequence::t(double n) const { return c_ * std::pow(n, -alpha_); }

double ModerateSequence::scale(double n) const {
  const double tn = t(n);
  return n * tn * tn;
}

double ModerateSequence::epsilon_direct(double n) const { return std::exp(-scale(n)); }

double ModerateSequence::epsilon_converse(double n) const { return -std::expm1(-scale(n)); }

double log_k_n(const ProbVec& a, double x, std::uint32_t n, const ModerateSequence& t) {
  return n * shannon_entropy(a) + x * n * t.t(n);
}

double log_K_n(const ProbVec& q, const ProbVec& f, std::uint32_t n, std::uint32_t m, double x,
               const ModerateSequence& t) {
  return m * shannon_entropy(q) + n * shannon_entropy(f) + x * n * t.t(n);
}

TailReport magnitude_tail_sum(const ProbVec& a, std::uint32_t n, double log_threshold,
                              MagnitudeSide side, const ModerateSequence* t,
                              const ProductOptions& options) {
  if (std::isnan(log_threshold)) throw Error(ErrorCode::InvalidArgument, "NaN threshold");
  const ProductDist d = tensor_power(a, n, options);
  const double tol = 1e-12 * std::max(1.0, std::abs(log_threshold));
  double log_sum = -kInf;
  for (std::size_t i = 0; i < d.class_count(); ++i) {
    const double lp = d.classes()[i].log_prob;
    const bool take = side == MagnitudeSide::above ? lp >= log_threshold - tol
                                                   : lp <= log_threshold + tol;
    if (take) log_sum = log_add(log_sum, lp + log_big(d.classes()[i].multiplicity));
  }
  const double x =
      t != nullptr ? (-log_threshold - n * shannon_entropy(a)) / (n * t->t(n)) : kNaN;
  return make_report(n, x, log_sum, predicted(x, entropy_variance(a)), t);
}

TailReport rank_tail_sum(const ProbVec& a, std::uint32_t n, double log_rank, RankSide side,
                         const ModerateSequence* t, const ProductOptions& options) {
  check_log(log_rank, "rank must be finite");
  const ProductDist d = tensor_power(a, n, options);
  double log_sum = -kInf;
  if (side == RankSide::head) {
    log_sum = std::log(prefix_clamped(d, log_rank));
  } else {
    log_sum = log_mass_from_rank(d, log_rank);
  }
  const double x = t != nullptr ? (log_rank - n * shannon_entropy(a)) / (n * t->t(n)) : kNaN;
  return make_report(n, x, log_sum, predicted(x, entropy_variance(a)), t);
}

TailReport iid_upper_tail(std::span<const double> values, const ProbVec& probs, std::uint32_t n,
                          const ModerateSequence& t) {
  if (values.size() != probs.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "alphabet and probabilities differ in length");
  }
  std::vector<double> c;
  std::vector<double> lp;
  KahanSum mean;
  for (std::size_t i = 0; i < values.size(); ++i) mean += probs[i] * values[i];
  KahanSum var;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    c.push_back(values[i] - mean.value());
    lp.push_back(std::log(probs[i]));
    var += probs[i] * c.back() * c.back();
  }
  const std::size_t J = c.size();
  const double log_count =
      std::lgamma(n + static_cast<double>(J)) - std::lgamma(n + 1.0) - std::lgamma(double(J));
  if (log_count > std::log(static_cast<double>(kDefaultClassCap))) {
    throw Error(ErrorCode::ClassExplosion, "too many compositions");
  }
  const double threshold = n * t.t(n);
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * n * scale;
  double log_sum = -kInf;
  std::vector<std::uint32_t> k(J, 0);
  auto visit = [&](auto&& self, std::size_t level, std::uint32_t remaining, double s,
                   double lw) -> void {
    if (level + 1 == J) {
      const double total = s + remaining * c[level];
      if (total >= threshold - tol) {
        log_sum = log_add(log_sum, lw + remaining * lp[level] - std::lgamma(remaining + 1.0));
      }
      return;
    }
    for (std::uint32_t j = 0; j <= remaining; ++j) {
      self(self, level + 1, remaining - j, s + j * c[level],
           lw + j * lp[level] - std::lgamma(j + 1.0));
    }
  };
  visit(visit, 0, n, 0.0, std::lgamma(n + 1.0));
  return make_report(n, 1.0, log_sum, predicted(1.0, var.value()), &t);
}

CrossingValues crossing_values(double mu, double nu) {
  if (!(nu >= 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be non-negative");
  const double s = std::sqrt(nu);
  CrossingValues z;
  z.z_T = mu / (1.0 + s);
  z.z_C = nu == 1.0 ? (mu == 0.0 ? 0.0 : kInf) : mu / (1.0 - s);
  return z;
}

double cutting_point(double mu, double nu) {
  if (mu == 0.0) throw Error(ErrorCode::UndefinedCase, "cutting point needs mu != 0");
  const CrossingValues z = crossing_values(mu, nu);
  if (mu > 0.0) return z.z_T;
  if (nu == 1.0) throw Error(ErrorCode::UndefinedCase, "cutting point undefined for mu < 0, nu = 1");
  return nu < 1.0 ? 2.0 * mu - z.z_C : z.z_C;
}

CutAndPile cut_and_pile(const ProductDist& P, double log_cut_rank) {
  if (std::isnan(log_cut_rank) || log_cut_rank < -1e-12) {
    throw Error(ErrorCode::RankOutOfRange, "cut rank must be at least 1");
  }
  const BigInt cut = big_ceil_from_log(std::max(0.0, log_cut_rank));
  const BigInt keep = cut > 1 ? BigInt(cut - 1) : BigInt(1);
  if (keep >= P.support_size()) {
    return {P, -kInf, P.support_size()};
  }
  const double moved = P.log_tail_after_rank(keep);
  std::vector<TypeClass> classes;
  BigInt remaining = keep;
  for (std::size_t i = 0; i < P.class_count() && remaining > 0; ++i) {
    const TypeClass& c = P.classes()[i];
    const BigInt take = c.multiplicity < remaining ? c.multiplicity : remaining;
    if (i == 0) {
      classes.push_back({log_add(c.log_prob, moved), BigInt(1)});
      if (take > 1) classes.push_back({c.log_prob, take - 1});
    } else {
      classes.push_back({c.log_prob, take});
    }
    remaining -= take;
  }
  return {ProductDist::from_classes(std::move(classes), P.outcome_count()), moved, keep};
}

double TotalStates::log_K(double x) const { return entropy_Q + x * n * t.t(n); }

TotalStates build_total_states(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                               std::uint32_t n, std::uint32_t m, const ModerateSequence& t,
                               const ProductOptions& options) {
  const std::vector<Factor> pf{{p, n}, {f, m}};
  const std::vector<Factor> qf{{q, m}, {f, n}};
  TotalStates s{tensor_product(pf, options), tensor_product(qf, options), n, m, t};
  const double hf = shannon_entropy(f);
  s.entropy_Q = m * shannon_entropy(q) + n * hf;
  s.variance_p = entropy_variance(p);
  const double vq = entropy_variance(q);
  const double gp = hf - shannon_entropy(p);
  const double gq = hf - shannon_entropy(q);
  s.nu = (vq > 0.0 && gp != 0.0) ? (s.variance_p / vq) * (gq / gp) : kInf;
  return s;
}

double rate_at_mu(const ProbVec& p, const ProbVec& q, const ProbVec& f, std::uint32_t n,
                  double mu, const ModerateSequence& t) {
  const double hf = shannon_entropy(f);
  const double den = hf - shannon_entropy(q);
  if (std::abs(den) <= 1e-15) throw Error(ErrorCode::DegenerateTarget, "H(f) = H(q)");
  return (hf - shannon_entropy(p) + mu * t.t(n)) / den;
}

TotalStates total_states_at_mu(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                               std::uint32_t n, double mu, const ModerateSequence& t,
                               const ProductOptions& options) {
  const double r = rate_at_mu(p, q, f, n, mu, t);
  const double m = std::floor(n * std::max(0.0, r) + 1e-9);
  if (m > 4.0e9) throw Error(ErrorCode::ClassExplosion, "target copy count too large");
  return build_total_states(p, q, f, n, static_cast<std::uint32_t>(m), t, options);
}

std::vector<bool> dominance_check(const TotalStates& s, std::span<const double> x_grid,
                                  DominanceMode mode) {
  std::vector<bool> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    const double lk = s.log_K(x);
    check_log(lk, "threshold must be finite");
    const double q_head = prefix_clamped(s.Q, lk);
    if (mode == DominanceMode::cis) {
      out.push_back(prefix_clamped(s.P, lk) >= q_head - 1e-12);
    } else {
      out.push_back(std::exp(log_mass_from_rank(s.P, lk)) >= q_head - 1e-12);
    }
  }
  return out;
}

CutAndPileConstruction cut_and_pile_construction(const ProbVec& p, const ProbVec& q,
                                                 const ProbVec& f, std::uint32_t n, double mu,
                                                 const ModerateSequence& t, double zeta,
                                                 const ProductOptions& options) {
  if (!(zeta > 0.0)) throw Error(ErrorCode::InvalidArgument, "zeta must be positive");
  TotalStates states = total_states_at_mu(p, q, f, n, mu, t, options);
  const double z = cutting_point(mu, states.nu);
  const double y = z - zeta;
  const double log_cut = std::max(0.0, states.log_K(y));
  CutAndPile cut = cut_and_pile(states.P, log_cut);
  const double d = z - mu - 2.0 * zeta;
  const double e = -d * d / (2.0 * states.variance_p) * t.scale(n);
  CutAndPileConstruction c{std::move(states), mu, z, y, log_cut, std::move(cut), 0.0, 0.0};
  if (mu < 0.0) {
    c.log_delta_bound = e;
    c.delta_bound = std::exp(e);
  } else {
    c.delta_bound = -std::expm1(e);
    c.log_delta_bound = std::log(c.delta_bound);
  }
  return c;
}

}  // namespace majorate

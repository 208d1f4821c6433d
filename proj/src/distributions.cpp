#include "majorate/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "majorate/error.hpp"
#include "majorate/numeric.hpp"

namespace majorate {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

bool close_log(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

double log_big(const BigInt& x) {
  if (x <= 0) return -kInf;
  const std::size_t bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * kLn2;
}

BigInt big_from_log(double log_value) {
  if (log_value == -kInf || log_value < 0.0) return 0;
  if (log_value < 700.0) {
    return BigInt(std::floor(std::exp(log_value)));
  }
  const auto e = static_cast<long>(std::floor(log_value / kLn2)) - 60;
  const double mant = std::exp(log_value - static_cast<double>(e) * kLn2);
  return BigInt(std::floor(mant)) << e;
}

BigInt big_ceil_from_log(double log_value) {
  if (log_value == -kInf) return 0;
  if (log_value < 36.0) {
    const double v = std::exp(log_value);
    const double r = std::round(v);
    if (std::abs(v - r) <= 1e-9 * std::max(1.0, v)) return BigInt(r);
    return BigInt(std::ceil(v));
  }
  return big_from_log(log_value) + 1;
}

std::size_t ProbVec::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](double x) { return x > 0.0; }));
}

ProbVec make_prob_vec(std::vector<double> entries, double tolerance) {
  if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty distribution");
  KahanSum sum;
  for (double& x : entries) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite entry");
    if (x < -kNegativeTolerance) throw Error(ErrorCode::NegativeEntry, "entry " + fmt(x));
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  const double s = sum.value();
  if (std::abs(s - 1.0) > tolerance) throw Error(ErrorCode::NotNormalised, "sum " + fmt(s));
  for (double& x : entries) x /= s;
  return ProbVec(std::move(entries));
}

ProbVec from_amplitudes(std::span<const double> amplitudes) {
  std::vector<double> p;
  p.reserve(amplitudes.size());
  for (double a : amplitudes) p.push_back(a * a);
  return make_prob_vec(std::move(p));
}

ProbVec uniform(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "dimension 0");
  return make_prob_vec(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

ProbVec sharp(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "dimension 0");
  std::vector<double> v(dim, 0.0);
  v[0] = 1.0;
  return make_prob_vec(std::move(v));
}

ProbVec pad(const ProbVec& p, std::size_t dim) {
  if (dim < p.dim()) throw Error(ErrorCode::DimensionMismatch, "cannot pad to smaller dimension");
  std::vector<double> v(p.entries().begin(), p.entries().end());
  v.resize(dim, 0.0);
  return make_prob_vec(std::move(v));
}

ProbVec kron(const ProbVec& a, const ProbVec& b) {
  std::vector<double> v;
  v.reserve(a.dim() * b.dim());
  for (double x : a.entries()) {
    for (double y : b.entries()) v.push_back(x * y);
  }
  return make_prob_vec(std::move(v));
}

SortedProbVec sort_desc(const ProbVec& p) {
  SortedProbVec s;
  s.permutation.resize(p.dim());
  std::iota(s.permutation.begin(), s.permutation.end(), std::size_t{0});
  std::stable_sort(s.permutation.begin(), s.permutation.end(),
                   [&](std::size_t i, std::size_t j) { return p[i] > p[j]; });
  s.entries.reserve(p.dim());
  for (std::size_t i : s.permutation) s.entries.push_back(p[i]);
  return s;
}

GibbsSpec GibbsSpec::from_energies(std::vector<double> energies, double beta) {
  if (energies.empty()) throw Error(ErrorCode::InvalidArgument, "no energy levels");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be a non-negative finite number");
  }
  const double emin = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w;
  w.reserve(energies.size());
  KahanSum z;
  for (double e : energies) {
    w.push_back(std::exp(-beta * (e - emin)));
    z += w.back();
  }
  for (double& x : w) x /= z.value();
  GibbsSpec g;
  g.gamma_ = make_prob_vec(std::move(w));
  g.energies_ = std::move(energies);
  g.beta_ = beta;
  return g;
}

GibbsSpec GibbsSpec::from_weights(std::span<const Rational> weights) {
  if (weights.empty()) throw Error(ErrorCode::InvalidArgument, "no weights");
  std::int64_t lcm = 1;
  std::vector<Rational> reduced;
  for (Rational r : weights) {
    if (r.den <= 0 || r.num <= 0) {
      throw Error(ErrorCode::IrrationalWeights, "weights must be positive rationals num/den");
    }
    const std::int64_t g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
    reduced.push_back(r);
    lcm = std::lcm(lcm, r.den);
    if (lcm > (std::int64_t{1} << 40)) {
      throw Error(ErrorCode::DimensionTooLarge, "embedding dimension too large");
    }
  }
  GibbsSpec g;
  std::uint64_t total = 0;
  std::vector<double> w;
  for (const Rational& r : reduced) {
    const auto d = static_cast<std::uint64_t>(r.num * (lcm / r.den));
    g.splits_.push_back(d);
    total += d;
    w.push_back(static_cast<double>(r.num) / static_cast<double>(r.den));
  }
  if (total != static_cast<std::uint64_t>(lcm)) {
    throw Error(ErrorCode::NotNormalised, "rational weights do not sum to 1");
  }
  g.embedded_dim_ = total;
  g.gamma_ = make_prob_vec(std::move(w));
  return g;
}

GibbsSpec GibbsSpec::from_energies_and_weights(std::vector<double> energies, double beta,
                                               std::span<const Rational> weights,
                                               double tolerance) {
  GibbsSpec thermal = from_energies(std::move(energies), beta);
  GibbsSpec rational = from_weights(weights);
  if (thermal.dim() != rational.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "energies and weights differ in length");
  }
  for (std::size_t i = 0; i < thermal.dim(); ++i) {
    if (std::abs(thermal.gamma()[i] - rational.gamma()[i]) > tolerance) {
      throw Error(ErrorCode::InvalidArgument,
                  "weight " + std::to_string(i) + " is not proportional to exp(-beta E)");
    }
  }
  rational.energies_ = thermal.energies_;
  rational.beta_ = thermal.beta_;
  return rational;
}

ProbVec embed(const ProbVec& p, const GibbsSpec& g) {
  if (p.dim() != g.dim()) throw Error(ErrorCode::DimensionMismatch, "p and Gibbs dims differ");
  if (!g.has_rational_weights()) {
    throw Error(ErrorCode::IrrationalWeights, "embedding needs rational Gibbs weights");
  }
  if (g.embedded_dim() > (1u << 24)) {
    throw Error(ErrorCode::DimensionTooLarge, "embedded dimension exceeds 2^24");
  }
  std::vector<double> out;
  out.reserve(g.embedded_dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const std::uint64_t d = g.splits()[i];
    out.insert(out.end(), d, p[i] / static_cast<double>(d));
  }
  return make_prob_vec(std::move(out));
}

namespace {

std::vector<TypeClass> sort_and_merge(std::vector<TypeClass> classes) {
  std::erase_if(classes, [](const TypeClass& c) {
    return c.multiplicity <= 0 || c.log_prob == -kInf;
  });
  std::sort(classes.begin(), classes.end(),
            [](const TypeClass& a, const TypeClass& b) { return a.log_prob > b.log_prob; });
  std::vector<TypeClass> merged;
  merged.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size();) {
    std::size_t j = i + 1;
    while (j < classes.size() && close_log(classes[i].log_prob, classes[j].log_prob)) ++j;
    if (j == i + 1) {
      merged.push_back(std::move(classes[i]));
    } else {
      BigInt count = 0;
      double log_mass = -kInf;
      for (std::size_t k = i; k < j; ++k) {
        count += classes[k].multiplicity;
        log_mass = log_add(log_mass, classes[k].log_prob + log_big(classes[k].multiplicity));
      }
      merged.push_back({log_mass - log_big(count), std::move(count)});
    }
    i = j;
  }
  return merged;
}

}  // namespace

ProductDist ProductDist::from_classes(std::vector<TypeClass> classes, BigInt outcome_count,
                                      std::vector<Factor> factors) {
  ProductDist d;
  d.factors_ = std::move(factors);
  d.classes_ = sort_and_merge(std::move(classes));
  d.outcome_count_ = std::move(outcome_count);
  d.build_caches();
  if (d.classes_.empty()) throw Error(ErrorCode::InvalidArgument, "distribution has no mass");
  if (d.cum_count_.back() > d.outcome_count_) {
    throw Error(ErrorCode::InvalidArgument, "class multiplicities exceed outcome count");
  }
  return d;
}

void ProductDist::build_caches() {
  log_outcome_count_ = log_big(outcome_count_);
  const std::size_t c = classes_.size();
  cum_count_.resize(c);
  log_cum_count_.resize(c);
  cum_mass_.resize(c);
  log_mass_.resize(c);
  log_suffix_.assign(c + 1, -kInf);
  BigInt running = 0;
  KahanSum mass;
  for (std::size_t i = 0; i < c; ++i) {
    running += classes_[i].multiplicity;
    cum_count_[i] = running;
    log_cum_count_[i] = log_big(running);
    log_mass_[i] = classes_[i].log_prob + log_big(classes_[i].multiplicity);
    mass += std::exp(log_mass_[i]);
    cum_mass_[i] = mass.value();
  }
  for (std::size_t i = c; i-- > 0;) log_suffix_[i] = log_add(log_suffix_[i + 1], log_mass_[i]);
}

const BigInt& ProductDist::support_size() const { return cum_count_.back(); }

double ProductDist::log_support_size() const { return log_cum_count_.back(); }

double ProductDist::total_mass() const { return cum_mass_.back(); }

double ProductDist::log_suffix_mass(std::size_t i) const {
  return i < log_suffix_.size() ? log_suffix_[i] : -kInf;
}

double ProductDist::prefix_sum_at_rank(const BigInt& k) const {
  if (k < 0 || k > outcome_count_) {
    throw Error(ErrorCode::RankOutOfRange, "rank outside [0, outcome count]");
  }
  if (k == 0) return 0.0;
  if (k >= support_size()) return total_mass();
  const auto it = std::lower_bound(cum_count_.begin(), cum_count_.end(), k);
  const auto i = static_cast<std::size_t>(it - cum_count_.begin());
  const double before = i == 0 ? 0.0 : cum_mass_[i - 1];
  const BigInt consumed = i == 0 ? BigInt(0) : cum_count_[i - 1];
  return before + std::exp(log_big(k - consumed) + classes_[i].log_prob);
}

double ProductDist::prefix_sum_at_log_rank(double log_k) const {
  if (log_k == -kInf) return 0.0;
  if (std::isnan(log_k) || log_k > log_outcome_count_ + 1e-12 * std::max(1.0, log_outcome_count_)) {
    throw Error(ErrorCode::RankOutOfRange, "rank exp(" + fmt(log_k) + ") beyond outcome count");
  }
  if (log_k >= log_cum_count_.back()) return total_mass();
  const auto it = std::lower_bound(log_cum_count_.begin(), log_cum_count_.end(), log_k);
  const auto i = static_cast<std::size_t>(it - log_cum_count_.begin());
  const double before = i == 0 ? 0.0 : cum_mass_[i - 1];
  const double log_partial = i == 0 ? log_k : log_sub(log_k, log_cum_count_[i - 1]);
  return before + std::exp(log_partial + classes_[i].log_prob);
}

double ProductDist::log_tail_after_rank(const BigInt& k) const {
  if (k < 0 || k > outcome_count_) {
    throw Error(ErrorCode::RankOutOfRange, "rank outside [0, outcome count]");
  }
  if (k >= support_size()) return -kInf;
  const auto it = std::lower_bound(cum_count_.begin(), cum_count_.end(), k);
  const auto i = static_cast<std::size_t>(it - cum_count_.begin());
  const BigInt rest = cum_count_[i] - k;
  double out = log_suffix_[i + 1];
  if (rest > 0) out = log_add(out, log_big(rest) + classes_[i].log_prob);
  return out;
}

double ProductDist::log_tail_after_log_rank(double log_k) const {
  if (log_k == -kInf) return log_suffix_[0];
  if (std::isnan(log_k) || log_k > log_outcome_count_ + 1e-12 * std::max(1.0, log_outcome_count_)) {
    throw Error(ErrorCode::RankOutOfRange, "rank exp(" + fmt(log_k) + ") beyond outcome count");
  }
  if (log_k >= log_cum_count_.back()) return -kInf;
  const auto it = std::lower_bound(log_cum_count_.begin(), log_cum_count_.end(), log_k);
  const auto i = static_cast<std::size_t>(it - log_cum_count_.begin());
  const double log_rest = log_sub(log_cum_count_[i], log_k);
  return log_add(log_suffix_[i + 1], log_rest + classes_[i].log_prob);
}

std::vector<double> ProductDist::densify(std::size_t cap) const {
  if (outcome_count_ > cap) {
    throw Error(ErrorCode::DimensionTooLarge, "dense form exceeds cap " + std::to_string(cap));
  }
  std::vector<double> out;
  out.reserve(outcome_count_.convert_to<std::size_t>());
  for (const TypeClass& c : classes_) {
    out.insert(out.end(), c.multiplicity.convert_to<std::size_t>(), std::exp(c.log_prob));
  }
  out.resize(outcome_count_.convert_to<std::size_t>(), 0.0);
  return out;
}

namespace {

struct Group {
  double log_value;
  std::uint64_t count;
};

std::vector<Group> group_values(const ProbVec& p) {
  std::vector<double> vals;
  for (double x : p.entries()) {
    if (x > 0.0) vals.push_back(x);
  }
  std::sort(vals.begin(), vals.end(), std::greater<>());
  std::vector<Group> groups;
  for (double x : vals) {
    const double lx = std::log(x);
    if (!groups.empty() && close_log(groups.back().log_value, lx)) {
      ++groups.back().count;
    } else {
      groups.push_back({lx, 1});
    }
  }
  return groups;
}

double log_composition_count(std::uint32_t n, std::size_t parts) {
  return std::lgamma(n + parts) - std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(parts));
}

void enumerate(const std::vector<Group>& groups, std::size_t level, std::uint32_t remaining,
               double log_prob, const BigInt& mult, std::vector<TypeClass>& out) {
  const Group& g = groups[level];
  if (level + 1 == groups.size()) {
    out.push_back({log_prob + remaining * g.log_value,
                   mult * boost::multiprecision::pow(BigInt(g.count), remaining)});
    return;
  }
  BigInt binom = 1;
  BigInt power = 1;
  for (std::uint32_t k = 0; k <= remaining; ++k) {
    enumerate(groups, level + 1, remaining - k, log_prob + k * g.log_value, mult * binom * power,
              out);
    binom = binom * (remaining - k) / (k + 1);
    power *= g.count;
  }
}

std::vector<TypeClass> factor_classes(const Factor& f, std::size_t cap) {
  const std::vector<Group> groups = group_values(f.dist);
  if (f.exponent == 0) return {{0.0, BigInt(1)}};
  if (log_composition_count(f.exponent, groups.size()) > std::log(static_cast<double>(cap))) {
    throw Error(ErrorCode::ClassExplosion, "type classes of a factor exceed cap");
  }
  std::vector<TypeClass> out;
  enumerate(groups, 0, f.exponent, 0.0, BigInt(1), out);
  return out;
}

}  // namespace

ProductDist tensor_product(std::span<const Factor> factors, const ProductOptions& options) {
  if (factors.empty()) throw Error(ErrorCode::InvalidArgument, "no factors");
  BigInt outcomes = 1;
  for (const Factor& f : factors) {
    outcomes *= boost::multiprecision::pow(BigInt(f.dist.dim()), f.exponent);
  }
  std::vector<TypeClass> acc{{0.0, BigInt(1)}};
  for (const Factor& f : factors) {
    std::vector<TypeClass> next = factor_classes(f, options.class_cap);
    if (static_cast<double>(acc.size()) * static_cast<double>(next.size()) >
        static_cast<double>(options.class_cap)) {
      throw Error(ErrorCode::ClassExplosion, "combined type classes exceed cap");
    }
    std::vector<TypeClass> combined;
    combined.reserve(acc.size() * next.size());
    for (const TypeClass& a : acc) {
      for (const TypeClass& b : next) {
        combined.push_back({a.log_prob + b.log_prob, a.multiplicity * b.multiplicity});
      }
    }
    acc = sort_and_merge(std::move(combined));
  }
  return ProductDist::from_classes(std::move(acc), std::move(outcomes),
                                   std::vector<Factor>(factors.begin(), factors.end()));
}

ProductDist tensor_power(const ProbVec& p, std::uint32_t n, const ProductOptions& options) {
  const Factor f{p, n};
  return tensor_product(std::span<const Factor>(&f, 1), options);
}

double prefix_sum_at_rank(const ProductDist& d, const BigInt& k) { return d.prefix_sum_at_rank(k); }

}  // namespace majorate

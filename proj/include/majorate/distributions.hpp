#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace majorate {

using BigInt = boost::multiprecision::cpp_int;

/// Natural log of a positive big integer; -inf for zero.
double log_big(const BigInt& x);

/// floor(exp(log_value)), accurate to double precision in the leading bits.
BigInt big_from_log(double log_value);

/// Smallest integer k with k >= exp(log_value); values within 1e-9 of an integer snap to it.
BigInt big_ceil_from_log(double log_value);

inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kNegativeTolerance = 1e-12;

class ProbVec {
 public:
  ProbVec() = default;

  std::size_t dim() const { return entries_.size(); }
  std::span<const double> entries() const { return entries_; }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::size_t support_size() const;

  friend ProbVec make_prob_vec(std::vector<double> entries, double tolerance);
  friend bool operator==(const ProbVec&, const ProbVec&) = default;

 private:
  explicit ProbVec(std::vector<double> entries) : entries_(std::move(entries)) {}
  std::vector<double> entries_;
};

/// Clamps round-off negatives and renormalises.
ProbVec make_prob_vec(std::vector<double> entries, double tolerance = kSumTolerance);

ProbVec from_amplitudes(std::span<const double> amplitudes);

ProbVec uniform(std::size_t dim);

/// Point mass on the first outcome.
ProbVec sharp(std::size_t dim);

/// Appends zeros up to `dim`.
ProbVec pad(const ProbVec& p, std::size_t dim);

/// Kronecker product of two vectors (dense).
ProbVec kron(const ProbVec& a, const ProbVec& b);

struct SortedProbVec {
  std::vector<double> entries;
  std::vector<std::size_t> permutation;
};

SortedProbVec sort_desc(const ProbVec& p);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

class GibbsSpec {
 public:
  /// Thermal weights exp(-beta E_i) with no rational form; embedding is refused.
  static GibbsSpec from_energies(std::vector<double> energies, double beta);

  /// Rational weights d_i/D; energies are left empty.
  static GibbsSpec from_weights(std::span<const Rational> weights);

  /// Both forms; the rationals must agree with exp(-beta E_i) to `tolerance`.
  static GibbsSpec from_energies_and_weights(std::vector<double> energies, double beta,
                                             std::span<const Rational> weights,
                                             double tolerance = 1e-9);

  std::size_t dim() const { return gamma_.dim(); }
  const ProbVec& gamma() const { return gamma_; }
  std::span<const double> energies() const { return energies_; }
  std::optional<double> beta() const { return beta_; }
  bool has_rational_weights() const { return !splits_.empty(); }
  std::span<const std::uint64_t> splits() const { return splits_; }
  std::uint64_t embedded_dim() const { return embedded_dim_; }

 private:
  ProbVec gamma_;
  std::vector<double> energies_;
  std::optional<double> beta_;
  std::vector<std::uint64_t> splits_;
  std::uint64_t embedded_dim_ = 0;
};

/// Splits outcome i into d_i equal parts; the Gibbs state maps to uniform.
ProbVec embed(const ProbVec& p, const GibbsSpec& g);

struct Factor {
  ProbVec dist;
  std::uint32_t exponent = 0;
};

struct TypeClass {
  double log_prob = 0.0;
  BigInt multiplicity;
};

inline constexpr std::size_t kDefaultClassCap = 10'000'000;

/// Sorted type-class form of a product of i.i.d. factors. Zero-probability
/// outcomes are not stored as classes; `outcome_count` still counts them.
class ProductDist {
 public:
  /// Sorts descending and merges log-probabilities equal to within 1e-12
  /// (relative to max(1, |log_prob|)); mass is preserved on merge.
  static ProductDist from_classes(std::vector<TypeClass> classes, BigInt outcome_count,
                                  std::vector<Factor> factors = {});

  std::span<const Factor> factors() const { return factors_; }
  std::span<const TypeClass> classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  const BigInt& outcome_count() const { return outcome_count_; }
  const BigInt& support_size() const;
  double log_outcome_count() const { return log_outcome_count_; }
  double log_support_size() const;
  double total_mass() const;

  /// Count of outcomes in classes 0..i.
  const BigInt& cumulative_count(std::size_t i) const { return cum_count_[i]; }
  double log_cumulative_count(std::size_t i) const { return log_cum_count_[i]; }
  /// Mass of classes 0..i.
  double cumulative_mass(std::size_t i) const { return cum_mass_[i]; }
  /// log of the mass of classes i..end; -inf past the end.
  double log_suffix_mass(std::size_t i) const;

  /// Sum of the k largest outcome probabilities.
  double prefix_sum_at_rank(const BigInt& k) const;
  /// Same with real rank k = exp(log_k); linear between integer ranks.
  double prefix_sum_at_log_rank(double log_k) const;
  /// log of the mass strictly after rank k, summed from the tail side.
  double log_tail_after_rank(const BigInt& k) const;
  double log_tail_after_log_rank(double log_k) const;

  /// Sorted dense vector including zero outcomes.
  std::vector<double> densify(std::size_t cap = 1u << 20) const;

 private:
  void build_caches();

  std::vector<Factor> factors_;
  std::vector<TypeClass> classes_;
  BigInt outcome_count_;
  double log_outcome_count_ = 0.0;
  std::vector<BigInt> cum_count_;
  std::vector<double> log_cum_count_;
  std::vector<double> cum_mass_;
  std::vector<double> log_suffix_;
  std::vector<double> log_mass_;
};

struct ProductOptions {
  std::size_t class_cap = kDefaultClassCap;
};

ProductDist tensor_product(std::span<const Factor> factors, const ProductOptions& options = {});

ProductDist tensor_power(const ProbVec& p, std::uint32_t n, const ProductOptions& options = {});

double prefix_sum_at_rank(const ProductDist& d, const BigInt& k);

}  // namespace majorate

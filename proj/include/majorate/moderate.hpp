#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "majorate/distributions.hpp"

namespace majorate {

/// t_n = c n^(-alpha) with 0 < alpha < 1/2.
class ModerateSequence {
 public:
  ModerateSequence() = default;
  ModerateSequence(double c, double alpha);

  double c() const { return c_; }
  double alpha() const { return alpha_; }
  double t(double n) const;
  /// n t_n^2
  double scale(double n) const;
  /// e^(-n t_n^2)
  double epsilon_direct(double n) const;
  /// 1 - e^(-n t_n^2)
  double epsilon_converse(double n) const;

 private:
  double c_ = 1.0;
  double alpha_ = 1.0 / 3.0;
};

struct TailReport {
  std::uint32_t n = 0;
  double x = 0.0;
  double sum = 0.0;
  double log_sum = 0.0;
  /// ln(sum) / (n t_n^2); NaN when no sequence was supplied.
  double exponent_estimate = 0.0;
  /// -x^2 / 2V; -inf when V = 0 and x != 0.
  double predicted_exponent = 0.0;
};

/// ln k_n(a, x) = n H(a) + x n t_n.
double log_k_n(const ProbVec& a, double x, std::uint32_t n, const ModerateSequence& t);

/// ln K_n(x) = m H(q) + n H(f) + x n t_n.
double log_K_n(const ProbVec& q, const ProbVec& f, std::uint32_t n, std::uint32_t m, double x,
               const ModerateSequence& t);

enum class MagnitudeSide { above, below };
enum class RankSide { head, tail };

/// Mass of outcomes of a^n that are >= exp(log_threshold) (above) or <= it (below).
/// With a sequence, x is read off from log_threshold = -ln k_n(a, x).
TailReport magnitude_tail_sum(const ProbVec& a, std::uint32_t n, double log_threshold,
                              MagnitudeSide side, const ModerateSequence* t = nullptr,
                              const ProductOptions& options = {});

/// Sum over ranks i <= k (head) or i >= k (tail) of sorted a^n, k = exp(log_rank).
/// With a sequence, x is read off from log_rank = ln k_n(a, x).
TailReport rank_tail_sum(const ProbVec& a, std::uint32_t n, double log_rank, RankSide side,
                         const ModerateSequence* t = nullptr, const ProductOptions& options = {});

/// Pr[sum_j X_j >= n t_n] for i.i.d. X with the given finite alphabet, centred
/// on its mean; predicted exponent is -1/(2 Var X).
TailReport iid_upper_tail(std::span<const double> values, const ProbVec& probs, std::uint32_t n,
                          const ModerateSequence& t);

struct CrossingValues {
  /// +inf when nu = 1 and mu != 0.
  double z_C = 0.0;
  double z_T = 0.0;
};

CrossingValues crossing_values(double mu, double nu);

/// 2 mu - z_C (mu < 0, nu < 1); z_C (mu < 0, nu > 1); z_T (mu > 0).
double cutting_point(double mu, double nu);

struct CutAndPile {
  ProductDist distribution;
  /// ln of the mass moved onto the largest outcome; equals ln TVD to the input.
  double log_moved_mass = 0.0;
  /// Ranks 1..kept_ranks survive.
  BigInt kept_ranks;
};

/// Moves all mass at sorted ranks >= exp(log_cut_rank) onto the largest outcome.
CutAndPile cut_and_pile(const ProductDist& P, double log_cut_rank);

/// P = p^n (x) f^m and Q = q^m (x) f^n, with the quantities the tail bounds use.
struct TotalStates {
  ProductDist P;
  ProductDist Q;
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  ModerateSequence t;
  /// H(Q) = m H(q) + n H(f)
  double entropy_Q = 0.0;
  /// V(p) V(q)^-1 (H(f) - H(q)) / (H(f) - H(p))
  double nu = 1.0;
  double variance_p = 0.0;

  double log_K(double x) const;
};

TotalStates build_total_states(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                               std::uint32_t n, std::uint32_t m, const ModerateSequence& t,
                               const ProductOptions& options = {});

/// r_n(mu) = (H(f) - H(p) + mu t_n) / (H(f) - H(q)).
double rate_at_mu(const ProbVec& p, const ProbVec& q, const ProbVec& f, std::uint32_t n,
                  double mu, const ModerateSequence& t);

/// Total states at m = floor(n r_n(mu)).
TotalStates total_states_at_mu(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                               std::uint32_t n, double mu, const ModerateSequence& t,
                               const ProductOptions& options = {});

enum class DominanceMode { cis, trans };

/// cis: sum_{i<=K(x)} P >= sum_{i<=K(x)} Q. trans: sum_{i>=K(x)} P >= sum_{i<=K(x)} Q.
std::vector<bool> dominance_check(const TotalStates& s, std::span<const double> x_grid,
                                  DominanceMode mode);

struct CutAndPileConstruction {
  TotalStates states;
  double mu = 0.0;
  double z = 0.0;
  double y = 0.0;
  double log_cut_rank = 0.0;
  CutAndPile cut;
  /// exp(-(z - mu - 2 zeta)^2 / 2V(p) n t_n^2), or one minus it for mu > 0.
  double delta_bound = 0.0;
  double log_delta_bound = 0.0;
};

inline constexpr double kDefaultZeta = 0.05;

CutAndPileConstruction cut_and_pile_construction(const ProbVec& p, const ProbVec& q,
                                                 const ProbVec& f, std::uint32_t n, double mu,
                                                 const ModerateSequence& t,
                                                 double zeta = kDefaultZeta,
                                                 const ProductOptions& options = {});

}  // namespace majorate

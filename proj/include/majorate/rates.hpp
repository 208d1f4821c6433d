#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "majorate/distributions.hpp"
#include "majorate/entropic.hpp"
#include "majorate/majorisation.hpp"
#include "majorate/moderate.hpp"

namespace majorate {

/// direct: eps_n = e^(-n t_n^2). converse: eps_n = 1 - e^(-n t_n^2).
enum class Regime { direct, converse };

double regime_epsilon(Regime regime, const ModerateSequence& t, std::uint32_t n);

struct RateExpansion {
  double R_inf = 0.0;
  Irreversibility nu;
  /// Multiplier of t_n; <= 0 for direct, >= 0 for converse.
  double coefficient = 0.0;
  Regime regime = Regime::direct;
  Direction direction = Direction::entanglement;

  double evaluate(double t_n) const { return R_inf + coefficient * t_n; }
};

struct ExpandedRate {
  RateExpansion expansion;
  double R_n = 0.0;
};

/// R_inf -+ sqrt(2V(p)) |1 -+ 1/sqrt(nu)| t_n / mean(q), in the moments of `ctx`.
ExpandedRate expand_rate(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx,
                         Regime regime, const ModerateSequence& t, std::uint32_t n,
                         Metric metric = Metric::tvd);

/// (H(f) - H(p) +- sqrt(2V(p)) |1 +- 1/sqrt(nu)| t) / (H(f) - H(q)) with the
/// free-state nu = V(p)/V(q) (H(f) - H(q))/(H(f) - H(p)).
double free_state_rate(const ProbVec& p, const ProbVec& q, const ProbVec& f, Regime regime,
                       double t_n);

struct ExactRatePoint {
  std::uint32_t n = 0;
  /// Requested error level.
  double epsilon = 0.0;
  /// Minimal error actually reached at m_star.
  double achieved_epsilon = 0.0;
  std::uint32_t m_star = 0;
  std::uint64_t rate_num = 0;
  std::uint64_t rate_den = 1;
  Metric metric = Metric::tvd;

  double rate() const { return static_cast<double>(m_star) / n; }
};

inline constexpr std::size_t kDenseInfidelityCap = 16;

struct ExactRateOptions {
  Metric metric = Metric::tvd;
  ProductOptions product;
  std::uint32_t max_m = 100'000;
};

/// Minimal error of the total states at a given m: P ~< Q (entanglement) or P ~> Q (thermodynamic).
double total_state_epsilon(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                           std::uint32_t n, std::uint32_t m, Direction direction,
                           const ExactRateOptions& options = {});

/// Largest m with total_state_epsilon(m) <= epsilon.
ExactRatePoint exact_optimal_rate(const ProbVec& p, const ProbVec& q, const ProbVec& f,
                                  std::uint32_t n, double epsilon, Direction direction,
                                  const ExactRateOptions& options = {});

/// Thermodynamic search on the embedded vectors with f uniform over the embedded space.
ExactRatePoint exact_optimal_rate(const ProbVec& p, const ProbVec& q, const GibbsSpec& gibbs,
                                  std::uint32_t n, double epsilon,
                                  const ExactRateOptions& options = {});

struct ResonanceGap {
  Irreversibility nu;
  /// |1 - 1/sqrt(nu)|; 1 when nu is infinite, 0 when indeterminate.
  double gap = 0.0;
};

ResonanceGap resonance_gap(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx = {});

/// Binary p = [x, 1 - x] with x in (1/2, 1) and nu_ent(p, q) = 1.
ProbVec resonant_binary_partner(const ProbVec& q);

struct ConvergenceRow {
  std::uint32_t n = 0;
  double epsilon = 0.0;
  std::uint32_t m_star = 0;
  double exact_rate = 0.0;
  double expanded_rate = 0.0;
  /// exact - expanded
  double residual = 0.0;
};

/// Exact rates at eps_n against the expansion, one row per grid point in grid order.
/// The expansion uses H for entanglement and D(. || f) for thermodynamics.
std::vector<ConvergenceRow> convergence_report(const ProbVec& p, const ProbVec& q,
                                               const ProbVec& f, Direction direction,
                                               Regime regime, const ModerateSequence& t,
                                               std::span<const std::uint32_t> n_grid,
                                               const ExactRateOptions& options = {});

}  // namespace majorate

#pragma once

#include <optional>

#include "majorate/distributions.hpp"

namespace majorate {

/// Entropic quantities in nats.
struct EntropicSummary {
  double H = 0.0;
  double V = 0.0;
  std::optional<double> D_rel;
  std::optional<double> V_rel;
};

double shannon_entropy(const ProbVec& a);

/// Sum of a_i (ln a_i + H)^2.
double entropy_variance(const ProbVec& a);

/// E[(ln a)^2] - H^2; agrees with entropy_variance up to cancellation error.
double entropy_variance_second_moment(const ProbVec& a);

double relative_entropy(const ProbVec& a, const ProbVec& b);

double relative_entropy_variance(const ProbVec& a, const ProbVec& b);

EntropicSummary summarise(const ProbVec& a, const ProbVec* reference = nullptr);

enum class Direction { entanglement, thermodynamic };

/// Entanglement uses H and V; thermodynamics uses D and V relative to gamma.
struct ResourceContext {
  Direction direction = Direction::entanglement;
  std::optional<ProbVec> gamma;

  static ResourceContext entanglement() { return {}; }
  static ResourceContext thermodynamic(ProbVec gamma) {
    return {Direction::thermodynamic, std::move(gamma)};
  }
};

/// The (mean, variance) pair the rates are built from: (H, V) or (D, V_rel).
struct ResourceMoments {
  double mean = 0.0;
  double variance = 0.0;
};

ResourceMoments resource_moments(const ProbVec& p, const ResourceContext& ctx);

double asymptotic_rate(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx = {});

struct Irreversibility {
  enum class Kind { finite, infinite, indeterminate };
  Kind kind = Kind::finite;
  /// +inf when infinite, 0 when indeterminate.
  double value = 1.0;

  bool is_finite() const { return kind == Kind::finite; }
};

Irreversibility irreversibility(const ProbVec& p, const ProbVec& q,
                               const ResourceContext& ctx = {});

}  // namespace majorate

#include "majorate/entropic.hpp"

#include <cmath>

#include "majorate/error.hpp"
#include "majorate/numeric.hpp"

namespace majorate {

double shannon_entropy(const ProbVec& a) {
  KahanSum h;
  for (double x : a.entries()) {
    if (x > 0.0) h += -x * std::log(x);
  }
  return std::max(0.0, h.value());
}

double entropy_variance(const ProbVec& a) {
  const double h = shannon_entropy(a);
  KahanSum v;
  for (double x : a.entries()) {
    if (x > 0.0) {
      const double d = std::log(x) + h;
      v += x * d * d;
    }
  }
  return std::max(0.0, v.value());
}

double entropy_variance_second_moment(const ProbVec& a) {
  KahanSum m1;
  KahanSum m2;
  for (double x : a.entries()) {
    if (x > 0.0) {
      const double l = std::log(x);
      m1 += -x * l;
      m2 += x * l * l;
    }
  }
  return std::max(0.0, m2.value() - m1.value() * m1.value());
}

namespace {

void check_support(const ProbVec& a, const ProbVec& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "relative entropy dims");
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] > 0.0 && b[i] == 0.0) {
      throw Error(ErrorCode::SupportViolation, "a has mass where b vanishes");
    }
  }
}

}  // namespace

double relative_entropy(const ProbVec& a, const ProbVec& b) {
  check_support(a, b);
  KahanSum d;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] > 0.0) d += a[i] * (std::log(a[i]) - std::log(b[i]));
  }
  return std::max(0.0, d.value());
}

double relative_entropy_variance(const ProbVec& a, const ProbVec& b) {
  const double d = relative_entropy(a, b);
  KahanSum v;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] > 0.0) {
      const double e = std::log(a[i]) - std::log(b[i]) - d;
      v += a[i] * e * e;
    }
  }
  return std::max(0.0, v.value());
}

EntropicSummary summarise(const ProbVec& a, const ProbVec* reference) {
  EntropicSummary s{shannon_entropy(a), entropy_variance(a), std::nullopt, std::nullopt};
  if (reference != nullptr) {
    s.D_rel = relative_entropy(a, *reference);
    s.V_rel = relative_entropy_variance(a, *reference);
  }
  return s;
}

ResourceMoments resource_moments(const ProbVec& p, const ResourceContext& ctx) {
  if (ctx.direction == Direction::entanglement) {
    return {shannon_entropy(p), entropy_variance(p)};
  }
  const ProbVec gamma = ctx.gamma ? *ctx.gamma : uniform(p.dim());
  return {relative_entropy(p, gamma), relative_entropy_variance(p, gamma)};
}

namespace {

constexpr double kZero = 1e-15;

ResourceMoments target_moments(const ProbVec& q, const ResourceContext& ctx) {
  const ResourceMoments m = resource_moments(q, ctx);
  if (m.mean <= kZero) {
    throw Error(ErrorCode::DegenerateTarget,
                ctx.direction == Direction::entanglement ? "H(q) = 0" : "D(q||gamma) = 0");
  }
  return m;
}

}  // namespace

double asymptotic_rate(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx) {
  const ResourceMoments mq = target_moments(q, ctx);
  return resource_moments(p, ctx).mean / mq.mean;
}

Irreversibility irreversibility(const ProbVec& p, const ProbVec& q, const ResourceContext& ctx) {
  using Kind = Irreversibility::Kind;
  const ResourceMoments mq = target_moments(q, ctx);
  const ResourceMoments mp = resource_moments(p, ctx);
  if (mp.mean <= kZero) return {Kind::indeterminate, 0.0};
  const double vp = mp.variance <= kZero ? 0.0 : mp.variance;
  const double vq = mq.variance <= kZero ? 0.0 : mq.variance;
  if (vq == 0.0) {
    if (vp == 0.0) return {Kind::indeterminate, 0.0};
    return {Kind::infinite, kInf};
  }
  return {Kind::finite, (vp / mp.mean) / (vq / mq.mean)};
}

}  // namespace majorate

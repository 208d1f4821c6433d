#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace majorate {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier-compensated accumulator.
class KahanSum {
 public:
  KahanSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_sum(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s += x;
  return s.value();
}

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// log(exp(a) - exp(b)) for a >= b; returns -inf when the difference vanishes.
inline double log_sub(double a, double b) {
  if (b == -kInf) return a;
  if (b >= a) return -kInf;
  return a + std::log1p(-std::exp(b - a));
}

}  // namespace majorate

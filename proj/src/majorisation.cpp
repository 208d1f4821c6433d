#include "majorate/majorisation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "majorate/error.hpp"
#include "majorate/numeric.hpp"

namespace majorate {

namespace {

constexpr std::size_t kMaxActiveSetDim = 22;

std::vector<double> padded(const ProbVec& p, std::size_t dim) {
  std::vector<double> v(p.entries().begin(), p.entries().end());
  v.resize(dim, 0.0);
  return v;
}

struct Sorted {
  std::vector<double> values;
  std::vector<std::size_t> perm;
};

Sorted sorted_padded(const ProbVec& p, std::size_t dim) {
  Sorted s{padded(p, dim), std::vector<std::size_t>(dim)};
  std::iota(s.perm.begin(), s.perm.end(), std::size_t{0});
  std::stable_sort(s.perm.begin(), s.perm.end(),
                   [&](std::size_t i, std::size_t j) { return s.values[i] > s.values[j]; });
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = s.values[s.perm[i]];
  s.values = std::move(v);
  return s;
}

std::vector<double> prefix_sums(std::span<const double> v) {
  std::vector<double> out(v.size() + 1, 0.0);
  KahanSum s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += v[i];
    out[i + 1] = s.value();
  }
  return out;
}

ProbVec unsort(std::span<const double> sorted_values, std::span<const std::size_t> perm) {
  std::vector<double> out(sorted_values.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = std::max(0.0, sorted_values[i]);
  return make_prob_vec(std::move(out), 1e-8);
}

double tvd_epsilon(const std::vector<double>& A, const std::vector<double>& B) {
  double eps = 0.0;
  for (std::size_t k = 1; k < A.size(); ++k) eps = std::max(eps, B[k] - A[k]);
  return std::min(eps, 1.0);
}

/// Flatten b's head down to level h and raise its tail up to level l, each moving eps.
std::vector<double> flatten_head_fill_tail(const std::vector<double>& bs, double eps) {
  const std::size_t d = bs.size();
  double h = bs[0];
  KahanSum head;
  for (std::size_t j = 1; j <= d; ++j) {
    head += bs[j - 1];
    h = (head.value() - eps) / static_cast<double>(j);
    if (j == d || h >= bs[j]) break;
  }
  double l = bs[d - 1];
  KahanSum tail;
  for (std::size_t j = 1; j <= d; ++j) {
    tail += bs[d - j];
    l = (tail.value() + eps) / static_cast<double>(j);
    if (j == d || l <= bs[d - j - 1]) break;
  }
  std::vector<double> out(d);
  if (h <= l) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(d));
    return out;
  }
  for (std::size_t i = 0; i < d; ++i) out[i] = std::clamp(bs[i], l, h);
  return out;
}

/// Add eps to the largest entry and remove it from the smallest ones.
std::vector<double> cut_and_pile_dense(std::vector<double> as, double eps) {
  as[0] += eps;
  double rem = eps;
  for (std::size_t i = as.size(); i-- > 1 && rem > 0.0;) {
    const double take = std::min(as[i], rem);
    as[i] -= take;
    rem -= take;
  }
  return as;
}

/// Maximises sum sqrt(w_i y_i) over y aligned with w whose prefix sums stay on the
/// required side of `bound`, by enumerating which prefix constraints are tight.
std::vector<double> best_block_solution(const std::vector<double>& w,
                                        const std::vector<double>& bound,
                                        const std::vector<double>& fallback, bool upper) {
  const std::size_t d = w.size();
  if (d > kMaxActiveSetDim) {
    throw Error(ErrorCode::DimensionTooLarge,
                "infidelity search limited to dimension " + std::to_string(kMaxActiveSetDim));
  }
  const std::vector<double> W = prefix_sums(w);
  double best = -1.0;
  std::vector<double> best_y;
  std::vector<double> y(d);
  const std::uint64_t masks = std::uint64_t{1} << (d - 1);
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    double fid = 0.0;
    std::size_t s = 0;
    for (std::size_t e = 1; e <= d; ++e) {
      if (e < d && !((mask >> (e - 1)) & 1u)) continue;
      const double m = std::max(0.0, bound[e] - bound[s]);
      const double ww = W[e] - W[s];
      for (std::size_t i = s; i < e; ++i) y[i] = ww > 0.0 ? w[i] * m / ww : fallback[i];
      fid += std::sqrt(std::max(0.0, ww) * m);
      s = e;
    }
    if (fid <= best) continue;
    KahanSum run;
    bool ok = true;
    for (std::size_t k = 1; k < d && ok; ++k) {
      run += y[k - 1];
      ok = upper ? run.value() <= bound[k] + 1e-12 : run.value() >= bound[k] - 1e-12;
    }
    if (ok) {
      best = fid;
      best_y = y;
    }
  }
  return best_y;
}

}  // namespace

std::vector<double> lorenz(const ProbVec& p, std::size_t dim) {
  const Sorted s = sorted_padded(p, std::max(dim, p.dim()));
  return prefix_sums(s.values);
}

bool majorises(const ProbVec& a, const ProbVec& b, double slack) {
  const std::size_t d = std::max(a.dim(), b.dim());
  const std::vector<double> A = lorenz(a, d);
  const std::vector<double> B = lorenz(b, d);
  for (std::size_t k = 1; k <= d; ++k) {
    if (A[k] < B[k] - slack) return false;
  }
  return true;
}

namespace {

struct LorenzPoint {
  double prefix;
  double log_tail;
};

/// Prefix and tail at rank k, where class i is the first with cumulative count >= k.
LorenzPoint lorenz_point(const ProductDist& D, std::size_t i, const BigInt& k) {
  if (i >= D.class_count()) return {D.total_mass(), -kInf};
  const TypeClass& c = D.classes()[i];
  const double before = i == 0 ? 0.0 : D.cumulative_mass(i - 1);
  if (k == D.cumulative_count(i)) return {D.cumulative_mass(i), D.log_suffix_mass(i + 1)};
  const BigInt consumed = i == 0 ? BigInt(0) : D.cumulative_count(i - 1);
  const double prefix = before + std::exp(log_big(k - consumed) + c.log_prob);
  const double log_tail =
      log_add(D.log_suffix_mass(i + 1), log_big(D.cumulative_count(i) - k) + c.log_prob);
  return {prefix, log_tail};
}

}  // namespace

double lorenz_excess(const ProductDist& A, const ProductDist& B) {
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = -kInf;
  while (i < A.class_count() || j < B.class_count()) {
    BigInt k;
    if (i >= A.class_count()) {
      k = B.cumulative_count(j);
    } else if (j >= B.class_count()) {
      k = A.cumulative_count(i);
    } else {
      k = std::min(A.cumulative_count(i), B.cumulative_count(j));
    }
    const LorenzPoint pa = lorenz_point(A, i, k);
    const LorenzPoint pb = lorenz_point(B, j, k);
    const double excess = (pa.prefix >= 0.5 && pb.prefix >= 0.5)
                              ? std::exp(pa.log_tail) - std::exp(pb.log_tail)
                              : pb.prefix - pa.prefix;
    worst = std::max(worst, excess);
    if (i < A.class_count() && A.cumulative_count(i) == k) ++i;
    if (j < B.class_count() && B.cumulative_count(j) == k) ++j;
  }
  return worst;
}

bool majorises_product(const ProductDist& A, const ProductDist& B, double slack) {
  return lorenz_excess(A, B) <= slack;
}

double tvd(const ProbVec& a, const ProbVec& b) {
  const std::size_t d = std::max(a.dim(), b.dim());
  const std::vector<double> x = padded(a, d);
  const std::vector<double> y = padded(b, d);
  KahanSum s;
  for (std::size_t i = 0; i < d; ++i) s += std::abs(x[i] - y[i]);
  return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

double fidelity(const ProbVec& a, const ProbVec& b) {
  const std::size_t d = std::max(a.dim(), b.dim());
  const std::vector<double> x = padded(a, d);
  const std::vector<double> y = padded(b, d);
  KahanSum s;
  for (std::size_t i = 0; i < d; ++i) s += std::sqrt(x[i] * y[i]);
  return std::clamp(s.value() * s.value(), 0.0, 1.0);
}

double distance(const ProbVec& a, const ProbVec& b, Metric metric) {
  return metric == Metric::tvd ? tvd(a, b) : std::clamp(1.0 - fidelity(a, b), 0.0, 1.0);
}

ApproxMajResult min_epsilon_post(const ProbVec& a, const ProbVec& b, Metric metric) {
  const std::size_t d = std::max(a.dim(), b.dim());
  const std::vector<double> A = lorenz(a, d);
  const Sorted bs = sorted_padded(b, d);
  const std::vector<double> B = prefix_sums(bs.values);
  ApproxMajResult r;
  r.direction = ApproxSide::post;
  r.metric = metric;
  const double eps = tvd_epsilon(A, B);
  if (eps <= kMajorisationSlack) {
    r.epsilon = 0.0;
    r.witness = pad(b, d);
    return r;
  }
  if (metric == Metric::tvd) {
    r.witness = unsort(flatten_head_fill_tail(bs.values, eps), bs.perm);
  } else {
    const Sorted as = sorted_padded(a, d);
    r.witness = unsort(best_block_solution(bs.values, A, as.values, true), bs.perm);
  }
  r.epsilon = distance(b, r.witness, metric);
  return r;
}

ApproxMajResult min_epsilon_pre(const ProbVec& a, const ProbVec& b, Metric metric) {
  const std::size_t d = std::max(a.dim(), b.dim());
  const Sorted as = sorted_padded(a, d);
  const std::vector<double> A = prefix_sums(as.values);
  const std::vector<double> B = lorenz(b, d);
  ApproxMajResult r;
  r.direction = ApproxSide::pre;
  r.metric = metric;
  const double eps = tvd_epsilon(A, B);
  if (eps <= kMajorisationSlack) {
    r.epsilon = 0.0;
    r.witness = pad(a, d);
    return r;
  }
  if (metric == Metric::tvd) {
    r.witness = unsort(cut_and_pile_dense(as.values, eps), as.perm);
  } else {
    const Sorted bs = sorted_padded(b, d);
    std::vector<double> z = best_block_solution(as.values, B, bs.values, false);
    std::sort(z.begin(), z.end(), std::greater<>());
    r.witness = unsort(z, as.perm);
  }
  r.epsilon = distance(a, r.witness, metric);
  return r;
}

ProductApproxResult min_epsilon_post(const ProductDist& A, const ProductDist& B, Metric metric) {
  if (metric != Metric::tvd) {
    throw Error(ErrorCode::MetricUnsupported, "infidelity needs dense distributions");
  }
  return {std::clamp(lorenz_excess(A, B), 0.0, 1.0), ApproxSide::post, metric};
}

ProductApproxResult min_epsilon_pre(const ProductDist& A, const ProductDist& B, Metric metric) {
  ProductApproxResult r = min_epsilon_post(A, B, metric);
  r.direction = ApproxSide::pre;
  return r;
}

namespace {

using Vec4 = std::array<double, 4>;

struct Oracle {
  std::size_t d;
  ApproxSide side;
  Metric metric;
  std::vector<double> target;
  std::vector<double> bound;

  double objective(const Vec4& x) const {
    if (metric == Metric::tvd) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += std::abs(target[i] - x[i]);
      return 0.5 * s;
    }
    double f = 0.0;
    for (std::size_t i = 0; i < d; ++i) f += std::sqrt(std::max(0.0, target[i] * x[i]));
    return 1.0 - f * f;
  }

  bool feasible(const Vec4& x, const std::vector<std::size_t>& order, double tol) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (x[i] < -tol) return false;
      sum += x[i];
    }
    if (std::abs(sum - 1.0) > tol) return false;
    double run = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (k + 1 < d && x[order[k]] < x[order[k + 1]] - tol) return false;
      run += x[order[k]];
      if (k + 1 < d) {
        if (side == ApproxSide::post && run > bound[k + 1] + tol) return false;
        if (side == ApproxSide::pre && run < bound[k + 1] - tol) return false;
      }
    }
    return true;
  }
};

struct Hyperplane {
  Vec4 coef{};
  double rhs = 0.0;
};

bool solve(std::vector<std::array<double, 5>> m, std::size_t d, Vec4& x) {
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    if (std::abs(m[piv][c]) < 1e-12) return false;
    std::swap(m[piv], m[c]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k <= d; ++k) m[r][k] -= f * m[c][k];
    }
  }
  for (std::size_t c = 0; c < d; ++c) x[c] = m[c][d] / m[c][c];
  for (std::size_t c = d; c < 4; ++c) x[c] = 0.0;
  return true;
}

/// All feasible vertices of the arrangement for one sorted-order pattern.
std::vector<Vec4> vertices(const Oracle& o, const std::vector<std::size_t>& order) {
  const std::size_t d = o.d;
  std::vector<Hyperplane> planes;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    Hyperplane h;
    h.coef[order[k]] = 1.0;
    h.coef[order[k + 1]] = -1.0;
    planes.push_back(h);
  }
  {
    Hyperplane h;
    h.coef[order[d - 1]] = 1.0;
    planes.push_back(h);
  }
  for (std::size_t k = 1; k < d; ++k) {
    Hyperplane h;
    for (std::size_t j = 0; j < k; ++j) h.coef[order[j]] = 1.0;
    h.rhs = o.bound[k];
    planes.push_back(h);
  }
  for (std::size_t i = 0; i < d; ++i) {
    Hyperplane h;
    h.coef[i] = 1.0;
    h.rhs = o.target[i];
    planes.push_back(h);
  }
  std::vector<Vec4> out;
  const std::size_t n = planes.size();
  std::vector<std::size_t> pick(d - 1);
  std::vector<bool> sel(n, false);
  std::fill(sel.begin(), sel.begin() + static_cast<long>(d - 1), true);
  do {
    std::vector<std::array<double, 5>> m(d);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!sel[i]) continue;
      for (std::size_t c = 0; c < d; ++c) m[r][c] = planes[i].coef[c];
      m[r][d] = planes[i].rhs;
      ++r;
    }
    for (std::size_t c = 0; c < d; ++c) m[r][c] = 1.0;
    m[r][d] = 1.0;
    Vec4 x{};
    if (solve(m, d, x) && o.feasible(x, order, 1e-10)) {
      for (double& v : x) {
        if (std::abs(v) < 1e-12) v = 0.0;
      }
      out.push_back(x);
    }
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return out;
}

void grid_points(std::size_t d, int grid, std::size_t level, int remaining, Vec4& x,
                 std::vector<Vec4>& out) {
  if (level + 1 == d) {
    x[level] = static_cast<double>(remaining) / grid;
    out.push_back(x);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    x[level] = static_cast<double>(k) / grid;
    grid_points(d, grid, level + 1, remaining - k, x, out);
  }
}

double pattern_search(const Oracle& o, const std::vector<std::size_t>& order, Vec4 x,
                      std::mt19937_64& rng) {
  const std::size_t d = o.d;
  std::vector<Vec4> dirs;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      Vec4 v{};
      v[i] = 1.0;
      v[j] = -1.0;
      dirs.push_back(v);
    }
  }
  const std::size_t base = dirs.size();
  for (std::size_t a = 0; a < base; ++a) {
    for (std::size_t b = a + 1; b < base; ++b) {
      Vec4 v{};
      for (std::size_t c = 0; c < 4; ++c) v[c] = dirs[a][c] + dirs[b][c];
      dirs.push_back(v);
    }
  }
  std::normal_distribution<double> gauss;
  double f = o.objective(x);
  for (double step = 0.05; step > 1e-11;) {
    bool improved = false;
    std::vector<Vec4> trial = dirs;
    for (int r = 0; r < 8; ++r) {
      Vec4 v{};
      double mean = 0.0;
      for (std::size_t c = 0; c < d; ++c) mean += (v[c] = gauss(rng));
      for (std::size_t c = 0; c < d; ++c) v[c] -= mean / static_cast<double>(d);
      trial.push_back(v);
    }
    for (const Vec4& v : trial) {
      Vec4 y = x;
      for (std::size_t c = 0; c < d; ++c) y[c] += step * v[c];
      if (!o.feasible(y, order, 1e-15)) continue;
      const double g = o.objective(y);
      if (g < f - 1e-16) {
        x = y;
        f = g;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return f;
}

}  // namespace

double brute_force_min_epsilon(const ProbVec& a, const ProbVec& b, Metric metric,
                               const OracleOptions& options) {
  const std::size_t d = std::max(a.dim(), b.dim());
  if (d > 4) throw Error(ErrorCode::DimensionTooLarge, "oracle limited to dimension 4");
  Oracle o{d, options.side, metric, {}, {}};
  if (options.side == ApproxSide::post) {
    o.target = padded(b, d);
    o.bound = lorenz(a, d);
  } else {
    o.target = padded(a, d);
    o.bound = lorenz(b, d);
  }
  if (d == 1) return 0.0;
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Vec4> grid;
  if (metric == Metric::infidelity) {
    Vec4 x{};
    grid_points(d, options.grid, 0, options.grid, x, grid);
  }
  double best = kInf;
  do {
    std::vector<Vec4> seeds = vertices(o, order);
    if (metric == Metric::tvd) {
      for (const Vec4& v : seeds) best = std::min(best, o.objective(v));
      continue;
    }
    Vec4 start{};
    double fs = kInf;
    for (const Vec4& v : seeds) {
      if (o.feasible(v, order, 1e-15) && o.objective(v) < fs) {
        fs = o.objective(v);
        start = v;
      }
    }
    for (const Vec4& v : grid) {
      if (o.feasible(v, order, 1e-15) && o.objective(v) < fs) {
        fs = o.objective(v);
        start = v;
      }
    }
    if (fs < kInf) best = std::min(best, pattern_search(o, order, start, rng));
  } while (std::next_permutation(order.begin(), order.end()));
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace majorate

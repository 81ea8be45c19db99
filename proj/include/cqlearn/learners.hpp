#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/geometry.hpp"
#include "cqlearn/inference.hpp"
#include "cqlearn/lp.hpp"
#include "cqlearn/query.hpp"
#include "cqlearn/random.hpp"

namespace cqlearn {

/// ceil(log2 m) for m >= 1.
inline std::uint64_t ceil_log2(std::uint64_t m) {
  std::uint64_t r = 0;
  while ((std::uint64_t{1} << r) < m) ++r;
  return r;
}

/// Query cost of labeling m points and merge-sorting them: m + m*ceil(log2 m).
inline std::uint64_t sort_query_budget(std::uint64_t m) { return m + m * ceil_log2(m); }

// ---------------------------------------------------------------------------
// Sorting by distance to the boundary

namespace detail {

/// True iff |f(a)| <= |f(b)| for two points that both carry label y.
inline bool abs_le(PointId a, PointId b, Label y, SimulatedOracle& oracle, QueryTranscript& t) {
  // y=+1: |f| order is f order; y=-1: reversed.
  return y > 0 ? oracle.query_compare(b, a, t) : oracle.query_compare(a, b, t);
}

inline void merge_sort(std::vector<PointId>& v, std::vector<PointId>& buf, std::size_t lo,
                       std::size_t hi, Label y, SimulatedOracle& oracle, QueryTranscript& t) {
  if (hi - lo < 2) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  merge_sort(v, buf, lo, mid, y, oracle, t);
  merge_sort(v, buf, mid, hi, y, oracle, t);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) buf[k++] = abs_le(v[i], v[j], y, oracle, t) ? v[i++] : v[j++];
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
}

}  // namespace detail

/**
 * Orders ids (all of hidden label y) by nondecreasing |f| with a stable
 * merge sort on comparison answers. Uses at most m*ceil(log2 m) comparisons.
 */
inline std::vector<PointId> sort_with_queries(std::vector<PointId> ids, Label y,
                                              SimulatedOracle& oracle, QueryTranscript& transcript) {
  std::vector<PointId> buf(ids.size());
  detail::merge_sort(ids, buf, 0, ids.size(), y, oracle, transcript);
  return ids;
}

// ---------------------------------------------------------------------------
// Planar cones

namespace detail {

inline Rational cross2(const Rational& ax, const Rational& ay, const Rational& bx, const Rational& by) {
  return ax * by - ay * bx;
}

}  // namespace detail

/**
 * Is z in { apex + alpha (a - apex) + beta (b - apex) : alpha, beta >= 0 }?
 * Only the first two coordinates are read. Degenerate generators are
 * handled exactly: zero generators drop out, parallel ones span a ray and
 * antiparallel ones a line.
 */
inline bool in_cone2d(const RationalVector& apex, const RationalVector& a, const RationalVector& b,
                      const RationalVector& z) {
  const Rational ux = a[0] - apex[0], uy = a[1] - apex[1];
  const Rational vx = b[0] - apex[0], vy = b[1] - apex[1];
  const Rational tx = z[0] - apex[0], ty = z[1] - apex[1];
  const int det = sgn(detail::cross2(ux, uy, vx, vy));
  if (det != 0) {
    // alpha = (t x v) / det, beta = (u x t) / det
    return sgn(detail::cross2(tx, ty, vx, vy)) * det >= 0 && sgn(detail::cross2(ux, uy, tx, ty)) * det >= 0;
  }
  const bool u_zero = ux == 0 && uy == 0;
  const bool v_zero = vx == 0 && vy == 0;
  if (u_zero && v_zero) return tx == 0 && ty == 0;
  const Rational& gx = u_zero ? vx : ux;
  const Rational& gy = u_zero ? vy : uy;
  if (sgn(detail::cross2(gx, gy, tx, ty)) != 0) return false;
  if (!u_zero && !v_zero && sgn(ux * vx + uy * vy) < 0) return true;  // full line
  return sgn(gx * tx + gy * ty) >= 0;
}

namespace detail {

struct Point2 {
  Rational x, y;
  PointId id;
};

/// Convex hull vertices in counter-clockwise order, collinear points dropped.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto turn = [](const Point2& o, const Point2& a, const Point2& b) {
    return sgn(cross2(a.x - o.x, a.y - o.y, b.x - o.x, b.y - o.y));
  };
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/**
 * The confident cone of one label class: apex q (the class point closest to
 * the boundary) and the hull neighbours of q. Every point of the class lies
 * in it, and f(z) is on the far side of f(q) for every z in it.
 */
struct ClassCone {
  RationalVector apex, a, b;
  bool whole_plane = false;

  bool contains(const RationalVector& z) const { return whole_plane || in_cone2d(apex, a, b, z); }
};

inline ClassCone class_cone(std::span<const RationalVector> pool, std::span<const PointId> members,
                            PointId q) {
  std::vector<Point2> pts;
  pts.reserve(members.size());
  for (PointId m : members) pts.push_back({pool[m][0], pool[m][1], m});
  const auto hull = convex_hull(std::move(pts));
  const RationalVector& qp = pool[q];
  ClassCone cone{qp, qp, qp, false};
  auto at = [&](std::size_t i) { return pool[hull[i % hull.size()].id]; };
  auto same = [&](const Point2& h) { return h.x == qp[0] && h.y == qp[1]; };

  if (hull.size() == 1) return cone;
  if (hull.size() == 2) {
    // Collinear class: ray towards the far end, or the full line if q is inside the segment.
    if (same(hull[0])) cone.a = cone.b = at(1);
    else if (same(hull[1])) cone.a = cone.b = at(0);
    else { cone.a = at(0); cone.b = at(1); }
    return cone;
  }
  for (std::size_t i = 0; i < hull.size(); ++i)
    if (same(hull[i])) {
      cone.a = at(i + hull.size() - 1);
      cone.b = at(i + 1);
      return cone;
    }
  // q minimises an affine function over the class but is not a hull vertex,
  // so f is constant along the hull edge through q (or, for an interior q,
  // on the whole plane).
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& s = hull[i];
    const auto& e = hull[(i + 1) % hull.size()];
    if (sgn(cross2(e.x - s.x, e.y - s.y, qp[0] - s.x, qp[1] - s.y)) == 0) {
      cone.a = pool[s.id];
      cone.b = pool[e.id];
      return cone;
    }
  }
  cone.whole_plane = true;
  return cone;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Run bookkeeping

struct RunReport {
  std::vector<int> labels;  // +1/-1 per pool point, 0 only if a run aborted
  QueryStats stats;
  std::uint64_t iterations = 0;  // accepted update steps
  std::uint64_t resamples = 0;   // rejected update steps
  std::vector<std::uint64_t> iteration_queries;  // queries spent in each accepted step
  std::vector<std::size_t> dis_sizes;  // unlabeled pool points before each step, then at the end
};

/// Emitted labels that disagree with the hidden concept.
inline std::size_t soundness_violations(const RunReport& report, const LinearConcept& hidden,
                                        std::span<const RationalVector> pool) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (report.labels[i] != 0 && report.labels[i] != hidden.label_of(pool[i])) ++bad;
  return bad;
}

// ---------------------------------------------------------------------------
// Half-plane learner

/**
 * Label every point of a planar pool. The pool is given lifted, (x, y, 1),
 * so the oracle's hidden concept is an affine half-plane; the cones are
 * computed on (x, y).
 *
 * Each iteration samples `subsample` unlabeled points without replacement,
 * queries their labels, finds the point of each class closest to the
 * boundary with |class|-1 comparisons, and labels every unlabeled point in
 * the cone at that point spanned by its hull neighbours.
 */
inline RunReport learn_2d(std::span<const RationalVector> pool, SimulatedOracle& oracle,
                          std::size_t subsample, std::uint64_t seed) {
  for (const auto& p : pool) {
    if (p.dim() != 3) throw DimensionMismatch(3, p.dim());
    if (p[2] != 1) throw std::invalid_argument("learn_2d: pool must be lifted planar points (x, y, 1)");
  }
  if (subsample == 0) throw std::invalid_argument("learn_2d: subsample must be positive");
  Rng rng(seed);
  RunReport report;
  report.labels.assign(pool.size(), 0);
  std::vector<PointId> remaining(pool.size());
  std::iota(remaining.begin(), remaining.end(), PointId{0});
  QueryTranscript transcript;

  while (!remaining.empty()) {
    report.dis_sizes.push_back(remaining.size());
    const auto before = oracle.stats().total();
    std::vector<PointId> sample;
    for (std::size_t i : sample_without_replacement(rng, remaining.size(), subsample))
      sample.push_back(remaining[i]);

    std::vector<PointId> pos, neg;
    for (PointId s : sample) {
      const Label y = oracle.query_label(s, transcript);
      report.labels[s] = y;
      (y > 0 ? pos : neg).push_back(s);
    }
    auto closest = [&](const std::vector<PointId>& cls, Label y) {
      PointId best = cls.front();
      for (std::size_t i = 1; i < cls.size(); ++i)
        if (!detail::abs_le(best, cls[i], y, oracle, transcript)) best = cls[i];
      return best;
    };
    std::vector<detail::ClassCone> cones;
    std::vector<Label> cone_label;
    if (!pos.empty()) {
      cones.push_back(detail::class_cone(pool, pos, closest(pos, +1)));
      cone_label.push_back(+1);
    }
    if (!neg.empty()) {
      cones.push_back(detail::class_cone(pool, neg, closest(neg, -1)));
      cone_label.push_back(-1);
    }

    std::vector<PointId> next;
    next.reserve(remaining.size());
    for (PointId z : remaining) {
      int assigned = report.labels[z];
      for (std::size_t c = 0; c < cones.size(); ++c) {
        if (!cones[c].contains(pool[z])) continue;
        if (assigned != 0 && assigned != cone_label[c])
          throw Inconsistent("learn_2d: positive and negative cones overlap");
        assigned = cone_label[c];
      }
      if (assigned == 0) next.push_back(z);
      else report.labels[z] = assigned;
    }
    remaining = std::move(next);
    report.iteration_queries.push_back(oracle.stats().total() - before);
    ++report.iterations;
  }
  report.dis_sizes.push_back(0);
  report.stats = oracle.stats();
  return report;
}

// ---------------------------------------------------------------------------
// Weak confident learner and boosting

struct WeakResult {
  PartialHypothesis hypothesis;
  QueryTranscript transcript;
};

/**
 * Queries the label of every sample entry (duplicates included), sorts each
 * label class by |f|, and labels every target whose label follows from
 * those answers. Uses 4k labels and at most 4k*ceil(log2 4k) comparisons
 * for a sample of size 4k.
 */
inline WeakResult weak_confident_learn(std::span<const PointId> sample,
                                       std::span<const RationalVector> pool, SimulatedOracle& oracle,
                                       std::span<const PointId> targets) {
  WeakResult out;
  std::vector<PointId> pos, neg;
  for (PointId s : sample) (oracle.query_label(s, out.transcript) > 0 ? pos : neg).push_back(s);
  sort_with_queries(std::move(pos), +1, oracle, out.transcript);
  sort_with_queries(std::move(neg), -1, oracle, out.transcript);
  out.hypothesis = infer_all(out.transcript, pool, targets);
  return out;
}

inline WeakResult weak_confident_learn(std::span<const PointId> sample,
                                       std::span<const RationalVector> pool, SimulatedOracle& oracle) {
  std::vector<PointId> all(pool.size());
  std::iota(all.begin(), all.end(), PointId{0});
  return weak_confident_learn(sample, pool, oracle, all);
}

struct BoostConfig {
  std::size_t k = 1;
  std::size_t subsample_size = 0;          // 0 means 4k
  std::size_t direct_label_threshold = 0;  // 0 means 4k
  std::uint64_t rng_seed = 0;

  std::size_t sample_size() const { return subsample_size ? subsample_size : 4 * k; }
  std::size_t direct_threshold() const { return direct_label_threshold ? direct_label_threshold : 4 * k; }
};

/**
 * Reveals every label of the pool. While more than the direct-label
 * threshold of points remain uninferred (DIS), draw a sample of 4k ids
 * uniformly with replacement from DIS, run the weak learner, and accept its
 * hypothesis only if it covers at least half of DIS. Small remainders are
 * labeled directly.
 */
inline RunReport boost(std::span<const RationalVector> pool, SimulatedOracle& oracle, const BoostConfig& cfg) {
  if (cfg.k == 0) throw std::invalid_argument("boost: k must be positive");
  Rng rng(cfg.rng_seed);
  RunReport report;
  report.labels.assign(pool.size(), 0);
  std::vector<PointId> dis(pool.size());
  std::iota(dis.begin(), dis.end(), PointId{0});
  const double log_n = std::log2(static_cast<double>(std::max<std::size_t>(pool.size(), 2)));
  const auto retry_limit = static_cast<std::uint64_t>(std::ceil(64.0 * log_n));

  while (!dis.empty()) {
    report.dis_sizes.push_back(dis.size());
    if (dis.size() <= cfg.direct_threshold()) {
      QueryTranscript direct;
      for (PointId x : dis) report.labels[x] = oracle.query_label(x, direct);
      dis.clear();
      break;
    }
    std::uint64_t attempts = 0;
    for (;;) {
      const auto before = oracle.stats().total();
      std::vector<PointId> sample(cfg.sample_size());
      for (auto& s : sample) s = dis[uniform_below(rng, dis.size())];
      auto weak = weak_confident_learn(sample, pool, oracle, dis);
      std::vector<PointId> rest;
      for (PointId x : dis)
        if (weak.hypothesis.abstains(x)) rest.push_back(x);
      const std::size_t covered = dis.size() - rest.size();
      if (2 * covered >= dis.size()) {
        for (PointId x : dis)
          if (!weak.hypothesis.abstains(x)) report.labels[x] = weak.hypothesis[x];
        dis = std::move(rest);
        report.iteration_queries.push_back(oracle.stats().total() - before);
        ++report.iterations;
        break;
      }
      ++report.resamples;
      if (++attempts > retry_limit) throw NonTermination("boost: weak learner keeps failing to cover half of DIS");
    }
  }
  report.dis_sizes.push_back(0);
  report.stats = oracle.stats();
  return report;
}

// ---------------------------------------------------------------------------
// Statistical wrapper

struct StatisticalResult {
  LinearConcept learned;
  RunReport report;  // indexed by `pool`
  Pool sample;       // the i.i.d. draws, repeats included
  Pool pool;         // distinct points of the sample, in first-draw order
};

/// ceil(c * (d + ln(1/delta)) / eps)
inline std::size_t statistical_sample_size(std::size_t d, double eps, double delta, double c = 8.0) {
  return static_cast<std::size_t>(std::ceil(c * (static_cast<double>(d) + std::log(1.0 / delta)) / eps));
}

/// Homogeneous concept consistent with labels on points (one feasibility call).
inline LinearConcept fit_consistent(std::span<const RationalVector> points, std::span<const int> labels) {
  if (points.empty()) throw std::invalid_argument("fit_consistent: no points");
  ConstraintSystem sys(points.front().dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] > 0) sys.nonstrict.push_back(points[i]);
    else sys.strict.push_back(-points[i]);
  }
  auto result = feasible(sys);
  if (!result) throw Inconsistent("fit_consistent: labels are not realizable by a homogeneous half space");
  return LinearConcept(result.witness());
}

/**
 * Draws an i.i.d. sample from `sampler`, reveals the labels of its distinct
 * points with boost(), then fits a consistent homogeneous concept.
 */
inline StatisticalResult learn_statistical(
    const std::function<RationalVector(Rng&)>& sampler, std::size_t dim, double eps, double delta,
    const std::function<SimulatedOracle(std::span<const RationalVector>)>& oracle_factory,
    BoostConfig cfg, std::uint64_t seed,
    double sample_constant = 8.0) {
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1))
    throw std::invalid_argument("learn_statistical: eps and delta must lie in (0, 1)");
  Rng rng(seed);
  StatisticalResult out;
  const std::size_t n = statistical_sample_size(dim, eps, delta, sample_constant);
  out.sample.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.sample.push_back(sampler(rng));
  std::set<std::vector<Rational>> seen;
  for (const auto& x : out.sample)
    if (seen.insert(x.coords()).second) out.pool.push_back(x);
  SimulatedOracle oracle = oracle_factory(out.pool);
  cfg.rng_seed = derive_seed(seed, 1);
  out.report = boost(out.pool, oracle, cfg);
  out.learned = fit_consistent(out.pool, out.report.labels);
  return out;
}

}  // namespace cqlearn

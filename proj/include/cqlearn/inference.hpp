#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/lp.hpp"
#include "cqlearn/query.hpp"
#include "cqlearn/version_space.hpp"

namespace cqlearn {

/// Per-point assignment over a pool: +1, -1, or 0 for abstain.
class PartialHypothesis {
 public:
  PartialHypothesis() = default;
  explicit PartialHypothesis(std::size_t pool_size) : labels_(pool_size, 0) {}

  std::size_t pool_size() const noexcept { return labels_.size(); }
  int operator[](PointId x) const { return labels_.at(x); }
  void assign(PointId x, int label) { labels_.at(x) = static_cast<std::int8_t>(label); }
  bool abstains(PointId x) const { return labels_.at(x) == 0; }

 private:
  std::vector<std::int8_t> labels_;
};

inline const RationalVector& pool_point(std::span<const RationalVector> pool, PointId x) {
  if (x >= pool.size()) throw UnknownPoint(x);
  return pool[x];
}

/**
 * The version space of a transcript as linear constraints on w:
 *   Label(x) = +1        ->  <w, x> >= 0
 *   Label(x) = -1        ->  <w, -x> > 0
 *   Compare(x1, x2) = 1  ->  <w, x1 - x2> >= 0
 *   Compare(x1, x2) = 0  ->  <w, x2 - x1> > 0
 * Repeated entries contribute once.
 */
inline ConstraintSystem constraints_of(const QueryTranscript& transcript,
                                       std::span<const RationalVector> pool) {
  if (pool.empty()) throw std::invalid_argument("constraints_of: empty pool");
  ConstraintSystem sys(pool.front().dim());
  std::set<std::tuple<int, PointId, PointId, int>> seen;
  for (const auto& e : transcript.entries()) {
    const auto& q = e.query;
    const RationalVector& x1 = pool_point(pool, q.first);
    if (!seen.emplace(static_cast<int>(q.kind), q.first, q.second, e.answer).second) continue;
    if (q.is_label()) {
      if (e.answer > 0) sys.nonstrict.push_back(x1);
      else sys.strict.push_back(-x1);
    } else {
      const RationalVector& x2 = pool_point(pool, q.second);
      if (e.answer) {
        if (q.first != q.second) sys.nonstrict.push_back(x1 - x2);
      } else {
        sys.strict.push_back(x2 - x1);
      }
    }
  }
  return sys;
}

/**
 * Exact inference of one label from a transcript via LP feasibility.
 * Throws Inconsistent when no concept agrees with the transcript.
 */
inline InferenceOutcome infer_label(const ConstraintSystem& sys, const RationalVector& x) {
  if (!feasible(sys)) throw Inconsistent("transcript admits no consistent concept");
  ConstraintSystem neg = sys;
  neg.strict.push_back(-x);
  if (!feasible(neg)) return InferenceOutcome::ForcedPositive;
  ConstraintSystem pos = sys;
  pos.nonstrict.push_back(x);
  if (!feasible(pos)) return InferenceOutcome::ForcedNegative;
  return InferenceOutcome::Unknown;
}

inline InferenceOutcome infer_label(const QueryTranscript& transcript,
                                    std::span<const RationalVector> pool, PointId x) {
  return infer_label(constraints_of(transcript, pool), pool_point(pool, x));
}

inline int to_assignment(InferenceOutcome o) {
  switch (o) {
    case InferenceOutcome::ForcedPositive: return +1;
    case InferenceOutcome::ForcedNegative: return -1;
    default: return 0;
  }
}

/**
 * infer_label for every target, abstaining on Unknown. Targets are decided
 * against one compiled VersionSpace; if compilation blows the ray budget
 * (high dimension) each target falls back to the LP route.
 */
inline PartialHypothesis infer_all(const QueryTranscript& transcript,
                                   std::span<const RationalVector> pool,
                                   std::span<const PointId> targets) {
  PartialHypothesis h(pool.size());
  const auto sys = constraints_of(transcript, pool);
  for (PointId t : targets) pool_point(pool, t);
  try {
    const VersionSpace vs(sys);
    if (!vs.consistent()) throw Inconsistent("transcript admits no consistent concept");
    for (PointId t : targets) h.assign(t, to_assignment(vs.infer(pool[t])));
    return h;
  } catch (const GenerationFailure&) {
  }
  for (PointId t : targets) h.assign(t, to_assignment(infer_label(sys, pool[t])));
  return h;
}

/// Fraction of targets on which h does not abstain.
inline Rational coverage(const PartialHypothesis& h, std::span<const PointId> targets) {
  if (targets.empty()) throw std::invalid_argument("coverage: empty target set");
  std::size_t covered = 0;
  for (PointId t : targets) covered += !h.abstains(t);
  return ratio(static_cast<unsigned long>(covered), static_cast<unsigned long>(targets.size()));
}

namespace detail {

/// Is there beta >= 0 with sum beta_i * columns_i = target?
inline bool nonneg_combination_exists(const std::vector<RationalVector>& columns,
                                      const RationalVector& target) {
  const std::size_t d = target.dim();
  std::vector<Rational> rhs(target.begin(), target.end());
  std::vector<int> flip(d, 1);
  for (std::size_t i = 0; i < d; ++i)
    if (sgn(rhs[i]) < 0) {
      flip[i] = -1;
      rhs[i] = -rhs[i];
    }
  std::vector<std::vector<Rational>> cols;
  cols.reserve(columns.size());
  for (const auto& c : columns) {
    std::vector<Rational> col(d);
    for (std::size_t i = 0; i < d; ++i) col[i] = flip[i] > 0 ? c[i] : Rational(-c[i]);
    cols.push_back(std::move(col));
  }
  return sgn(phase_one(cols, rhs).optimum) == 0;
}

inline void check_chain(std::span<const RationalVector> sorted_pts, const RationalVector& x) {
  if (sorted_pts.size() < 2) throw std::invalid_argument("cone rule needs at least two points");
  for (const auto& p : sorted_pts)
    if (p.dim() != x.dim()) throw DimensionMismatch(x.dim(), p.dim());
}

}  // namespace detail

/**
 * Sorted-chain cone rule. `sorted_pts` all carry label y and are ordered by
 * nondecreasing |f|. If x - x_1 = sum alpha_i (x_{i+1} - x_i) with every
 * alpha_i >= -eta then c(x) = y; eta = 0 is the unconditional rule, eta > 0
 * is sound only for concepts whose minimal ratio on a pool containing x is
 * at least eta.
 */
inline bool cone_infer_margin(std::span<const RationalVector> sorted_pts, Label y,
                              const RationalVector& x, const Rational& eta) {
  (void)y;  // the rule's verdict is "c(x) = y"; y does not enter the geometry
  if (sgn(eta) < 0) throw std::invalid_argument("cone_infer_margin: eta < 0");
  detail::check_chain(sorted_pts, x);
  std::vector<RationalVector> diffs;
  diffs.reserve(sorted_pts.size() - 1);
  for (std::size_t i = 0; i + 1 < sorted_pts.size(); ++i) diffs.push_back(sorted_pts[i + 1] - sorted_pts[i]);
  // alpha_i = beta_i - eta with beta_i >= 0.
  RationalVector target = x - sorted_pts.front();
  if (sgn(eta) != 0) target += (sorted_pts.back() - sorted_pts.front()) * eta;
  return detail::nonneg_combination_exists(diffs, target);
}

inline bool cone_infer(std::span<const RationalVector> sorted_pts, Label y, const RationalVector& x) {
  return cone_infer_margin(sorted_pts, y, x, Rational(0));
}

}  // namespace cqlearn

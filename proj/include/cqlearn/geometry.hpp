#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/rational.hpp"

namespace cqlearn {

/// +1 or -1.
using Label = int;

/**
 * Homogeneous linear concept c(x) = sign(<w, x>) with the convention that
 * a zero value is labeled +1. Affine concepts are expressed on lifted points.
 */
class LinearConcept {
 public:
  LinearConcept() = default;
  explicit LinearConcept(RationalVector w) : w_(std::move(w)) {}

  const RationalVector& weights() const noexcept { return w_; }
  std::size_t dim() const noexcept { return w_.dim(); }

  /// <w, x>
  Rational eval(const RationalVector& x) const { return w_.dot(x); }

  Label label_of(const RationalVector& x) const { return sgn(eval(x)) >= 0 ? +1 : -1; }

  LinearConcept scaled(const Rational& lambda) const { return LinearConcept(w_ * lambda); }

  friend bool operator==(const LinearConcept& a, const LinearConcept& b) { return a.w_ == b.w_; }

 private:
  RationalVector w_;
};

inline Rational eval(const LinearConcept& c, const RationalVector& x) { return c.eval(x); }
inline Label label_of(const LinearConcept& c, const RationalVector& x) { return c.label_of(x); }

/// Appends the constant coordinate 1.
inline RationalVector lift(const RationalVector& x) {
  std::vector<Rational> coords(x.begin(), x.end());
  coords.emplace_back(1);
  return RationalVector(std::move(coords));
}

inline std::vector<RationalVector> lift_all(std::span<const RationalVector> points) {
  std::vector<RationalVector> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(lift(p));
  return out;
}

/**
 * Scale-free separation statistics of a concept on a pool. The normalized
 * margin is kept squared so no square roots are needed:
 *   margin_sq = min <w,x>^2 / (|w|^2 * max |x|^2)  = (gamma / rho)^2
 *   eta       = min |f| / max |f|
 */
struct MarginReport {
  Rational margin_sq;    // (gamma/rho)^2
  Rational eta;          // minimal ratio
  Rational max_norm_sq;  // rho^2
  Rational min_abs_f;
  Rational max_abs_f;
};

inline MarginReport margin_report(const LinearConcept& c, std::span<const RationalVector> pool) {
  if (pool.empty()) throw DegeneratePool("margin_report: empty pool");
  MarginReport r;
  bool first = true;
  for (const auto& x : pool) {
    Rational f = abs(c.eval(x));
    Rational n = x.norm_sq();
    if (first) {
      r.min_abs_f = f;
      r.max_abs_f = f;
      r.max_norm_sq = n;
      first = false;
    } else {
      if (f < r.min_abs_f) r.min_abs_f = f;
      if (f > r.max_abs_f) r.max_abs_f = f;
      if (n > r.max_norm_sq) r.max_norm_sq = n;
    }
  }
  if (r.max_abs_f == 0) throw DegeneratePool("margin_report: concept vanishes on the whole pool");
  r.eta = r.min_abs_f / r.max_abs_f;
  r.margin_sq = r.min_abs_f * r.min_abs_f / (c.weights().norm_sq() * r.max_norm_sq);
  return r;
}

}  // namespace cqlearn

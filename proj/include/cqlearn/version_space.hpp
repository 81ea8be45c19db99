#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/lp.hpp"
#include "cqlearn/rational.hpp"

namespace cqlearn {

enum class InferenceOutcome : std::uint8_t { ForcedPositive, ForcedNegative, Unknown };

namespace detail {

using IntVec = std::vector<Integer>;

inline Integer idot(const IntVec& a, const IntVec& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  return s;
}

inline void make_primitive(IntVec& v) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1)
    for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// ca * a + cb * b, made primitive.
inline IntVec combine(const Integer& ca, const IntVec& a, const Integer& cb, const IntVec& b) {
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = ca * a[i];
    mpz_addmul(out[i].get_mpz_t(), cb.get_mpz_t(), b[i].get_mpz_t());
  }
  make_primitive(out);
  return out;
}

/// Growable bitset over constraint (or ray) indices.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t nbits) : words_((nbits + 63) / 64, 0) {}

  void resize(std::size_t nbits) { words_.resize((nbits + 63) / 64, 0); }
  void set(std::size_t i) { words_[i / 64] |= (std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  /// |this & other|
  std::size_t count_and(const Bits& o) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) n += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return n;
  }
  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }
  bool subset_of(const Bits& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  friend bool operator==(const Bits&, const Bits&) = default;
  friend auto operator<=>(const Bits& a, const Bits& b) { return a.words_ <=> b.words_; }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

/**
 * Exact generator description of the closure of a version space
 * V = { w : <a,w> >= 0 (nonstrict), <b,w> > 0 (strict) }, built by the
 * double-description method in integer arithmetic.
 *
 * With cl(V) = lin(L) + cone(R) and V nonempty:
 *  - every w in V has <w,x> >= 0  iff  <l,x> = 0 for l in L and <r,x> >= 0 for r in R;
 *  - every w in V has <w,x> < 0   iff  additionally <r,x> <= 0 for all r, and the
 *    face F = { r : <r,x> = 0 } lies inside the zero set of some strict form,
 *    i.e. the relative interior of F misses V.
 * These are the Farkas/Motzkin duals of the two LP calls per target, so
 * one compilation answers many targets.
 */
class VersionSpace {
 public:
  /// Throws GenerationFailure if the number of rays exceeds `ray_limit`.
  explicit VersionSpace(const ConstraintSystem& system, std::size_t ray_limit = 50000)
      : dim_(system.dim) {
    system.validate();
    for (std::size_t i = 0; i < dim_; ++i) {
      detail::IntVec e(dim_);
      e[i] = 1;
      lineality_.push_back(std::move(e));
    }
    for (const auto& a : system.nonstrict) add(detail::primitive_integer(a), ray_limit);
    for (const auto& b : system.strict) add(detail::primitive_integer(b), ray_limit);
    tight_.clear();
    finish(system);
  }

  /// False when the strict forms cannot all be positive simultaneously.
  bool consistent() const noexcept { return consistent_; }
  std::size_t ray_count() const noexcept { return rays_.size(); }
  std::size_t lineality_dim() const noexcept { return lineality_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  InferenceOutcome infer(const RationalVector& x) const {
    if (!consistent_) throw Inconsistent("version space is empty");
    if (x.dim() != dim_) throw DimensionMismatch(dim_, x.dim());
    const auto xi = detail::primitive_integer(x);
    for (const auto& l : lineality_)
      if (sgn(detail::idot(l, xi)) != 0) return InferenceOutcome::Unknown;
    bool any_pos = false;
    bool any_neg = false;
    detail::Bits face(rays_.size());
    for (std::size_t r = 0; r < rays_.size(); ++r) {
      const int s = sgn(detail::idot(rays_[r], xi));
      if (s > 0) any_pos = true;
      else if (s < 0) any_neg = true;
      else face.set(r);
    }
    if (!any_neg) return InferenceOutcome::ForcedPositive;
    if (any_pos) return InferenceOutcome::Unknown;
    for (const auto& z : strict_zero_sets_)
      if (face.subset_of(z)) return InferenceOutcome::ForcedNegative;
    return InferenceOutcome::Unknown;
  }

  /// A point of V (sum of rays), when consistent.
  RationalVector interior_point() const {
    RationalVector w(dim_);
    for (const auto& r : rays_)
      for (std::size_t i = 0; i < dim_; ++i) w[i] += r[i];
    return w;
  }

 private:
  void add(detail::IntVec h, std::size_t ray_limit) {
    bool zero = std::all_of(h.begin(), h.end(), [](const Integer& v) { return v == 0; });
    if (zero) return;

    // Case 1: h is not identically zero on the lineality space.
    for (std::size_t k = 0; k < lineality_.size(); ++k) {
      Integer hl = detail::idot(h, lineality_[k]);
      if (sgn(hl) == 0) continue;
      detail::IntVec pivot = lineality_[k];
      if (sgn(hl) < 0) {
        for (auto& v : pivot) v = -v;
        hl = -hl;
      }
      lineality_.erase(lineality_.begin() + static_cast<std::ptrdiff_t>(k));
      for (auto& l : lineality_) {
        Integer c = detail::idot(h, l);
        if (sgn(c) != 0) l = detail::combine(hl, l, -c, pivot);
      }
      for (auto& r : rays_) {
        Integer c = detail::idot(h, r);
        if (sgn(c) != 0) r = detail::combine(hl, r, -c, pivot);
      }
      const std::size_t bit = kept_++;
      detail::Bits pivot_tight(kept_);
      for (std::size_t j = 0; j < bit; ++j) pivot_tight.set(j);
      for (auto& t : tight_) {
        t.resize(kept_);
        t.set(bit);
      }
      rays_.push_back(std::move(pivot));
      tight_.push_back(std::move(pivot_tight));
      return;
    }

    // Case 2: split the rays.
    std::vector<Integer> s(rays_.size());
    std::vector<std::size_t> pos, zer, neg;
    for (std::size_t r = 0; r < rays_.size(); ++r) {
      s[r] = detail::idot(h, rays_[r]);
      const int sg = sgn(s[r]);
      (sg > 0 ? pos : sg < 0 ? neg : zer).push_back(r);
    }
    if (neg.empty()) return;  // redundant

    const std::size_t need = dim_ >= lineality_.size() + 2 ? dim_ - lineality_.size() - 2 : 0;
    std::vector<detail::IntVec> new_rays;
    std::vector<detail::Bits> new_tight;
    for (std::size_t p : pos) {
      for (std::size_t n : neg) {
        detail::Bits common = tight_[p] & tight_[n];
        if (common.count() < need) continue;
        bool adjacent = true;
        for (std::size_t o = 0; o < rays_.size() && adjacent; ++o)
          if (o != p && o != n && common.subset_of(tight_[o])) adjacent = false;
        if (!adjacent) continue;
        // s[p] > 0 > s[n]: s[p]*r_n - s[n]*r_p lies on h = 0.
        new_rays.push_back(detail::combine(s[p], rays_[n], -s[n], rays_[p]));
        new_tight.push_back(std::move(common));
      }
    }

    const std::size_t bit = kept_++;
    std::vector<detail::IntVec> rays;
    std::vector<detail::Bits> tight;
    rays.reserve(pos.size() + zer.size() + new_rays.size());
    for (std::size_t r : pos) {
      rays.push_back(std::move(rays_[r]));
      tight.push_back(std::move(tight_[r]));
      tight.back().resize(kept_);
    }
    for (std::size_t r : zer) {
      rays.push_back(std::move(rays_[r]));
      tight.push_back(std::move(tight_[r]));
      tight.back().resize(kept_);
      tight.back().set(bit);
    }
    for (std::size_t i = 0; i < new_rays.size(); ++i) {
      rays.push_back(std::move(new_rays[i]));
      tight.push_back(std::move(new_tight[i]));
      tight.back().resize(kept_);
      tight.back().set(bit);
    }
    rays_ = std::move(rays);
    tight_ = std::move(tight);
    if (rays_.size() > ray_limit) throw GenerationFailure("version space: ray limit exceeded");
  }

  void finish(const ConstraintSystem& system) {
    consistent_ = true;
    for (const auto& b : system.strict) {
      const auto bi = detail::primitive_integer(b);
      detail::Bits zeros(rays_.size());
      bool positive_somewhere = false;
      for (std::size_t r = 0; r < rays_.size(); ++r) {
        if (sgn(detail::idot(bi, rays_[r])) == 0) zeros.set(r);
        else positive_somewhere = true;
      }
      if (!positive_somewhere) consistent_ = false;
      strict_zero_sets_.push_back(std::move(zeros));
    }
    std::sort(strict_zero_sets_.begin(), strict_zero_sets_.end());
    strict_zero_sets_.erase(std::unique(strict_zero_sets_.begin(), strict_zero_sets_.end()),
                            strict_zero_sets_.end());
    // Only maximal zero sets matter for the subset test.
    std::vector<detail::Bits> maximal;
    for (std::size_t i = 0; i < strict_zero_sets_.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < strict_zero_sets_.size() && !dominated; ++j)
        if (i != j && strict_zero_sets_[i].subset_of(strict_zero_sets_[j])) dominated = true;
      if (!dominated) maximal.push_back(strict_zero_sets_[i]);
    }
    strict_zero_sets_ = std::move(maximal);
  }

  std::size_t dim_;
  std::vector<detail::IntVec> lineality_;
  std::vector<detail::IntVec> rays_;
  std::vector<detail::Bits> tight_;  // per ray, over kept constraints; build-time only
  std::size_t kept_ = 0;
  std::vector<detail::Bits> strict_zero_sets_;
  bool consistent_ = true;
};

}  // namespace cqlearn

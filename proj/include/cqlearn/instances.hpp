#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/geometry.hpp"
#include "cqlearn/inference.hpp"
#include "cqlearn/query.hpp"
#include "cqlearn/random.hpp"

namespace cqlearn {

struct InstanceMeta {
  enum class Kind : std::uint8_t { Grid, Margin, Custom };
  Kind kind = Kind::Custom;
  std::uint64_t grid_n = 0;  // N for grid instances
  Rational eta = 0;          // promised minimal ratio for margin instances
  std::size_t suggested_k = 0;
  bool clamped = false;  // requested more grid points than exist

  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct Instance {
  Pool pool;
  LinearConcept hidden;
  InstanceMeta meta;

  std::size_t dim() const { return hidden.dim(); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// ceil of a real bound computed in double, tolerant of round-off at exact integers.
inline std::size_t ceil_bound(double value) {
  return static_cast<std::size_t>(std::ceil(value - 1e-9));
}

/// ceil(16 d log2(4 N d))
inline std::size_t grid_suggested_k(std::uint64_t grid_n, std::size_t d) {
  return ceil_bound(16.0 * static_cast<double>(d) *
                    std::log2(4.0 * static_cast<double>(grid_n) * static_cast<double>(d)));
}

/// ceil(10 d log2(d+1) log2(2/eta))
inline std::size_t margin_suggested_k(std::size_t d, const Rational& eta) {
  const double dd = static_cast<double>(d);
  return ceil_bound(10.0 * dd * std::log2(dd + 1.0) * std::log2(2.0 / eta.get_d()));
}

namespace detail {

/// Random nonzero integer weight vector with coordinates in [-bound, bound].
inline RationalVector random_weights(Rng& rng, std::size_t d, std::int64_t bound) {
  RationalVector w(d);
  do {
    for (std::size_t i = 0; i < d; ++i) w[i] = static_cast<long>(uniform_int(rng, -bound, bound));
  } while (w.is_zero());
  return w;
}

inline bool has_both_labels(const LinearConcept& c, std::span<const RationalVector> pool) {
  bool pos = false, neg = false;
  for (const auto& x : pool) (c.label_of(x) > 0 ? pos : neg) = true;
  return pos && neg;
}

}  // namespace detail

/// Concept for a grid pool: small integer weights, both labels present whenever possible.
inline LinearConcept random_grid_concept(Rng& rng, std::span<const RationalVector> pool, std::size_t d,
                                         std::uint64_t grid_n) {
  const auto bound = static_cast<std::int64_t>(std::max<std::uint64_t>(1, 2 * grid_n * d));
  LinearConcept c(detail::random_weights(rng, d, bound));
  for (int attempt = 0; attempt < 1000 && !detail::has_both_labels(c, pool); ++attempt)
    c = LinearConcept(detail::random_weights(rng, d, bound));
  return c;
}

/// Uniform point of [N]^d = {0..N}^d.
inline RationalVector random_grid_point(Rng& rng, std::uint64_t grid_n, std::size_t d) {
  RationalVector x(d);
  for (std::size_t i = 0; i < d; ++i)
    x[i] = static_cast<unsigned long>(uniform_below(rng, grid_n + 1));
  return x;
}

/**
 * n distinct uniform points of [N]^d (the whole grid when n is at least its
 * size; meta.clamped records that) with a random small-integer hidden concept.
 */
inline Instance gen_grid(std::uint64_t grid_n, std::size_t d, std::size_t n, std::uint64_t seed) {
  if (grid_n < 1 || d < 1 || n < 1) throw std::invalid_argument("gen_grid: need N, d, n >= 1");
  Rng rng(seed);
  // Grid size, saturating.
  std::uint64_t total = 1;
  bool huge = false;
  for (std::size_t i = 0; i < d && !huge; ++i) {
    if (total > UINT64_MAX / (grid_n + 1)) huge = true;
    else total *= grid_n + 1;
  }
  Instance inst;
  inst.meta.kind = InstanceMeta::Kind::Grid;
  inst.meta.grid_n = grid_n;
  inst.meta.suggested_k = grid_suggested_k(grid_n, d);
  auto decode = [&](std::uint64_t code) {
    RationalVector x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = static_cast<unsigned long>(code % (grid_n + 1));
      code /= grid_n + 1;
    }
    return x;
  };
  if (!huge && n >= total) {
    inst.meta.clamped = n > total;
    for (std::uint64_t c = 0; c < total; ++c) inst.pool.push_back(decode(c));
  } else if (!huge && total <= 4'000'000) {
    for (std::size_t c : sample_without_replacement(rng, static_cast<std::size_t>(total), n))
      inst.pool.push_back(decode(c));
  } else {
    std::set<std::vector<Rational>> seen;
    while (inst.pool.size() < n) {
      auto x = random_grid_point(rng, grid_n, d);
      if (seen.insert(x.coords()).second) inst.pool.push_back(std::move(x));
    }
  }
  inst.hidden = random_grid_concept(rng, inst.pool, d, grid_n);
  return inst;
}

/**
 * Rejection-sampled instance whose hidden concept has minimal ratio at
 * least eta_target on the pool: points are integer vectors in [-64, 64]^d
 * kept only when eta*B <= |f(x)| <= B for a fixed scale B.
 */
inline Instance gen_margin(std::size_t d, std::size_t n, const Rational& eta_target, std::uint64_t seed,
                           std::uint64_t attempt_budget = 0) {
  if (d < 1 || n < 1) throw std::invalid_argument("gen_margin: need d, n >= 1");
  if (sgn(eta_target) <= 0 || eta_target > 1) throw std::invalid_argument("gen_margin: eta must lie in (0, 1]");
  if (attempt_budget == 0) attempt_budget = 2000 * static_cast<std::uint64_t>(n) + 100000;
  constexpr std::int64_t kBox = 64;
  Rng rng(seed);
  Instance inst;
  inst.meta.kind = InstanceMeta::Kind::Margin;
  inst.meta.eta = eta_target;
  inst.meta.suggested_k = margin_suggested_k(d, eta_target);

  const RationalVector w = detail::random_weights(rng, d, 10);
  inst.hidden = LinearConcept(w);
  Rational reach = 0;
  for (const auto& c : w) reach += abs(c);
  const Rational upper = reach * kBox / 2;
  const Rational lower = upper * eta_target;
  std::uint64_t attempts = 0;
  std::size_t pos = 0;
  while (inst.pool.size() < n) {
    if (++attempts > attempt_budget)
      throw GenerationFailure("gen_margin: rejection budget exhausted; try a smaller eta_target");
    RationalVector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<long>(uniform_int(rng, -kBox, kBox));
    const Rational f = inst.hidden.eval(x);
    const Rational af = abs(f);
    if (af < lower || af > upper) continue;
    // Keep both labels represented once the pool has room for them.
    const bool is_pos = sgn(f) >= 0;
    const std::size_t neg = inst.pool.size() - pos;
    if (n >= 2 && inst.pool.size() + 1 == n && (is_pos ? neg == 0 : pos == 0)) continue;
    pos += is_pos;
    inst.pool.push_back(std::move(x));
  }
  if (margin_report(inst.hidden, inst.pool).eta < eta_target)
    throw std::logic_error("gen_margin: minimal-ratio post-condition failed");
  return inst;
}

// ---------------------------------------------------------------------------
// Lower-bound witnesses

struct WitnessInstance {
  enum class Kind : std::uint8_t { R3, Margin, Custom };
  Pool pool;                          // x_1..x_n (index j-1 holds x_j)
  std::vector<LinearConcept> concepts;  // c_0..c_n
  Kind kind = Kind::Custom;
  Integer base = 0;  // M for R3 witnesses

  std::size_t n() const noexcept { return pool.size(); }
  friend bool operator==(const WitnessInstance&, const WitnessInstance&) = default;
};

/// g_i(j) = M^j (1 - 2 (j - i)^2)
inline Integer r3_profile(const Integer& base, long i, long j) {
  Integer p;
  mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(j));
  const long t = j - i;
  return p * (1 - 2 * t * t);
}

/// True iff |g_i(1)| < ... < |g_i(n)| for every 0 <= i <= n.
inline bool r3_profiles_monotone(const Integer& base, long n) {
  for (long i = 0; i <= n; ++i) {
    Integer prev = abs(r3_profile(base, i, 1));
    for (long j = 2; j <= n; ++j) {
      Integer cur = abs(r3_profile(base, i, j));
      if (cur <= prev) return false;
      prev = std::move(cur);
    }
  }
  return true;
}

/**
 * Points x_j = (M^j, j M^j, j^2 M^j) in Q^3 and concepts with weights
 * (1 - 2i^2, 4i, -2), so f_i(x_j) = g_i(j). M is the smallest power of two
 * for which all the |g_i(j)| increase in j.
 */
inline WitnessInstance gen_lb_r3(std::size_t n) {
  if (n < 2) throw std::invalid_argument("gen_lb_r3: n >= 2 required");
  const long nn = static_cast<long>(n);
  WitnessInstance w;
  w.kind = WitnessInstance::Kind::R3;
  w.base = 2;
  while (!r3_profiles_monotone(w.base, nn)) w.base *= 2;
  for (long j = 1; j <= nn; ++j) {
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), w.base.get_mpz_t(), static_cast<unsigned long>(j));
    w.pool.push_back(RationalVector{Rational(p), Rational(p * j), Rational(p * j * j)});
  }
  for (long i = 0; i <= nn; ++i)
    w.concepts.emplace_back(RationalVector{Rational(1 - 2 * i * i), Rational(4 * i), Rational(-2)});
  return w;
}

/**
 * Points x_i = e_i + e_{n+1} in Q^{n+1} and concepts
 *   w_i(j) = 1 + j/(10n^2) if j = i,  -1/2 if j = n+1,  -j/(10n^2) otherwise,
 * with w_0 lacking the first case.
 */
inline WitnessInstance gen_lb_margin(std::size_t n) {
  if (n < 2) throw std::invalid_argument("gen_lb_margin: n >= 2 required");
  WitnessInstance w;
  w.kind = WitnessInstance::Kind::Margin;
  const std::size_t d = n + 1;
  for (std::size_t i = 1; i <= n; ++i) {
    RationalVector x(d);
    x[i - 1] = 1;
    x[n] = 1;
    w.pool.push_back(std::move(x));
  }
  const Rational scale(1, static_cast<unsigned long>(10 * n * n));
  for (std::size_t i = 0; i <= n; ++i) {
    RationalVector wi(d);
    for (std::size_t j = 1; j <= n; ++j)
      wi[j - 1] = j == i ? Rational(1 + Rational(static_cast<unsigned long>(j)) * scale)
                         : Rational(-Rational(static_cast<unsigned long>(j)) * scale);
    wi[n] = Rational(-1, 2);
    w.concepts.emplace_back(std::move(wi));
  }
  return w;
}

struct VerificationReport {
  std::vector<std::string> violations;
  std::size_t comparisons_checked = 0;
  // Smallest squared normalized margin over c_0..c_n (margin witnesses only).
  Rational min_margin_sq = 0;
  bool clean() const noexcept { return violations.empty(); }
};

/// Required squared normalized margin for margin witnesses: (1/8)^2.
inline const Rational kWitnessMarginSq{1, 64};

/**
 * For every i >= 1, checks that c_0 and c_i disagree on x_i but give the
 * same label to every other point and the same answer to every comparison
 * among the other points. Margin witnesses additionally need every concept
 * to have squared normalized margin >= 1/64 on the pool.
 */
inline VerificationReport verify_witness(const WitnessInstance& w) {
  VerificationReport rep;
  const std::size_t n = w.pool.size();
  if (n == 0) {
    rep.violations.push_back("empty pool");
    return rep;
  }
  if (w.concepts.size() != n + 1) {
    rep.violations.push_back("expected " + std::to_string(n + 1) + " concepts, found " +
                             std::to_string(w.concepts.size()));
    return rep;
  }
  const std::size_t d = w.pool.front().dim();
  for (std::size_t i = 0; i < w.concepts.size(); ++i)
    if (w.concepts[i].dim() != d) {
      rep.violations.push_back("concept c" + std::to_string(i) + " has wrong dimension");
      return rep;
    }
  for (std::size_t j = 0; j < n; ++j)
    if (w.pool[j].dim() != d) {
      rep.violations.push_back("point x" + std::to_string(j + 1) + " has wrong dimension");
      return rep;
    }

  auto values = [&](const LinearConcept& c) {
    std::vector<Rational> f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = c.eval(w.pool[j]);
    return f;
  };
  const auto f0 = values(w.concepts[0]);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto fi = values(w.concepts[i]);
    const std::size_t held = i - 1;
    const std::string tag = "c" + std::to_string(i);
    if ((sgn(f0[held]) >= 0) == (sgn(fi[held]) >= 0))
      rep.violations.push_back(tag + ": agrees with c0 on x" + std::to_string(i));
    for (std::size_t a = 0; a < n; ++a) {
      if (a == held) continue;
      if ((sgn(f0[a]) >= 0) != (sgn(fi[a]) >= 0))
        rep.violations.push_back(tag + ": label of x" + std::to_string(a + 1) + " differs from c0");
      for (std::size_t b = 0; b < n; ++b) {
        if (b == held || b == a) continue;
        ++rep.comparisons_checked;
        if ((f0[a] >= f0[b]) != (fi[a] >= fi[b]))
          rep.violations.push_back(tag + ": comparison (x" + std::to_string(a + 1) + ", x" +
                                   std::to_string(b + 1) + ") differs from c0");
      }
    }
  }
  if (w.kind == WitnessInstance::Kind::Margin) {
    bool first = true;
    for (std::size_t i = 0; i <= n; ++i) {
      const auto m = margin_report(w.concepts[i], w.pool).margin_sq;
      if (first || m < rep.min_margin_sq) rep.min_margin_sq = m;
      first = false;
      if (m < kWitnessMarginSq)
        rep.violations.push_back("c" + std::to_string(i) + ": squared margin " + m.get_str() + " < 1/64");
    }
  }
  return rep;
}

/**
 * Labels of every id and all ordered pairwise comparisons among them under c,
 * without touching an oracle's counters.
 */
inline QueryTranscript full_transcript(const LinearConcept& c, std::span<const RationalVector> pool,
                                       std::span<const PointId> ids) {
  QueryTranscript t;
  std::vector<Rational> f(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    f[i] = c.eval(pool[ids[i]]);
    t.append(AnsweredQuery::label(ids[i], sgn(f[i]) >= 0 ? +1 : -1));
  }
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = 0; b < ids.size(); ++b)
      if (a != b) t.append(AnsweredQuery::compare(ids[a], ids[b], f[a] >= f[b]));
  return t;
}

/**
 * Same version space as full_transcript with O(m) entries: all labels plus
 * comparisons between neighbours in f-order (the rest follow by
 * transitivity, and cross-label comparisons follow from the labels).
 */
inline QueryTranscript chain_transcript(const LinearConcept& c, std::span<const RationalVector> pool,
                                        std::span<const PointId> ids) {
  QueryTranscript t;
  std::vector<std::pair<Rational, PointId>> f;
  f.reserve(ids.size());
  for (PointId id : ids) {
    f.emplace_back(c.eval(pool[id]), id);
    t.append(AnsweredQuery::label(id, sgn(f.back().first) >= 0 ? +1 : -1));
  }
  std::sort(f.begin(), f.end());
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const auto& lo = f[i];
    const auto& hi = f[i + 1];
    if (lo.first == hi.first) {
      t.append(AnsweredQuery::compare(hi.second, lo.second, true));
      t.append(AnsweredQuery::compare(lo.second, hi.second, true));
    } else {
      t.append(AnsweredQuery::compare(lo.second, hi.second, false));
    }
  }
  return t;
}

/**
 * Scans ids in order for a point whose label follows from the labels and
 * comparisons of the remaining ids under c. Returns its position in ids.
 * `tried` receives the number of candidates examined.
 */
inline std::optional<std::size_t> first_self_inferable(const LinearConcept& c,
                                                       std::span<const RationalVector> pool,
                                                       std::span<const PointId> ids,
                                                       std::size_t* tried = nullptr) {
  std::vector<PointId> rest;
  rest.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (tried) *tried = i + 1;
    rest.clear();
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (j != i) rest.push_back(ids[j]);
    const VersionSpace vs(constraints_of(chain_transcript(c, pool, rest), pool));
    const auto outcome = vs.infer(pool[ids[i]]);
    if (outcome == InferenceOutcome::Unknown) continue;
    const Label inferred = outcome == InferenceOutcome::ForcedPositive ? +1 : -1;
    if (inferred != c.label_of(pool[ids[i]])) throw std::logic_error("first_self_inferable: unsound inference");
    return i;
  }
  return std::nullopt;
}

}  // namespace cqlearn

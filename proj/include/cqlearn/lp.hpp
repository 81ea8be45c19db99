#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/rational.hpp"

namespace cqlearn {

/// The functional w -> <coeffs, w>.
using LinearForm = RationalVector;

/**
 * Homogeneous system on w in Q^dim:
 *   <a, w> >= 0 for every a in nonstrict,
 *   <b, w> >  0 for every b in strict.
 * Feasible sets are cones: w feasible implies lambda*w feasible for lambda > 0.
 */
struct ConstraintSystem {
  std::size_t dim = 0;
  std::vector<LinearForm> nonstrict;
  std::vector<LinearForm> strict;

  ConstraintSystem() = default;
  explicit ConstraintSystem(std::size_t d) : dim(d) {}

  std::size_t size() const noexcept { return nonstrict.size() + strict.size(); }

  void validate() const {
    if (dim == 0) throw std::invalid_argument("constraint system of dimension 0");
    for (const auto& a : nonstrict)
      if (a.dim() != dim) throw DimensionMismatch(dim, a.dim());
    for (const auto& b : strict)
      if (b.dim() != dim) throw DimensionMismatch(dim, b.dim());
  }

  /// True iff w satisfies every constraint exactly.
  bool satisfied_by(const RationalVector& w) const {
    for (const auto& a : nonstrict)
      if (sgn(a.dot(w)) < 0) return false;
    for (const auto& b : strict)
      if (sgn(b.dot(w)) <= 0) return false;
    return true;
  }
};

class Feasibility {
 public:
  static Feasibility feasible(RationalVector witness) { return Feasibility(std::move(witness)); }
  static Feasibility infeasible() { return Feasibility(); }

  bool is_feasible() const noexcept { return witness_.has_value(); }
  explicit operator bool() const noexcept { return is_feasible(); }
  const RationalVector& witness() const { return witness_.value(); }

 private:
  Feasibility() = default;
  explicit Feasibility(RationalVector w) : witness_(std::move(w)) {}
  std::optional<RationalVector> witness_;
};

namespace detail {

/// Integer multiple of `v` with coprime entries (same direction).
inline std::vector<Integer> primitive_integer(const RationalVector& v) {
  Integer l = 1;
  for (const auto& c : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> out(v.dim());
  Integer g = 0;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out[i] = v[i].get_num() * (l / v[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
  }
  if (g > 1)
    for (auto& x : out) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return out;
}

/**
 * Phase-1 simplex for { u >= 0 : M u = rhs } with rhs >= 0, exact
 * arithmetic, Bland's rule. One artificial per row.
 *
 * Returns the optimal phase-1 value (sum of artificials) and the simplex
 * multipliers pi at the optimum: pi^T M_j <= 0 for every column j, pi <= 1,
 * pi^T rhs = optimum.
 */
struct PhaseOneResult {
  Rational optimum;
  std::vector<Rational> multipliers;
  std::size_t pivots = 0;
};

inline PhaseOneResult phase_one(const std::vector<std::vector<Rational>>& columns,
                                const std::vector<Rational>& rhs) {
  const std::size_t rows = rhs.size();
  const std::size_t structural = columns.size();
  const std::size_t cols = structural + rows;

  // tableau[i] holds row i over all columns followed by its rhs.
  std::vector<std::vector<Rational>> tab(rows, std::vector<Rational>(cols + 1));
  for (std::size_t j = 0; j < structural; ++j)
    for (std::size_t i = 0; i < rows; ++i) tab[i][j] = columns[j][i];
  for (std::size_t i = 0; i < rows; ++i) {
    tab[i][structural + i] = 1;
    tab[i][cols] = rhs[i];
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = structural + i;

  // Reduced costs; last entry is minus the objective value.
  std::vector<Rational> rc(cols + 1);
  for (std::size_t j = 0; j < structural; ++j)
    for (std::size_t i = 0; i < rows; ++i) rc[j] -= tab[i][j];
  for (std::size_t i = 0; i < rows; ++i) rc[cols] -= tab[i][cols];

  PhaseOneResult result;
  Rational ratio, best, factor, tmp;
  for (;;) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (sgn(rc[j]) < 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;

    std::size_t leave = rows;
    for (std::size_t i = 0; i < rows; ++i) {
      if (sgn(tab[i][enter]) <= 0) continue;
      ratio = tab[i][cols] / tab[i][enter];
      if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    // Phase 1 is bounded below by 0, so a ratio row always exists.
    if (leave == rows) throw std::logic_error("phase_one: unbounded direction");

    auto& prow = tab[leave];
    const Rational piv = prow[enter];
    for (std::size_t j = 0; j <= cols; ++j)
      if (sgn(prow[j]) != 0) prow[j] /= piv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave || sgn(tab[i][enter]) == 0) continue;
      factor = tab[i][enter];
      auto& row = tab[i];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (sgn(prow[j]) == 0) continue;
        tmp = factor * prow[j];
        row[j] -= tmp;
      }
    }
    if (sgn(rc[enter]) != 0) {
      factor = rc[enter];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (sgn(prow[j]) == 0) continue;
        tmp = factor * prow[j];
        rc[j] -= tmp;
      }
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  result.optimum = -rc[cols];
  result.multipliers.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) result.multipliers[i] = 1 - rc[structural + i];
  return result;
}

}  // namespace detail

/**
 * Decides whether some w has <a,w> >= 0 for all nonstrict forms and
 * <b,w> > 0 for all strict forms, and returns such a w if so.
 *
 * By homogeneity the strict rows may be read as <b,w> >= 1. That closed
 * system is infeasible iff (Farkas) there are y, z >= 0 with
 *   sum y_i a_i + sum z_j b_j = 0,  sum z_j = 1,
 * which is a (dim+1)-row phase-1 problem. When its optimum is positive the
 * simplex multipliers (pi_w, pi_0) give the primal witness w = -pi_w with
 * <a,w> >= 0 and <b,w> >= pi_0 > 0.
 */
inline Feasibility feasible(const ConstraintSystem& system) {
  system.validate();
  const std::size_t d = system.dim;
  if (system.strict.empty()) return Feasibility::feasible(RationalVector(d));

  std::vector<std::vector<Rational>> columns;
  columns.reserve(system.size());
  auto add_column = [&](const LinearForm& form, bool strict) {
    auto ints = detail::primitive_integer(form);
    std::vector<Rational> col(d + 1);
    for (std::size_t i = 0; i < d; ++i) col[i] = ints[i];
    col[d] = strict ? 1 : 0;
    columns.push_back(std::move(col));
  };
  for (const auto& a : system.nonstrict)
    if (!a.is_zero()) add_column(a, false);
  for (const auto& b : system.strict) {
    // A zero strict form reads 0 > 0.
    if (b.is_zero()) return Feasibility::infeasible();
    add_column(b, true);
  }

  std::vector<Rational> rhs(d + 1);
  rhs[d] = 1;
  const auto p1 = detail::phase_one(columns, rhs);
  if (sgn(p1.optimum) == 0) return Feasibility::infeasible();

  RationalVector w(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = -p1.multipliers[i];
  auto ints = detail::primitive_integer(w);
  for (std::size_t i = 0; i < d; ++i) w[i] = ints[i];
  if (!system.satisfied_by(w)) throw std::logic_error("feasible: witness failed exact re-check");
  return Feasibility::feasible(std::move(w));
}

}  // namespace cqlearn

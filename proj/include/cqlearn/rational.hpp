#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cqlearn/error.hpp"

namespace cqlearn {

using Rational = mpq_class;
using Integer = mpz_class;

/**
 * Parses "p/q", "p", "-p/q" (base 10). Throws std::invalid_argument on
 * anything else, including a zero denominator. The result is canonical.
 */
inline Rational parse_rational(std::string_view token) {
  if (token.empty()) throw std::invalid_argument("empty rational");
  const auto slash = token.find('/');
  auto is_int = [](std::string_view s) {
    std::size_t i = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto to_int = [](std::string_view s) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    return Integer(std::string(s), 10);
  };
  if (slash == std::string_view::npos) {
    if (!is_int(token)) throw std::invalid_argument("malformed rational '" + std::string(token) + "'");
    return Rational(to_int(token));
  }
  const auto num = token.substr(0, slash);
  const auto den = token.substr(slash + 1);
  if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + std::string(token) + "'");
  Integer d = to_int(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(token) + "'");
  Rational r(to_int(num), d);
  r.canonicalize();
  return r;
}

/// num/den in lowest terms (gmpxx does not reduce on construction).
inline Rational ratio(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("ratio: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Canonical "p/q" or "p".
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline int sign(const Rational& r) { return sgn(r); }

/**
 * Fixed-length vector of exact rationals. Arithmetic never rounds.
 */
class RationalVector {
 public:
  RationalVector() = default;
  explicit RationalVector(std::size_t dim) : coords_(dim) {}
  explicit RationalVector(std::vector<Rational> coords) : coords_(std::move(coords)) {}
  RationalVector(std::initializer_list<Rational> coords) : coords_(coords) {}

  /// Convenience for tests and generators: integer coordinates.
  static RationalVector from_ints(std::initializer_list<long> values) {
    RationalVector v(values.size());
    std::size_t i = 0;
    for (long x : values) v.coords_[i++] = x;
    return v;
  }

  static RationalVector unit(std::size_t dim, std::size_t axis) {
    RationalVector v(dim);
    v.coords_.at(axis) = 1;
    return v;
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }
  Rational& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<Rational>& coords() const noexcept { return coords_; }

  auto begin() noexcept { return coords_.begin(); }
  auto end() noexcept { return coords_.end(); }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != 0) return false;
    return true;
  }

  RationalVector& operator+=(const RationalVector& o) {
    check_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  RationalVector& operator-=(const RationalVector& o) {
    check_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  RationalVector& operator*=(const Rational& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }

  friend RationalVector operator+(RationalVector a, const RationalVector& b) { return a += b; }
  friend RationalVector operator-(RationalVector a, const RationalVector& b) { return a -= b; }
  friend RationalVector operator*(RationalVector a, const Rational& s) { return a *= s; }
  friend RationalVector operator*(const Rational& s, RationalVector a) { return a *= s; }
  friend RationalVector operator-(RationalVector a) {
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend bool operator==(const RationalVector& a, const RationalVector& b) {
    return a.coords_ == b.coords_;
  }

  Rational dot(const RationalVector& o) const {
    check_dim(o);
    Rational s = 0;
    Rational t;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      t = coords_[i] * o.coords_[i];
      s += t;
    }
    return s;
  }

  Rational norm_sq() const { return dot(*this); }

  void check_dim(const RationalVector& o) const {
    if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  }

  friend std::ostream& operator<<(std::ostream& os, const RationalVector& v) {
    os << '(';
    for (std::size_t i = 0; i < v.dim(); ++i) os << (i ? "," : "") << v.coords_[i];
    return os << ')';
  }

 private:
  std::vector<Rational> coords_;
};

inline Rational dot(const RationalVector& a, const RationalVector& b) { return a.dot(b); }

}  // namespace cqlearn

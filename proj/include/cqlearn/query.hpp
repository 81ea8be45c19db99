#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/geometry.hpp"

namespace cqlearn {

using PointId = std::size_t;
using Pool = std::vector<RationalVector>;

/**
 * Either a label query on one point or the comparison "f(first) >= f(second)?".
 */
struct Query {
  enum class Kind : std::uint8_t { Label, Compare };

  Kind kind = Kind::Label;
  PointId first = 0;
  PointId second = 0;

  static Query label(PointId x) { return {Kind::Label, x, x}; }
  static Query compare(PointId x1, PointId x2) { return {Kind::Compare, x1, x2}; }

  bool is_label() const noexcept { return kind == Kind::Label; }
  friend bool operator==(const Query&, const Query&) = default;
};

/**
 * A query with its answer. For labels `answer` is +1/-1; for comparisons
 * it is 1 (f(first) >= f(second)) or 0.
 */
struct AnsweredQuery {
  Query query;
  int answer = 0;

  static AnsweredQuery label(PointId x, Label y) { return {Query::label(x), y}; }
  static AnsweredQuery compare(PointId x1, PointId x2, bool ge) {
    return {Query::compare(x1, x2), ge ? 1 : 0};
  }

  friend bool operator==(const AnsweredQuery&, const AnsweredQuery&) = default;
};

/// Append-only log of answered queries.
class QueryTranscript {
 public:
  void append(const AnsweredQuery& q) { entries_.push_back(q); }
  void append(const QueryTranscript& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }

  const std::vector<AnsweredQuery>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::size_t label_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.query.is_label();
    return n;
  }
  std::size_t compare_count() const { return size() - label_count(); }

  /// Debug dump: "L <id> <+1|-1>" or "C <id1> <id2> <0|1>" per line.
  friend std::ostream& operator<<(std::ostream& os, const QueryTranscript& t) {
    for (const auto& e : t.entries_) {
      if (e.query.is_label())
        os << "L " << e.query.first << ' ' << (e.answer > 0 ? "+1" : "-1") << '\n';
      else
        os << "C " << e.query.first << ' ' << e.query.second << ' ' << e.answer << '\n';
    }
    return os;
  }

 private:
  std::vector<AnsweredQuery> entries_;
};

struct QueryStats {
  std::uint64_t label_count = 0;
  std::uint64_t compare_count = 0;

  std::uint64_t total() const noexcept { return label_count + compare_count; }
  friend bool operator==(const QueryStats&, const QueryStats&) = default;
};

/**
 * Answers queries from a hidden concept over a fixed pool. Every answer is
 * appended to the caller's transcript and to the oracle's own history.
 * Not thread-safe; one oracle per learner run.
 */
class SimulatedOracle {
 public:
  SimulatedOracle(LinearConcept hidden, std::span<const RationalVector> pool)
      : hidden_(std::move(hidden)), pool_(pool) {
    for (const auto& x : pool_)
      if (x.dim() != hidden_.dim()) throw DimensionMismatch(hidden_.dim(), x.dim());
  }

  Label query_label(PointId x, QueryTranscript& record) {
    const Label y = hidden_.label_of(point(x));
    ++stats_.label_count;
    const auto entry = AnsweredQuery::label(x, y);
    record.append(entry);
    history_.append(entry);
    return y;
  }

  bool query_compare(PointId x1, PointId x2, QueryTranscript& record) {
    const bool ge = hidden_.eval(point(x1)) >= hidden_.eval(point(x2));
    ++stats_.compare_count;
    const auto entry = AnsweredQuery::compare(x1, x2, ge);
    record.append(entry);
    history_.append(entry);
    return ge;
  }

  const QueryStats& stats() const noexcept { return stats_; }
  const QueryTranscript& history() const noexcept { return history_; }
  std::span<const RationalVector> pool() const noexcept { return pool_; }
  std::size_t pool_size() const noexcept { return pool_.size(); }

  /// Ground truth for soundness checks in tests and the harness; learners never call this.
  const LinearConcept& hidden() const noexcept { return hidden_; }

 private:
  const RationalVector& point(PointId x) const {
    if (x >= pool_.size()) throw UnknownPoint(x);
    return pool_[x];
  }

  LinearConcept hidden_;
  std::span<const RationalVector> pool_;
  QueryStats stats_;
  QueryTranscript history_;
};

}  // namespace cqlearn

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqlearn {

/** Two vectors (or a vector and a system) disagree on the ambient dimension. */
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/** Every functional value on the pool is zero, so ratios are undefined. */
class DegeneratePool : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/** A point id that is not part of the pool. */
class UnknownPoint : public std::out_of_range {
 public:
  explicit UnknownPoint(std::size_t id)
      : std::out_of_range("unknown point id " + std::to_string(id)), id_(id) {}
  std::size_t id() const noexcept { return id_; }

 private:
  std::size_t id_;
};

/**
 * The answered queries admit no consistent concept. With a simulated
 * annotator this means the oracle or the transcript is broken.
 */
class Inconsistent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A generator ran out of its rejection budget. */
class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A learner exceeded its resampling guard. */
class NonTermination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Malformed instance text; line() is 1-based. */
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cqlearn

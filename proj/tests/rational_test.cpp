#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "cqlearn/random.hpp"
#include "cqlearn/rational.hpp"

using namespace cqlearn;

TEST(ParseRational, AcceptsIntegersFractionsAndSigns) {
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational("-3"), Rational(-3));
  EXPECT_EQ(parse_rational("+4"), Rational(4));
  EXPECT_EQ(parse_rational("1/2"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(parse_rational("123456789012345678901234567890/3"),
            Rational(Integer("41152263004115226300411522630")));
}

TEST(ParseRational, RejectsMalformedInput) {
  for (const char* bad : {"", "1/0", "/", "1/", "/2", "a", "1.5", "1/2/3", "--1", "1 2", "0x10"})
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
}

TEST(ParseRational, RoundTripsThroughToString) {
  for (const Rational& q : {Rational(0), Rational(-5, 7), Rational(41, 40), Rational(Integer("99999999999999999999"))})
    EXPECT_EQ(parse_rational(to_string(q)), q);
}

TEST(Ratio, ReducesToLowestTerms) {
  EXPECT_EQ(ratio(6, 4), Rational(3, 2));
  EXPECT_EQ(ratio(0, 3), Rational(0));
  EXPECT_EQ(ratio(3, -6), Rational(-1, 2));
  EXPECT_THROW(ratio(1, 0), std::invalid_argument);
}

TEST(RationalVector, ArithmeticAndDot) {
  const auto a = RationalVector::from_ints({1, 2, 3});
  const RationalVector b{Rational(1, 2), Rational(-1), Rational(0)};
  EXPECT_EQ(a.dot(b), Rational(-3, 2));
  EXPECT_EQ(dot(a, b), Rational(-3, 2));
  EXPECT_EQ(a + b, (RationalVector{Rational(3, 2), Rational(1), Rational(3)}));
  EXPECT_EQ(a - a, RationalVector(3));
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_EQ(-a, RationalVector::from_ints({-1, -2, -3}));
  EXPECT_EQ(a * Rational(2), RationalVector::from_ints({2, 4, 6}));
  EXPECT_EQ(a.norm_sq(), Rational(14));
  EXPECT_EQ(RationalVector::unit(3, 1), RationalVector::from_ints({0, 1, 0}));
}

TEST(RationalVector, DimensionMismatchThrows) {
  const auto a = RationalVector::from_ints({1, 2});
  const auto b = RationalVector::from_ints({1, 2, 3});
  EXPECT_THROW(a.dot(b), DimensionMismatch);
  EXPECT_THROW(a + b, DimensionMismatch);
}

TEST(RationalVector, StreamsCoordinates) {
  std::ostringstream os;
  os << RationalVector{Rational(1, 2), Rational(-3)};
  EXPECT_NE(os.str().find("1/2"), std::string::npos);
  EXPECT_NE(os.str().find("-3"), std::string::npos);
}

TEST(Random, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  EXPECT_NE(derive_seed(7, 3), derive_seed(7, 4));
  EXPECT_NE(derive_seed(7, 3), derive_seed(8, 3));
}

TEST(Random, UniformBelowStaysInRange) {
  Rng rng(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[uniform_below(rng, 7)];
  for (int h : hits) EXPECT_GT(h, 800);
  for (int i = 0; i < 1000; ++i) {
    const auto v = uniform_int(rng, -3, 3);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 3);
  }
}

TEST(Random, SampleWithoutReplacementIsDistinct) {
  Rng rng(5);
  const auto s = sample_without_replacement(rng, 50, 20);
  ASSERT_EQ(s.size(), 20u);
  std::set<std::size_t> seen(s.begin(), s.end());
  EXPECT_EQ(seen.size(), 20u);
  for (auto v : s) EXPECT_LT(v, 50u);
  EXPECT_EQ(sample_without_replacement(rng, 5, 10).size(), 5u);
}

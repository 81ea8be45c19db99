#include <gtest/gtest.h>

#include <numeric>

#include "cqlearn/instances.hpp"

using namespace cqlearn;

namespace {
std::vector<PointId> all_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  std::iota(ids.begin(), ids.end(), PointId{0});
  return ids;
}
}  // namespace

TEST(SuggestedK, Values) {
  EXPECT_EQ(grid_suggested_k(8, 2), 192u);
  EXPECT_EQ(grid_suggested_k(16, 3), 365u);
  EXPECT_EQ(margin_suggested_k(2, Rational(1, 2)), 64u);
}

TEST(GenGrid, HypercubeSetting) {
  const auto inst = gen_grid(1, 5, 20, 4);
  EXPECT_EQ(inst.pool.size(), 20u);
  for (const auto& x : inst.pool)
    for (const auto& c : x) {
      EXPECT_TRUE(c == 0 || c == 1);
    }
  EXPECT_EQ(inst.meta.kind, InstanceMeta::Kind::Grid);
}

TEST(GenGrid, DistinctPointsBothLabelsAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = gen_grid(16, 3, 500, seed);
    std::set<std::vector<Rational>> seen;
    for (const auto& x : inst.pool) {
      EXPECT_TRUE(seen.insert(x.coords()).second);
      for (const auto& c : x) {
        EXPECT_EQ(c.get_den(), 1);
        EXPECT_GE(c, 0);
        EXPECT_LE(c, 16);
      }
    }
    EXPECT_TRUE(detail::has_both_labels(inst.hidden, inst.pool));
    EXPECT_EQ(inst, gen_grid(16, 3, 500, seed));
    EXPECT_EQ(inst.meta.suggested_k, 365u);
  }
  EXPECT_NE(gen_grid(16, 3, 500, 1), gen_grid(16, 3, 500, 2));
}

TEST(GenGrid, ClampsToTheFullGrid) {
  const auto inst = gen_grid(8, 2, 192, 0);
  EXPECT_EQ(inst.pool.size(), 81u);
  EXPECT_TRUE(inst.meta.clamped);
  EXPECT_FALSE(gen_grid(8, 2, 81, 0).meta.clamped);
  EXPECT_THROW(gen_grid(0, 2, 5, 0), std::invalid_argument);
}

TEST(GenGrid, HugeGridsUseRejectionSampling) {
  const auto inst = gen_grid(1000, 8, 50, 3);
  EXPECT_EQ(inst.pool.size(), 50u);
}

TEST(GenMargin, MinimalRatioHoldsExactly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = gen_margin(3, 200, Rational(1, 4), seed);
    EXPECT_EQ(inst.pool.size(), 200u);
    EXPECT_GE(margin_report(inst.hidden, inst.pool).eta, Rational(1, 4));
    EXPECT_TRUE(detail::has_both_labels(inst.hidden, inst.pool));
    EXPECT_EQ(inst, gen_margin(3, 200, Rational(1, 4), seed));
  }
}

TEST(GenMargin, Errors) {
  EXPECT_THROW(gen_margin(2, 5, Rational(0), 0), std::invalid_argument);
  EXPECT_THROW(gen_margin(2, 5, Rational(3, 2), 0), std::invalid_argument);
  EXPECT_THROW(gen_margin(3, 50, Rational(1), 0, 10), GenerationFailure);
}

TEST(GenMargin, StandardBasisHasUnitRatio) {
  Pool pool;
  RationalVector w(4);
  for (std::size_t i = 0; i < 4; ++i) {
    pool.push_back(RationalVector::unit(4, i));
    w[i] = i % 2 ? -1 : 1;
  }
  EXPECT_EQ(margin_report(LinearConcept(w), pool).eta, 1);
}

TEST(GenLbR3, SmallestBaseForThreePoints) {
  const auto w = gen_lb_r3(3);
  EXPECT_EQ(w.base, 8);
  EXPECT_TRUE(r3_profiles_monotone(8, 3));
  EXPECT_FALSE(r3_profiles_monotone(4, 3));
  EXPECT_EQ(gen_lb_r3(2).base, 2);
}

TEST(GenLbR3, ValuesFollowTheProfile) {
  for (std::size_t n : {2u, 3u, 7u, 12u}) {
    const auto w = gen_lb_r3(n);
    ASSERT_EQ(w.concepts.size(), n + 1);
    for (long i = 0; i <= static_cast<long>(n); ++i)
      for (long j = 1; j <= static_cast<long>(n); ++j) {
        const auto f = w.concepts[i].eval(w.pool[j - 1]);
        EXPECT_EQ(f, Rational(r3_profile(w.base, i, j)));
        EXPECT_EQ(w.concepts[i].label_of(w.pool[j - 1]), i == j ? +1 : -1);
      }
  }
}

TEST(GenLbMargin, TwoPointInstance) {
  const auto w = gen_lb_margin(2);
  EXPECT_EQ(w.concepts[1].weights(), (RationalVector{Rational(41, 40), Rational(-1, 20), Rational(-1, 2)}));
  EXPECT_EQ(w.concepts[1].eval(w.pool[0]), Rational(21, 40));
  EXPECT_EQ(w.concepts[1].eval(w.pool[1]), Rational(-11, 20));
}

TEST(GenLbMargin, AbsoluteValuesAndLabelPattern) {
  for (std::size_t n : {2u, 5u, 9u}) {
    const auto w = gen_lb_margin(n);
    const Rational denom(static_cast<unsigned long>(10 * n * n));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) {
        const auto f = w.concepts[i].eval(w.pool[j - 1]);
        EXPECT_EQ(abs(f), Rational(1, 2) + Rational(static_cast<unsigned long>(j)) / denom);
        EXPECT_EQ(w.concepts[i].label_of(w.pool[j - 1]), i == j ? +1 : -1);
      }
  }
}

TEST(GenLbMargin, SquaredMarginAtLeastOneSixtyFourth) {
  const auto w = gen_lb_margin(5);
  for (const auto& c : w.concepts) {
    EXPECT_GE(margin_report(c, w.pool).margin_sq, Rational(1, 64));
  }
}

TEST(VerifyWitness, GeneratedWitnessesAreClean) {
  for (std::size_t n : {2u, 3u, 10u, 25u}) {
    const auto r3 = verify_witness(gen_lb_r3(n));
    EXPECT_TRUE(r3.clean()) << n;
    EXPECT_EQ(r3.comparisons_checked, n * (n - 1) * (n - 2));
    const auto m = verify_witness(gen_lb_margin(n));
    EXPECT_TRUE(m.clean()) << n;
    EXPECT_GE(m.min_margin_sq, Rational(1, 64));
  }
}

TEST(VerifyWitness, MutationsAreFlagged) {
  // Any corruption that changes one label under one concept breaks the witness.
  Rng rng(17);
  std::size_t label_changing = 0;
  for (int trial = 0; trial < 120; ++trial) {
    auto w = trial % 2 ? gen_lb_r3(6) : gen_lb_margin(6);
    const auto i = uniform_below(rng, w.concepts.size());
    const auto before = w.concepts[i];
    auto weights = before.weights();
    const auto k = uniform_below(rng, weights.dim());
    Rational reach = 0;
    for (const auto& c : weights) reach += abs(c);
    weights[k] += (uniform_below(rng, 2) ? 1 : -1) * 10 * 36 * reach;
    w.concepts[i] = LinearConcept(weights);
    bool changed = false;
    for (const auto& x : w.pool) changed = changed || before.label_of(x) != w.concepts[i].label_of(x);
    if (!changed) continue;
    ++label_changing;
    EXPECT_FALSE(verify_witness(w).clean()) << "trial " << trial << " concept " << i << " coordinate " << k;
  }
  EXPECT_GT(label_changing, 40u);
}

TEST(VerifyWitness, OrderCorruptionIsFlagged) {
  auto w = gen_lb_margin(5);
  auto weights = w.concepts[2].weights();
  std::swap(weights[3], weights[4]);  // swaps f_2(x_4) and f_2(x_5)
  w.concepts[2] = LinearConcept(weights);
  EXPECT_FALSE(verify_witness(w).clean());
}

TEST(VerifyWitness, StructuralProblems) {
  auto w = gen_lb_margin(3);
  w.concepts.pop_back();
  EXPECT_FALSE(verify_witness(w).clean());
  EXPECT_FALSE(verify_witness(WitnessInstance{}).clean());
}

TEST(Transcripts, ChainAndFullGiveTheSameInferences) {
  Rng rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = gen_grid(3, 2 + trial % 2, 9, static_cast<std::uint64_t>(trial));
    const auto ids = all_ids(inst.pool.size());
    std::vector<PointId> rest(ids.begin() + 1, ids.end());
    const auto full = constraints_of(full_transcript(inst.hidden, inst.pool, rest), inst.pool);
    const auto chain = constraints_of(chain_transcript(inst.hidden, inst.pool, rest), inst.pool);
    EXPECT_TRUE(full.satisfied_by(inst.hidden.weights()));
    EXPECT_TRUE(chain.satisfied_by(inst.hidden.weights()));
    for (const auto& x : inst.pool) {
      ASSERT_EQ(infer_label(full, x), infer_label(chain, x)) << "trial " << trial;
    }
  }
}

TEST(Transcripts, HeldOutWitnessPointIsUnknown) {
  const auto w = gen_lb_margin(6);
  const auto ids = all_ids(w.n());
  for (std::size_t i = 0; i < w.n(); ++i) {
    std::vector<PointId> rest;
    for (PointId j : ids)
      if (j != i) rest.push_back(j);
    const auto t = full_transcript(w.concepts[0], w.pool, rest);
    EXPECT_EQ(infer_label(t, w.pool, i), InferenceOutcome::Unknown);
  }
}

TEST(FirstSelfInferable, FindsInferablePointsOnGrids) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = gen_grid(8, 2, 81, seed);
    const auto ids = all_ids(inst.pool.size());
    std::size_t tried = 0;
    const auto found = first_self_inferable(inst.hidden, inst.pool, ids, &tried);
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(tried, *found + 1);
  }
}

TEST(FirstSelfInferable, WitnessHasNone) {
  const auto w = gen_lb_margin(5);
  EXPECT_FALSE(first_self_inferable(w.concepts[0], w.pool, all_ids(w.n())).has_value());
}

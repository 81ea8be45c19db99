#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cqlearn/experiment.hpp"
#include "cqlearn/instances.hpp"
#include "cqlearn/learners.hpp"

using namespace cqlearn;

namespace {
RationalVector v(std::initializer_list<long> xs) { return RationalVector::from_ints(xs); }

std::vector<PointId> all_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  std::iota(ids.begin(), ids.end(), PointId{0});
  return ids;
}

void expect_consistent_accounting(const RunReport& rep, const SimulatedOracle& o) {
  EXPECT_EQ(rep.stats, o.stats());
  EXPECT_EQ(o.history().label_count(), rep.stats.label_count);
  EXPECT_EQ(o.history().compare_count(), rep.stats.compare_count);
  EXPECT_EQ(rep.iteration_queries.size(), rep.iterations);
}
}  // namespace

TEST(CeilLog2, Values) {
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(3), 2u);
  EXPECT_EQ(ceil_log2(64), 6u);
  EXPECT_EQ(ceil_log2(65), 7u);
  EXPECT_EQ(sort_query_budget(64), 64u + 64u * 6u);
}

TEST(SortWithQueries, TrivialSizes) {
  const Pool pool = {v({3, 1}), v({1, 1})};
  SimulatedOracle o(LinearConcept(v({1, 0})), pool);
  QueryTranscript t;
  EXPECT_EQ(sort_with_queries({0}, +1, o, t), std::vector<PointId>{0});
  EXPECT_EQ(o.stats().compare_count, 0u);
  EXPECT_EQ(sort_with_queries({0, 1}, +1, o, t), (std::vector<PointId>{1, 0}));
  EXPECT_EQ(o.stats().compare_count, 1u);
  EXPECT_TRUE(sort_with_queries({}, +1, o, t).empty());
}

TEST(SortWithQueries, MatchesExactSortWithinBudget) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    for (Label y : {+1, -1}) {
      Pool pool;
      const LinearConcept c(v({1, 1, 0}));
      while (pool.size() < 64) {
        const auto x = v({static_cast<long>(uniform_int(rng, -40, 40)), static_cast<long>(uniform_int(rng, -40, 40)), 1});
        if (c.label_of(x) == y) pool.push_back(x);
      }
      SimulatedOracle o(c, pool);
      QueryTranscript t;
      const auto sorted = sort_with_queries(all_ids(64), y, o, t);
      EXPECT_LE(o.stats().compare_count, 64u * 6u);
      EXPECT_EQ(t.size(), o.stats().compare_count);
      std::vector<Rational> got, want;
      for (PointId id : sorted) got.push_back(abs(c.eval(pool[id])));
      want = got;
      std::sort(want.begin(), want.end());
      EXPECT_EQ(got, want);
    }
  }
}

TEST(InCone2d, Basics) {
  const auto apex = v({0, 0}), a = v({1, 0}), b = v({0, 1});
  EXPECT_TRUE(in_cone2d(apex, a, b, apex));
  EXPECT_TRUE(in_cone2d(apex, a, b, v({2, 3})));
  EXPECT_FALSE(in_cone2d(apex, a, b, v({-1, 0})));
  EXPECT_TRUE(in_cone2d(apex, a, b, v({5, 0})));
  EXPECT_TRUE(in_cone2d(apex, b, a, v({2, 3})));  // orientation does not matter
}

TEST(InCone2d, DegenerateGenerators) {
  const auto o = v({0, 0});
  // Parallel generators span a ray.
  EXPECT_TRUE(in_cone2d(o, v({1, 1}), v({2, 2}), v({5, 5})));
  EXPECT_FALSE(in_cone2d(o, v({1, 1}), v({2, 2}), v({-1, -1})));
  // Antiparallel generators span a line.
  EXPECT_TRUE(in_cone2d(o, v({1, 1}), v({-2, -2}), v({-5, -5})));
  EXPECT_FALSE(in_cone2d(o, v({1, 1}), v({-2, -2}), v({1, 0})));
  // Zero generators.
  EXPECT_TRUE(in_cone2d(o, o, v({0, 1}), v({0, 4})));
  EXPECT_TRUE(in_cone2d(o, o, o, o));
  EXPECT_FALSE(in_cone2d(o, o, o, v({0, 1})));
}

TEST(ConvexHull, SquareWithInteriorAndCollinearPoints) {
  std::vector<detail::Point2> pts;
  PointId id = 0;
  for (long x = 0; x <= 2; ++x)
    for (long y = 0; y <= 2; ++y) pts.push_back({x, y, id++});
  const auto hull = detail::convex_hull(pts);
  ASSERT_EQ(hull.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % 4];
    const auto& r = hull[(i + 2) % 4];
    EXPECT_GT(detail::cross2(q.x - p.x, q.y - p.y, r.x - p.x, r.y - p.y), 0);
  }
}

TEST(Learn2d, SoundAndBoundedPerIteration) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = detail::random_halfplane_instance(2000, rng);
    SimulatedOracle o(inst.hidden, inst.pool);
    const auto rep = learn_2d(inst.pool, o, 30, derive_seed(9, trial));
    EXPECT_EQ(soundness_violations(rep, inst.hidden, inst.pool), 0u);
    for (int y : rep.labels) {
      EXPECT_NE(y, 0);
    }
    for (auto q : rep.iteration_queries) {
      EXPECT_LE(q, 59u);
    }
    expect_consistent_accounting(rep, o);
    EXPECT_EQ(rep.dis_sizes.front(), 2000u);
    EXPECT_EQ(rep.dis_sizes.back(), 0u);
  }
}

TEST(Learn2d, DegeneratePools) {
  // Collinear same-label points.
  Pool line;
  for (long i = 0; i < 100; ++i) line.push_back(v({i, 2 * i, 1}));
  SimulatedOracle o1(LinearConcept(v({1, 0, 1})), line);
  const auto r1 = learn_2d(line, o1, 30, 1);
  EXPECT_EQ(soundness_violations(r1, o1.hidden(), line), 0u);
  EXPECT_LT(r1.iterations, 10u);

  // Duplicate points and a boundary through pool points.
  Pool dup;
  for (long i = 0; i < 60; ++i) dup.push_back(v({i % 5, (i * 7) % 5, 1}));
  SimulatedOracle o2(LinearConcept(v({1, -1, 0})), dup);
  const auto r2 = learn_2d(dup, o2, 30, 2);
  EXPECT_EQ(soundness_violations(r2, o2.hidden(), dup), 0u);

  // Single point.
  const Pool one = {v({3, 4, 1})};
  SimulatedOracle o3(LinearConcept(v({1, 1, -10})), one);
  const auto r3 = learn_2d(one, o3, 30, 3);
  EXPECT_EQ(r3.labels, std::vector<int>{-1});
  EXPECT_EQ(r3.stats.total(), 1u);
}

TEST(Learn2d, RejectsUnliftedPools) {
  const Pool bad = {v({1, 2})};
  SimulatedOracle o(LinearConcept(v({1, 0})), bad);
  EXPECT_THROW(learn_2d(bad, o, 30, 0), DimensionMismatch);
  const Pool bad2 = {v({1, 2, 2})};
  SimulatedOracle o2(LinearConcept(v({1, 0, 0})), bad2);
  EXPECT_THROW(learn_2d(bad2, o2, 30, 0), std::invalid_argument);
}

TEST(WeakConfidentLearn, QueryBudgetAndSoundness) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = gen_grid(8, 3, 300, seed);
    SimulatedOracle o(inst.hidden, inst.pool);
    Rng rng(seed);
    const std::size_t m = 40;
    std::vector<PointId> sample(m);
    for (auto& s : sample) s = uniform_below(rng, inst.pool.size());
    const auto res = weak_confident_learn(sample, inst.pool, o);
    EXPECT_EQ(o.stats().label_count, m);
    EXPECT_LE(o.stats().compare_count, m * ceil_log2(m));
    EXPECT_EQ(res.transcript.size(), o.stats().total());
    for (PointId x = 0; x < inst.pool.size(); ++x)
      if (!res.hypothesis.abstains(x)) {
        ASSERT_EQ(res.hypothesis[x], inst.hidden.label_of(inst.pool[x]));
      }
    for (PointId s : sample) {
      EXPECT_FALSE(res.hypothesis.abstains(s));
    }
  }
}

TEST(WeakConfidentLearn, SampleCoveringPoolGivesFullCoverage) {
  const auto inst = gen_grid(3, 2, 16, 1);
  SimulatedOracle o(inst.hidden, inst.pool);
  const auto ids = all_ids(inst.pool.size());
  const auto res = weak_confident_learn(ids, inst.pool, o);
  EXPECT_EQ(coverage(res.hypothesis, ids), 1);
}

TEST(Boost, SmallPoolIsLabelledDirectly) {
  const auto inst = gen_grid(8, 2, 81, 3);
  SimulatedOracle o(inst.hidden, inst.pool);
  BoostConfig cfg;
  cfg.k = 192;
  const auto rep = boost(inst.pool, o, cfg);
  EXPECT_EQ(rep.iterations, 0u);
  EXPECT_EQ(rep.stats.label_count, inst.pool.size());
  EXPECT_EQ(rep.stats.compare_count, 0u);
  EXPECT_EQ(soundness_violations(rep, inst.hidden, inst.pool), 0u);
}

TEST(Boost, AcceptedStepsHalveDisagreementRegion) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = gen_grid(16, 3, 3000, seed);
    SimulatedOracle o(inst.hidden, inst.pool);
    BoostConfig cfg;
    cfg.k = 8 + seed % 5;  // well below the inference dimension bound, so several steps run
    cfg.rng_seed = seed;
    const auto rep = boost(inst.pool, o, cfg);
    EXPECT_EQ(soundness_violations(rep, inst.hidden, inst.pool), 0u);
    for (int y : rep.labels) {
      ASSERT_NE(y, 0);
    }
    ASSERT_GE(rep.dis_sizes.size(), rep.iterations + 1);
    for (std::size_t t = 0; t < rep.iterations; ++t) {
      EXPECT_LE(2 * rep.dis_sizes[t + 1], rep.dis_sizes[t]);
    }
    EXPECT_GE(rep.iterations, 1u);
    expect_consistent_accounting(rep, o);
  }
}

TEST(Boost, MarginInstancesAreSound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = gen_margin(3, 800, Rational(1, 8), seed);
    SimulatedOracle o(inst.hidden, inst.pool);
    BoostConfig cfg;
    cfg.k = 10;
    cfg.rng_seed = seed;
    const auto rep = boost(inst.pool, o, cfg);
    EXPECT_EQ(soundness_violations(rep, inst.hidden, inst.pool), 0u);
  }
}

TEST(Boost, RejectsZeroK) {
  const auto inst = gen_grid(2, 2, 9, 0);
  SimulatedOracle o(inst.hidden, inst.pool);
  EXPECT_THROW(boost(inst.pool, o, BoostConfig{0, 0, 0, 0}), std::invalid_argument);
}

TEST(Statistical, SampleSize) {
  EXPECT_EQ(statistical_sample_size(3, 0.1, 0.1), static_cast<std::size_t>(std::ceil(80 * (3 + std::log(10.0)))));
  EXPECT_EQ(statistical_sample_size(1, 0.5, 0.5, 2), static_cast<std::size_t>(std::ceil(4 * (1 + std::log(2.0)))));
}

TEST(Statistical, DistributionOnOnePoint) {
  const LinearConcept hidden(v({1, -1, 0}));
  const auto res = learn_statistical(
      [](Rng&) { return v({3, 1, 1}); }, 3, 0.2, 0.2,
      [&](std::span<const RationalVector> pool) { return SimulatedOracle(hidden, pool); }, BoostConfig{16, 0, 0, 0}, 5);
  EXPECT_EQ(res.learned.label_of(v({3, 1, 1})), +1);
  EXPECT_EQ(res.sample.size(), statistical_sample_size(3, 0.2, 0.2));
  EXPECT_EQ(res.pool.size(), 1u);
  EXPECT_EQ(res.report.stats.label_count, 1u);
  EXPECT_EQ(res.report.stats.compare_count, 0u);
  EXPECT_EQ(soundness_violations(res.report, hidden, res.pool), 0u);
}

TEST(Statistical, FitsConsistentConcept) {
  const Pool pts = {v({1, 0}), v({0, 1}), v({-1, -1})};
  const std::vector<int> labels = {+1, +1, -1};
  const auto c = fit_consistent(pts, labels);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(c.label_of(pts[i]), labels[i]);
  }
  const std::vector<int> bad = {+1, -1, +1};
  const Pool line = {v({1, 0}), v({2, 0}), v({3, 0})};
  EXPECT_THROW(fit_consistent(line, bad), Inconsistent);
}

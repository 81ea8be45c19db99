// Infer labels of a small planar pool from a handful of answered queries.

#include <iostream>

#include "cqlearn/inference.hpp"
#include "cqlearn/learners.hpp"

int main() {
  using namespace cqlearn;
  // Lifted points (x, y, 1); the hidden concept is x - y >= 0.
  const Pool pool = {
      RationalVector::from_ints({1, 0, 1}), RationalVector::from_ints({2, 0, 1}),
      RationalVector::from_ints({3, 0, 1}), RationalVector::from_ints({0, 1, 1}),
      RationalVector::from_ints({0, 3, 1}), RationalVector::from_ints({5, 1, 1}),
  };
  const LinearConcept hidden(RationalVector::from_ints({1, -1, 0}));
  SimulatedOracle oracle(hidden, pool);

  QueryTranscript t;
  oracle.query_label(0, t);
  oracle.query_label(1, t);
  oracle.query_compare(1, 0, t);
  oracle.query_label(3, t);

  std::vector<PointId> targets = {2, 4, 5};
  const auto h = infer_all(t, pool, targets);
  std::cout << "transcript:\n" << t;
  for (PointId x : targets)
    std::cout << "x" << x << ": " << (h.abstains(x) ? "unknown" : h[x] > 0 ? "+1" : "-1") << '\n';
  std::cout << "queries used: " << oracle.stats().total() << '\n';
}

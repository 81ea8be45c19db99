// Label a random planar pool with the half-plane learner and report query counts.

#include <iostream>

#include "cqlearn/experiment.hpp"

int main(int argc, char** argv) {
  using namespace cqlearn;
  const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 10000;
  Rng rng(derive_seed(42, 0));
  const auto inst = detail::random_halfplane_instance(n, rng);
  SimulatedOracle oracle(inst.hidden, inst.pool);
  const auto rep = learn_2d(inst.pool, oracle, 30, 7);
  std::cout << "n=" << n << " iterations=" << rep.iterations << " labels=" << rep.stats.label_count
            << " comparisons=" << rep.stats.compare_count
            << " violations=" << soundness_violations(rep, inst.hidden, inst.pool) << '\n';
}

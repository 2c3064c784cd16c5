#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rm/exact.hpp"
#include "rm/fluid.hpp"
#include "rm/lp.hpp"
#include "test_util.hpp"

using namespace rm;

namespace {

double dp_value(const NamedInstance& inst) {
  StageProbabilities probs = derive_probabilities(inst.demand);
  return solve_dp(inst.network, inst.demand, probs).opt;
}

}  // namespace

TEST_CASE("dynamic program fixture values") {
  CHECK(dp_value(counterexample("appG", 8)) == doctest::Approx(8.0));
  CHECK(dp_value(counterexample("appF", 8)) == doctest::Approx(3.453125));
  CHECK(dp_value(counterexample("appK1", 2)) == doctest::Approx(3.5));
  CHECK(dp_value(counterexample("appK2")) == doctest::Approx(2.75));
  CHECK(dp_value(counterexample("appN", 3)) == doctest::Approx(4.5));
}

TEST_CASE("dp value is monotone in capacity") {
  RandomStream rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    NamedInstance inst;
    inst.demand = testutil::random_model(1 + rng.next_below(3),
                                         1 + rng.next_below(3), rng);
    inst.network = testutil::random_network(inst.demand, rng);
    StageProbabilities probs = derive_probabilities(inst.demand);
    double base = solve_dp(inst.network, inst.demand, probs).opt;
    NetworkInstance bigger = inst.network;
    for (int& c : bigger.capacities) ++c;
    double more = solve_dp(bigger, inst.demand, probs).opt;
    CHECK(more >= base - 1e-9);
  }
}

TEST_CASE("dp never exceeds the fluid relaxation") {
  RandomStream rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    NamedInstance inst;
    inst.demand = testutil::random_model(1 + rng.next_below(3),
                                         1 + rng.next_below(3), rng);
    inst.network = testutil::random_network(inst.demand, rng);
    StageProbabilities probs = derive_probabilities(inst.demand);
    double dp = solve_dp(inst.network, inst.demand, probs).opt;
    LPSolution prf = solve_lp(
        build_prf(inst.network, inst.demand, probs, PrfForm::Reduced).lp);
    REQUIRE(prf.status == LPStatus::Optimal);
    CHECK(dp <= prf.objective + 1e-7);
  }
}

TEST_CASE("state-space guard") {
  NamedInstance inst = counterexample("appE1");
  StageProbabilities probs = derive_probabilities(inst.demand);
  CHECK_THROWS_AS(solve_dp(inst.network, inst.demand, probs, 1),
                  StateSpaceTooLarge);
}

TEST_CASE("offline fixture values") {
  CHECK(offline_exact(counterexample("appE1").network,
                      counterexample("appE1").demand)
            .value == doctest::Approx(1.375));
  CHECK(offline_exact(counterexample("appE2").network,
                      counterexample("appE2").demand)
            .value == doctest::Approx(1.75));
}

TEST_CASE("offline enumeration guard and monte carlo agreement") {
  NamedInstance e1 = counterexample("appE1");
  CHECK_THROWS_AS(offline_exact(e1.network, e1.demand, 1),
                  EnumerationTooLarge);

  OfflineResult exact = offline_exact(e1.network, e1.demand);
  OfflineResult mc = offline_mc(e1.network, e1.demand, 20000, 7);
  CHECK_FALSE(mc.exact);
  CHECK(mc.n_paths == 20000);
  CHECK(std::fabs(mc.value - exact.value) < 4 * mc.stderr_ + 1e-9);
}

TEST_CASE("offline bound dominates the dp") {
  RandomStream rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    NamedInstance inst;
    inst.demand = testutil::random_model(1 + rng.next_below(2),
                                         1 + rng.next_below(3), rng);
    inst.network = testutil::random_network(inst.demand, rng);
    StageProbabilities probs = derive_probabilities(inst.demand);
    double dp = solve_dp(inst.network, inst.demand, probs).opt;
    double off = offline_exact(inst.network, inst.demand).value;
    CHECK(off >= dp - 1e-9);
  }
}

TEST_CASE("hindsight knapsack") {
  NetworkInstance net;
  net.capacities = {1, 2};
  net.products = {{5.0, {1, 0}}, {3.0, {0, 1}}, {4.0, {1, 1}}, {0.0, {0, 0}}};
  net.null_product_index = 3;
  // one request per product: best is {0, 1} = 8 (2 blocks 0 on resource 0)
  CHECK(hindsight_optimum(net, {0, 1, 2}) == doctest::Approx(8.0));
  CHECK(hindsight_optimum(net, {2, 2, 2}) == doctest::Approx(4.0));
  CHECK(hindsight_optimum(net, {3, 3}) == doctest::Approx(0.0));
  CHECK(hindsight_optimum(net, {}) == doctest::Approx(0.0));
  // duplicates limited by capacity on resource 1
  CHECK(hindsight_optimum(net, {1, 1, 1}) == doctest::Approx(6.0));
}

TEST_CASE("ample capacity accepts every request") {
  RandomStream rng(44);
  NamedInstance inst;
  inst.demand = testutil::random_model(2, 2, rng);
  inst.network = testutil::random_network(inst.demand, rng);
  for (int& c : inst.network.capacities) c = 1000;
  StageProbabilities probs = derive_probabilities(inst.demand);
  double expect = 0.0;
  for (int k = 0; k < inst.demand.K; ++k)
    for (int t = 0; t < inst.demand.T; ++t)
      for (int j = 0; j < inst.network.num_products(); ++j)
        expect += probs.tail(k, t) * inst.network.arrivals[k][t][j] *
                  inst.network.products[j].revenue;
  CHECK(solve_dp(inst.network, inst.demand, probs).opt ==
        doctest::Approx(expect).epsilon(1e-9));
  CHECK(offline_exact(inst.network, inst.demand).value ==
        doctest::Approx(expect).epsilon(1e-9));
}

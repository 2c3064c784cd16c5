#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "rm/instance.hpp"
#include "rm/io.hpp"

using namespace rm;

TEST_CASE("every registered fixture validates") {
  for (const char* name :
       {"appE1", "appE2", "appF", "appG", "appK1", "appK2", "appN"}) {
    NamedInstance inst = counterexample(name);
    CHECK_NOTHROW(inst.network.validate_with(inst.demand));
    CHECK(inst.name == name);
  }
}

TEST_CASE("fixture parameters are range checked") {
  CHECK_THROWS_AS(counterexample("nope"), UnknownName);
  CHECK_THROWS_AS(counterexample("appF", 3), ParamOutOfRange);   // odd
  CHECK_THROWS_AS(counterexample("appG", 6), ParamOutOfRange);   // < 8
  CHECK_THROWS_AS(counterexample("appG", 9), ParamOutOfRange);   // odd
  CHECK_THROWS_AS(counterexample("appK1", 1), ParamOutOfRange);
  CHECK_THROWS_AS(counterexample("appN", 2), ParamOutOfRange);
  CHECK_NOTHROW(counterexample("appF", 10));
  CHECK_NOTHROW(counterexample("appG", 12));
}

TEST_CASE("fixture shapes") {
  NamedInstance e1 = counterexample("appE1");
  CHECK(e1.demand.K == 2);
  CHECK(e1.demand.T == 2);
  CHECK(e1.network.num_resources() == 1);
  CHECK(e1.network.capacities[0] == 1);
  CHECK(e1.network.num_products() == 3);
  CHECK(e1.network.is_null(2));

  NamedInstance g = counterexample("appG", 8);
  CHECK(g.demand.K == 3);
  CHECK(g.demand.T == 9);
  // first-stage demand: half the mass on 1, half on T
  const auto& row = g.demand.transition[0][g.demand.initial_prev_demand - 1];
  CHECK(row[0] == doctest::Approx(0.5));
  CHECK(row[g.demand.T - 1] == doctest::Approx(0.5));
  double mid = 0.0;
  for (int p = 1; p + 1 < g.demand.T; ++p) mid += row[p];
  CHECK(mid == doctest::Approx(0.0));

  NamedInstance f = counterexample("appF", 6);
  CHECK(f.demand.K == 6);
  CHECK(f.demand.T == 1);
  CHECK(f.network.capacities[0] == 3);
}

TEST_CASE("network validation catches bad inputs") {
  NamedInstance inst = counterexample("appE1");

  NetworkInstance bad = inst.network;
  bad.capacities[0] = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = inst.network;
  bad.arrivals[0][0][0] = 0.9;  // row no longer sums to 1
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = inst.network;
  bad.products[0].usage[0] = 0;  // non-null product using nothing
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = inst.network;
  bad.products[2].revenue = 1.0;  // null product with revenue
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  // shape mismatch against the demand model
  DemandModel wrong = inst.demand;
  wrong.K = 1;
  wrong.transition.pop_back();
  CHECK_THROWS_AS(inst.network.validate_with(wrong), ValidationError);
}

TEST_CASE("hub-spoke generator") {
  HubSpokeConfig cfg;
  cfg.spoke_count = 3;
  cfg.m = 10.0;
  cfg.K = 5;
  cfg.seed = 42;
  NamedInstance a = generate_hub_spoke(cfg);
  NamedInstance b = generate_hub_spoke(cfg);

  CHECK(a.network.num_resources() == 6);         // one leg each way
  CHECK(a.network.num_products() == 2 * 4 * 3);  // two fares per O-D pair
  CHECK_FALSE(a.network.null_product_index.has_value());
  CHECK(a.demand.K == 5);
  CHECK(a.demand.T == static_cast<int>(std::ceil(1.9 * cfg.m)));
  CHECK_NOTHROW(a.network.validate_with(a.demand));

  // determinism in the seed
  CHECK(a.network.capacities == b.network.capacities);
  CHECK(a.demand.transition == b.demand.transition);
  CHECK(a.network.arrivals == b.network.arrivals);
  cfg.seed = 43;
  NamedInstance c = generate_hub_spoke(cfg);
  CHECK(a.network.arrivals != c.network.arrivals);

  // high fare is kappa times the low fare for the same itinerary
  int n = a.network.num_products();
  for (int j = 0; j + 1 < n; j += 2) {
    CHECK(a.network.products[j + 1].revenue ==
          doctest::Approx(cfg.kappa * a.network.products[j].revenue));
    CHECK(a.network.products[j].usage == a.network.products[j + 1].usage);
  }

  // capacities scale with expected seat usage: c_i = max(1, ceil(xi/beta))
  StageProbabilities probs = derive_probabilities(a.demand);
  for (int i = 0; i < a.network.num_resources(); ++i) {
    double xi = 0.0;
    for (int k = 0; k < a.demand.K; ++k)
      for (int t = 0; t < a.demand.T; ++t)
        for (int j = 0; j < a.network.num_products(); ++j)
          if (!a.network.is_null(j) && a.network.products[j].usage[i])
            xi += probs.tail(k, t) * a.network.arrivals[k][t][j];
    int expect = std::max(1, static_cast<int>(std::ceil(xi / cfg.beta)));
    CHECK(a.network.capacities[i] == expect);
  }
}

TEST_CASE("instance files round trip") {
  NamedInstance inst = counterexample("appK2");
  std::string path = "roundtrip_instance.json";
  save_instance(inst, path);
  NamedInstance back = load_instance(path);
  CHECK(back.name == inst.name);
  CHECK(back.network.capacities == inst.network.capacities);
  CHECK(back.network.arrivals == inst.network.arrivals);
  CHECK(back.network.null_product_index == inst.network.null_product_index);
  REQUIRE(back.network.num_products() == inst.network.num_products());
  for (int j = 0; j < inst.network.num_products(); ++j) {
    CHECK(back.network.products[j].revenue == inst.network.products[j].revenue);
    CHECK(back.network.products[j].usage == inst.network.products[j].usage);
  }
  CHECK(back.demand.transition == inst.demand.transition);
  CHECK(back.demand.initial_prev_demand == inst.demand.initial_prev_demand);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_instance("no_such_file.json"), ParseError);
}

TEST_CASE("demand model files round trip") {
  NamedInstance inst = counterexample("appG", 8);
  std::string path = "roundtrip_model.json";
  save_demand_model(inst.demand, path);
  DemandModel back = load_demand_model(path);
  CHECK(back.K == inst.demand.K);
  CHECK(back.T == inst.demand.T);
  CHECK(back.initial_prev_demand == inst.demand.initial_prev_demand);
  CHECK(back.transition == inst.demand.transition);
  std::remove(path.c_str());
}

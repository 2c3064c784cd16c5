#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rm/demand.hpp"

namespace rm {

struct UnknownName : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Product {
  double revenue = 0.0;
  std::vector<int> usage;  // 0/1 per resource
};

/** Network with capacities, products and per-(stage, period) arrival rates.
 *  arrivals[k][t][j] is the probability a period-(t+1) request in stage k+1
 *  is for product j; each row sums to 1 (a null product absorbs gaps).
 */
struct NetworkInstance {
  std::vector<int> capacities;
  std::vector<Product> products;
  std::vector<std::vector<std::vector<double>>> arrivals;  // K x T x J
  std::optional<int> null_product_index;

  int num_resources() const { return static_cast<int>(capacities.size()); }
  int num_products() const { return static_cast<int>(products.size()); }
  int stages() const { return static_cast<int>(arrivals.size()); }
  int periods() const {
    return arrivals.empty() ? 0 : static_cast<int>(arrivals[0].size());
  }
  bool is_null(int j) const {
    return null_product_index && *null_product_index == j;
  }

  // Max resources consumed by any non-null product.
  int max_usage() const;
  int min_capacity() const;

  void validate() const;
  void validate_with(const DemandModel& model) const;
};

struct HubSpokeConfig {
  int spoke_count = 3;
  double m = 100.0;  // base mean demand per stage
  double cv = 0.3;   // std/mean of the per-stage demand
  double rho = 0.5;  // dependence on the previous stage's demand
  double kappa = 8.0;
  double beta = 1.6;
  int K = 5;
  std::uint64_t seed = 0;
};

struct NamedInstance {
  std::string name;
  NetworkInstance network;
  DemandModel demand;
};

// Airline-style one-hub network with Markov-dependent log-normal demand.
NamedInstance generate_hub_spoke(const HubSpokeConfig& cfg);

/** Registry of small exactly-solvable instances used throughout the tests.
 *  Names: appE1, appE2, appF (param K, even), appG (param C, even >= 8),
 *  appK1 (param alpha >= 2), appK2, appN (param alpha >= 3).
 *  `param` is ignored by fixtures without a parameter.
 */
NamedInstance counterexample(const std::string& name, int param = 0);

}  // namespace rm

#pragma once

#include <cstdint>

#include "rm/demand.hpp"
#include "rm/instance.hpp"

namespace rm {

struct StateSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EnumerationTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DPResult {
  double opt = 0.0;
  long long state_count = 0;
};

/** Exact finite-horizon dynamic program over (stage, period, remaining
 *  capacity vector, previous-stage demand); remaining capacities are packed
 *  into a mixed-radix index.
 */
DPResult solve_dp(const NetworkInstance& net, const DemandModel& model,
                  const StageProbabilities& probs,
                  long long state_cap = 50'000'000);

struct OfflineResult {
  double value = 0.0;
  bool exact = true;
  int n_paths = 0;      // Monte Carlo mode only
  double stderr_ = 0.0; // Monte Carlo mode only
};

// Expectation over all realizations of (demand path, product draws) of the
// hindsight-optimal accepted revenue; full enumeration.
OfflineResult offline_exact(const NetworkInstance& net, const DemandModel& model,
                            long long max_outcomes = 1'000'000);

OfflineResult offline_mc(const NetworkInstance& net, const DemandModel& model,
                         int n_paths, std::uint64_t seed);

// Max revenue of an accept-subset of the given requests (product indices)
// within capacity, by depth-first branch and bound.
double hindsight_optimum(const NetworkInstance& net, const std::vector<int>& requests);

}  // namespace rm

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rm/rng.hpp"

namespace rm {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConditioningOnNull : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Markov-modulated stage demand model.
 *
 *  K selling stages, each with T periods.  The demand of stage k takes
 *  values in {1,...,T} and depends on the previous stage's demand through
 *  a per-stage transition matrix:
 *
 *      transition[k][q-1][p-1] = P{ stage-(k+1) demand = p | previous = q }
 *
 *  (0-based k in code, demand values kept 1-based in the interface).
 *  The demand before the horizon starts is fixed to initial_prev_demand.
 */
struct DemandModel {
  int K = 0;
  int T = 0;
  int initial_prev_demand = 1;  // value in {1..T}
  // K matrices, each T x T, row-stochastic.
  std::vector<std::vector<std::vector<double>>> transition;

  void validate() const;
};

/** All probability tables derived from a DemandModel.
 *
 *  Index convention: k in [0,K), t in [0,T), q/p in [0,T) where index d-1
 *  stands for demand value d.
 *
 *    w[k][t][q]        P{ D^{k+1} >= t+1, D^k = q+1 }
 *    survival[k][t][q] P{ D^{k+1} >= t+2 | D^{k+1} >= t+1, D^k = q+1 },
 *                      zero when the conditioning event is null; always
 *                      zero at t = T-1.
 *    marginal[k][p]    P{ D^{k+1} = p+1 }
 *    prev_marginal[k][q] = P{ D^k = q+1 } with D^0 the fixed initial value.
 */
struct StageProbabilities {
  std::vector<std::vector<std::vector<double>>> w;
  std::vector<std::vector<std::vector<double>>> survival;
  std::vector<std::vector<double>> marginal;
  std::vector<std::vector<double>> prev_marginal;

  // P{ D^{k+1} >= t+1 } (marginal over the previous demand).
  double tail(int k, int t) const;
};

StageProbabilities derive_probabilities(const DemandModel& model);

// Smallest transition entry over all stages and cells (the full-support
// margin; zero when any entry is zero).
double min_transition_mass(const DemandModel& model);

/** Joint stage/previous-demand probabilities conditioned on the stage-k
 *  previous demand:
 *
 *    table[l][s][p] = P{ D^{l+1} >= s+1, D^l = p+1 | D^k = q+1 }
 *
 *  for l in [0,k).  Throws ConditioningOnNull when P{ D^k = q+1 } = 0.
 *  k and q are 0-based (k=0 refers to the first stage; the table is empty).
 */
std::vector<std::vector<std::vector<double>>> conditional_joint(
    const DemandModel& model, const StageProbabilities& probs, int k, int q);

// Draw one demand path (K values in {1..T}); consumes one uniform per stage.
std::vector<int> sample_path(const DemandModel& model, RandomStream& stream);

/** Build a model whose total demand over K stages matches a target pmf on
 *  {K, ..., K*T}.  Stage demands follow a cascade: stage k draws fresh only
 *  when the previous stage hit T, otherwise it is 1.  Rows of the result
 *  that can never be reached are point masses at demand 1.
 */
DemandModel calibrate_total_demand(int K, int T, const std::vector<double>& pmf);

// Exact pmf of D^1 + ... + D^K on {K..K*T} by forward convolution.
std::vector<double> total_demand_pmf(const DemandModel& model);

}  // namespace rm

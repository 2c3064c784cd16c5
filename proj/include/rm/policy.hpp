#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rm/demand.hpp"
#include "rm/fluid.hpp"
#include "rm/instance.hpp"

namespace rm {

struct GammaOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EpsilonZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Randomized admission rule: accept a period-(t+1) request for product j in
 *  stage k+1 with probability p[k][t][q][j], where q+1 is the previous
 *  stage's demand.
 */
struct AdmissionPolicy {
  std::string tag;
  double gamma = 1.0;
  std::vector<std::vector<std::vector<std::vector<double>>>> p;  // K x T x T x J

  double prob(int k, int t, int q, int j) const { return p[k][t][q][j]; }
};

AdmissionPolicy prf_policy(const FluidSolution& fluid, const NetworkInstance& net,
                           double gamma);
AdmissionPolicy indep_policy(const FluidSolution& fluid, const NetworkInstance& net,
                             const StageProbabilities& probs, double gamma);
AdmissionPolicy exf_policy(const ExfSolution& exf, const NetworkInstance& net,
                           const DemandModel& model, const StageProbabilities& probs,
                           double gamma);

enum class GammaRegime { Asymptotic, ConstantFactor };

// Theoretical tuning parameter: the large-capacity rate choice (needs full
// support and c_min >= 2) or the 1/(2L) constant-factor choice.
double recommended_gamma(const NetworkInstance& net, const DemandModel& model,
                         const StageProbabilities& probs, GammaRegime regime);

struct SimConfig {
  int n_paths = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  bool record_paths = false;
};

struct PathRecord {
  std::vector<int> demands;   // realized demand per stage
  std::vector<int> requests;  // product drawn per realized period
  double revenue = 0.0;
};

struct SimStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> per_path;
  std::vector<long long> accept_counts;  // per product
  std::vector<PathRecord> paths;         // only when record_paths
};

/** Monte Carlo evaluation with common random numbers: each path uses
 *  counter-based substreams keyed by (seed, path, draw kind, stage, period),
 *  so different policies under one config face identical requests and
 *  survival outcomes, and results do not depend on the thread count.
 */
SimStats simulate(const NetworkInstance& net, const DemandModel& model,
                  const StageProbabilities& probs, const AdmissionPolicy& policy,
                  const SimConfig& cfg);

}  // namespace rm

#pragma once

#include "rm/demand.hpp"
#include "rm/instance.hpp"
#include "rm/lp.hpp"

namespace rm {

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooManyProducts : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BoundKind {
  PRF_reduced,
  PRF_full,
  EXF,
  INDEP,
  NAIVE_CUMULATIVE,
  NAIVE_UNWEIGHTED,
  LAGRANGIAN_DUAL,
  LINEAR_VFA,
  ASSORTMENT,
};

std::string bound_kind_name(BoundKind kind);

enum class PrfForm { Reduced, Full };
enum class NaiveVariant { Cumulative, Unweighted };

/** Rectangular map from (k,t,q,j) to LP columns; -1 marks variables of
 *  unreachable (k,q) blocks, which are not part of the LP.
 */
struct PrfIndexMap {
  int K = 0, T = 0, J = 0;
  std::vector<int> col;

  int operator()(int k, int t, int q, int j) const {
    return col[((static_cast<size_t>(k) * T + t) * T + q) * J + j];
  }
  int& at(int k, int t, int q, int j) {
    return col[((static_cast<size_t>(k) * T + t) * T + q) * J + j];
  }
};

struct PrfLP {
  BoundedLP lp;
  PrfIndexMap map;
};

/** Stage/previous-demand conditioned acceptance rates extracted from the
 *  fluid LP; xbar[k][t][q][j] in [0, lambda[k][t][j]].
 */
struct FluidSolution {
  BoundKind kind = BoundKind::PRF_reduced;
  double bound = 0.0;
  std::vector<std::vector<std::vector<std::vector<double>>>> xbar;
};

struct ExfSolution {
  double bound = 0.0;
  std::vector<double> wbar;  // accepted mass per product
};

PrfLP build_prf(const NetworkInstance& net, const DemandModel& model,
                const StageProbabilities& probs, PrfForm form);
FluidSolution prf_solution(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs);

BoundedLP build_exf(const NetworkInstance& net, const DemandModel& model,
                    const StageProbabilities& probs);
ExfSolution exf_solution(const NetworkInstance& net, const DemandModel& model,
                         const StageProbabilities& probs);

// True when every transition matrix has identical rows (tolerance 1e-12).
bool is_independent(const DemandModel& model);

BoundedLP build_indep(const NetworkInstance& net, const DemandModel& model,
                      const StageProbabilities& probs);
BoundedLP build_naive(const NetworkInstance& net, const DemandModel& model,
                      const StageProbabilities& probs, NaiveVariant variant);

BoundedLP build_lagrangian(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs);
BoundedLP build_linear_vfa(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs);

struct MNLChoiceModel {
  std::vector<double> v;  // preference weight per product (null ignored)
};

BoundedLP build_assortment(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs,
                           const MNLChoiceModel& choice);

}  // namespace rm

#include "rm/demand.hpp"

#include <cmath>
#include <numeric>

namespace rm {

namespace {
constexpr double kRowTol = 1e-12;
}

void DemandModel::validate() const {
  if (K < 1) throw ValidationError("demand model: K must be >= 1");
  if (T < 1) throw ValidationError("demand model: T must be >= 1");
  if (initial_prev_demand < 1 || initial_prev_demand > T)
    throw ValidationError("demand model: initial_prev_demand out of {1..T}");
  if (static_cast<int>(transition.size()) != K)
    throw ValidationError("demand model: expected K transition matrices");
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(transition[k].size()) != T)
      throw ValidationError("demand model: matrix " + std::to_string(k + 1) +
                            " must have T rows");
    for (int q = 0; q < T; ++q) {
      const auto& row = transition[k][q];
      if (static_cast<int>(row.size()) != T)
        throw ValidationError("demand model: matrix " + std::to_string(k + 1) +
                              " row " + std::to_string(q + 1) +
                              " must have T entries");
      double sum = 0.0;
      for (double v : row) {
        if (!(v >= 0.0) || v > 1.0 + kRowTol)
          throw ValidationError("demand model: transition entry out of [0,1]");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > kRowTol)
        throw ValidationError("demand model: matrix " + std::to_string(k + 1) +
                              " row " + std::to_string(q + 1) +
                              " does not sum to 1");
    }
  }
}

double StageProbabilities::tail(int k, int t) const {
  double s = 0.0;
  for (double v : w[k][t]) s += v;
  return s;
}

StageProbabilities derive_probabilities(const DemandModel& model) {
  model.validate();
  const int K = model.K, T = model.T;
  StageProbabilities out;
  out.w.assign(K, std::vector<std::vector<double>>(T, std::vector<double>(T, 0.0)));
  out.survival = out.w;
  out.marginal.assign(K, std::vector<double>(T, 0.0));
  out.prev_marginal.assign(K, std::vector<double>(T, 0.0));

  // Row-level survival ratios: P{D >= t+2 | D >= t+1, prev = q+1}; we zero
  // them later wherever the joint conditioning event has no mass.
  auto row_survival = [&](int k, int q, int t) {
    double st = 0.0, st1 = 0.0;
    for (int p = t; p < T; ++p) st += model.transition[k][q][p];
    for (int p = t + 1; p < T; ++p) st1 += model.transition[k][q][p];
    return st > 0.0 ? st1 / st : 0.0;
  };

  for (int k = 0; k < K; ++k) {
    // P{D^k = q+1}: point mass for the fixed initial value, otherwise the
    // first-period joint mass of the previous stage block.
    if (k == 0) {
      out.prev_marginal[0][model.initial_prev_demand - 1] = 1.0;
      out.w[0][0][model.initial_prev_demand - 1] = 1.0;
    } else {
      for (int q = 0; q < T; ++q) {
        double mass = 0.0;
        // Stage k-1 stops exactly at demand q+1 with previous demand p+1.
        for (int p = 0; p < T; ++p)
          mass += (1.0 - out.survival[k - 1][q][p]) * out.w[k - 1][q][p];
        out.prev_marginal[k][q] = mass;
        out.w[k][0][q] = mass;
      }
    }
    for (int t = 0; t < T; ++t) {
      for (int q = 0; q < T; ++q) {
        double theta = (t + 1 < T && out.w[k][t][q] > 0.0)
                           ? row_survival(k, q, t)
                           : 0.0;
        out.survival[k][t][q] = theta;
        if (t + 1 < T) out.w[k][t + 1][q] = theta * out.w[k][t][q];
      }
    }
    for (int p = 0; p < T; ++p) {
      double m = 0.0;
      for (int q = 0; q < T; ++q)
        m += out.prev_marginal[k][q] * model.transition[k][q][p];
      out.marginal[k][p] = m;
    }
  }
  return out;
}

double min_transition_mass(const DemandModel& model) {
  double eps = 1.0;
  for (const auto& mat : model.transition)
    for (const auto& row : mat)
      for (double v : row) eps = std::min(eps, v);
  return eps;
}

std::vector<std::vector<std::vector<double>>> conditional_joint(
    const DemandModel& model, const StageProbabilities& probs, int k, int q) {
  const int T = model.T;
  if (k < 0 || k >= model.K || q < 0 || q >= T)
    throw ValidationError("conditional_joint: index out of range");
  double denom = probs.prev_marginal[k][q];
  if (denom <= 0.0)
    throw ConditioningOnNull("conditional_joint: P{D^" + std::to_string(k) +
                             " = " + std::to_string(q + 1) + "} = 0");

  std::vector<std::vector<std::vector<double>>> table(
      k, std::vector<std::vector<double>>(T, std::vector<double>(T, 0.0)));

  // back[l][d] = P{ D^k = q+1 | D^{l+1} = d+1 }-numerator propagated
  // backwards: start at stage k (D^k itself) and fold transition matrices.
  // back[l][d] here is P{ D^k = q+1 | D^{l+1} = d+1 }.
  std::vector<std::vector<double>> back(k, std::vector<double>(T, 0.0));
  if (k >= 1) {
    for (int d = 0; d < T; ++d) back[k - 1][d] = (d == q) ? 1.0 : 0.0;
    for (int l = k - 2; l >= 0; --l)
      for (int d = 0; d < T; ++d) {
        double s = 0.0;
        for (int e = 0; e < T; ++e)
          s += model.transition[l + 1][d][e] * back[l + 1][e];
        back[l][d] = s;
      }
  }

  for (int l = 0; l < k; ++l) {
    // joint[p][d] = P{ D^l = p+1, D^{l+1} = d+1 }
    for (int p = 0; p < T; ++p) {
      double pprev = probs.prev_marginal[l][p];
      if (pprev <= 0.0) continue;
      std::vector<double> joint(T);
      for (int d = 0; d < T; ++d)
        joint[d] = pprev * model.transition[l][p][d] * back[l][d];
      // tail sums over the stage-(l+1) demand value
      double tail = 0.0;
      for (int s = T - 1; s >= 0; --s) {
        tail += joint[s];
        table[l][s][p] = tail / denom;
      }
    }
  }
  return table;
}

std::vector<int> sample_path(const DemandModel& model, RandomStream& stream) {
  std::vector<int> path(model.K);
  int prev = model.initial_prev_demand - 1;
  for (int k = 0; k < model.K; ++k) {
    double u = stream.next();
    double acc = 0.0;
    int d = model.T - 1;
    for (int p = 0; p < model.T; ++p) {
      acc += model.transition[k][prev][p];
      if (u < acc) {
        d = p;
        break;
      }
    }
    path[k] = d + 1;
    prev = d;
  }
  return path;
}

DemandModel calibrate_total_demand(int K, int T, const std::vector<double>& pmf) {
  if (K < 1 || T < 1) throw InvalidTarget("calibrate: K and T must be >= 1");
  const int support = K * (T - 1) + 1;
  if (static_cast<int>(pmf.size()) != support)
    throw InvalidTarget("calibrate: pmf must have K*(T-1)+1 entries (values K..K*T)");
  double sum = 0.0;
  for (double v : pmf) {
    if (!(v >= 0.0)) throw InvalidTarget("calibrate: pmf entries must be >= 0");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw InvalidTarget("calibrate: pmf must sum to 1");

  DemandModel model;
  model.K = K;
  model.T = T;
  model.initial_prev_demand = T;
  model.transition.assign(
      K, std::vector<std::vector<double>>(T, std::vector<double>(T, 0.0)));
  // Every row defaults to a point mass at demand 1; only the row reached
  // after a full previous stage (previous demand = T) draws fresh demand.
  for (int k = 0; k < K; ++k)
    for (int q = 0; q < T; ++q) model.transition[k][q][0] = 1.0;

  if (T == 1) return model;  // total demand is identically K

  // pmf[i] corresponds to total demand K + i.
  // Stage k (1-based) conditions on total >= (k-1)(T-1) + K, i.e. all
  // previous stages maxed out.
  auto total_tail = [&](int from_index) {
    double s = 0.0;
    for (int i = from_index; i < support; ++i) s += pmf[i];
    return s;
  };
  for (int k = 1; k <= K; ++k) {
    const int base = (k - 1) * (T - 1);  // index of total = (k-1)(T-1)+K
    double denom = total_tail(base);
    auto& row = model.transition[k - 1][T - 1];
    if (denom <= 0.0) {
      // Unreachable conditioning event: keep the point mass at 1.
      row.assign(T, 0.0);
      row[0] = 1.0;
      continue;
    }
    row.assign(T, 0.0);
    for (int l = 1; l <= T - 1; ++l) row[l - 1] = pmf[base + l - 1] / denom;
    row[T - 1] = total_tail(base + T - 1) / denom;
  }
  return model;
}

std::vector<double> total_demand_pmf(const DemandModel& model) {
  model.validate();
  const int K = model.K, T = model.T;
  // dist[q][s]: P{ D^k = q+1, D^1+...+D^k = s } with s offset by k (min k).
  std::vector<std::vector<double>> dist(
      T, std::vector<double>(K * (T - 1) + 1, 0.0));
  int prev = model.initial_prev_demand - 1;
  for (int d = 0; d < T; ++d) dist[d][d] = model.transition[0][prev][d];
  for (int k = 1; k < K; ++k) {
    std::vector<std::vector<double>> next(
        T, std::vector<double>(K * (T - 1) + 1, 0.0));
    for (int q = 0; q < T; ++q)
      for (int s = 0; s <= k * (T - 1); ++s) {
        double mass = dist[q][s];
        if (mass <= 0.0) continue;
        for (int d = 0; d < T; ++d)
          next[d][s + d] += mass * model.transition[k][q][d];
      }
    dist.swap(next);
  }
  std::vector<double> pmf(K * (T - 1) + 1, 0.0);
  for (int q = 0; q < T; ++q)
    for (int s = 0; s <= K * (T - 1); ++s) pmf[s] += dist[q][s];
  return pmf;
}

}  // namespace rm

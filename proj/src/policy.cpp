#include "rm/policy.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace rm {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw GammaOutOfRange("policy: gamma must lie in [0,1]");
}

std::vector<std::vector<std::vector<std::vector<double>>>> zero_table(
    const NetworkInstance& net) {
  return std::vector<std::vector<std::vector<std::vector<double>>>>(
      net.stages(),
      std::vector<std::vector<std::vector<double>>>(
          net.periods(), std::vector<std::vector<double>>(
                             net.periods(),
                             std::vector<double>(net.num_products(), 0.0))));
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

AdmissionPolicy prf_policy(const FluidSolution& fluid, const NetworkInstance& net,
                           double gamma) {
  check_gamma(gamma);
  AdmissionPolicy pol;
  pol.tag = "PRF";
  pol.gamma = gamma;
  pol.p = zero_table(net);
  for (int k = 0; k < net.stages(); ++k)
    for (int t = 0; t < net.periods(); ++t)
      for (int q = 0; q < net.periods(); ++q)
        for (int j = 0; j < net.num_products(); ++j) {
          double lam = net.arrivals[k][t][j];
          if (lam <= 0.0) continue;
          pol.p[k][t][q][j] = clamp01(gamma * fluid.xbar[k][t][q][j] / lam);
        }
  return pol;
}

AdmissionPolicy indep_policy(const FluidSolution& fluid, const NetworkInstance& net,
                             const StageProbabilities& probs, double gamma) {
  check_gamma(gamma);
  AdmissionPolicy pol;
  pol.tag = "INDEP";
  pol.gamma = gamma;
  pol.p = zero_table(net);
  for (int k = 0; k < net.stages(); ++k)
    for (int t = 0; t < net.periods(); ++t)
      for (int j = 0; j < net.num_products(); ++j) {
        double lam = net.arrivals[k][t][j];
        if (lam <= 0.0) continue;
        double avg = 0.0;
        for (int q = 0; q < net.periods(); ++q)
          avg += probs.prev_marginal[k][q] * fluid.xbar[k][t][q][j];
        double p = clamp01(gamma * avg / lam);
        for (int q = 0; q < net.periods(); ++q) pol.p[k][t][q][j] = p;
      }
  return pol;
}

AdmissionPolicy exf_policy(const ExfSolution& exf, const NetworkInstance& net,
                           const DemandModel& model, const StageProbabilities& probs,
                           double gamma) {
  check_gamma(gamma);
  AdmissionPolicy pol;
  pol.tag = "EXF";
  pol.gamma = gamma;
  pol.p = zero_table(net);
  for (int j = 0; j < net.num_products(); ++j) {
    double denom = 0.0;
    for (int k = 0; k < model.K; ++k)
      for (int t = 0; t < model.T; ++t)
        denom += probs.tail(k, t) * net.arrivals[k][t][j];
    double ratio;
    if (denom <= 0.0) {
      if (exf.wbar[j] > 1e-9)
        throw DegenerateDenominator("exf policy: product " + std::to_string(j) +
                                    " has zero expected demand but positive w");
      ratio = 0.0;
    } else {
      ratio = clamp01(gamma * exf.wbar[j] / denom);
    }
    for (int k = 0; k < net.stages(); ++k)
      for (int t = 0; t < net.periods(); ++t)
        for (int q = 0; q < net.periods(); ++q)
          if (net.arrivals[k][t][j] > 0.0) pol.p[k][t][q][j] = ratio;
  }
  return pol;
}

double recommended_gamma(const NetworkInstance& net, const DemandModel& model,
                         const StageProbabilities& probs, GammaRegime regime) {
  (void)probs;
  if (regime == GammaRegime::ConstantFactor) {
    int L = net.max_usage();
    if (L < 1) throw DegenerateDenominator("recommended_gamma: no real products");
    return 1.0 / (2.0 * L);
  }
  double eps = min_transition_mass(model);
  if (eps <= 0.0)
    throw EpsilonZero("recommended_gamma: demand model lacks full support");
  double cmin = net.min_capacity();
  if (cmin < 2.0)
    throw EpsilonZero("recommended_gamma: asymptotic rate needs c_min >= 2");
  double delta = 1.0 / std::pow(eps, 6);
  double g = 1.0 - std::sqrt(4.0 * (cmin + 3.0 * delta * (model.K - 1)) *
                             std::log(cmin)) /
                       cmin;
  return clamp01(g);
}

namespace {

double run_path(const NetworkInstance& net, const DemandModel& model,
                const StageProbabilities& probs, const AdmissionPolicy& policy,
                std::uint64_t seed, long long path, std::vector<long long>& accepts,
                PathRecord* rec) {
  std::vector<int> cap = net.capacities;
  double revenue = 0.0;
  int qprev = model.initial_prev_demand - 1;
  for (int k = 0; k < model.K; ++k) {
    int demand = model.T;  // stage demand resolved by survival draws
    for (int t = 0; t < model.T; ++t) {
      // Table line [5]: which product requests service this period.
      double u = keyed_draw(seed, path, DrawKind::Product, k, t);
      double acc = 0.0;
      int j = net.num_products() - 1;
      for (int jj = 0; jj < net.num_products(); ++jj) {
        acc += net.arrivals[k][t][jj];
        if (u < acc) {
          j = jj;
          break;
        }
      }
      if (rec) rec->requests.push_back(j);
      // Line [6]: policy coin; line [7]: capacity check.
      double a = keyed_draw(seed, path, DrawKind::Accept, k, t);
      if (a < policy.prob(k, t, qprev, j)) {
        bool fits = true;
        for (int i = 0; i < net.num_resources(); ++i)
          if (net.products[j].usage[i] && cap[i] == 0) fits = false;
        if (fits) {
          for (int i = 0; i < net.num_resources(); ++i)
            if (net.products[j].usage[i]) --cap[i];
          revenue += net.products[j].revenue;
          ++accepts[j];
          for (int c : cap) {
            if (c < 0) throw std::logic_error("simulate: negative capacity");
          }
        }
      }
      // Line [11]: does the stage survive into the next period?
      double e = keyed_draw(seed, path, DrawKind::Survival, k, t);
      if (e >= probs.survival[k][t][qprev]) {
        demand = t + 1;  // line [15]
        break;
      }
    }
    if (rec) rec->demands.push_back(demand);
    qprev = demand - 1;
  }
  if (rec) rec->revenue = revenue;
  return revenue;
}

}  // namespace

SimStats simulate(const NetworkInstance& net, const DemandModel& model,
                  const StageProbabilities& probs, const AdmissionPolicy& policy,
                  const SimConfig& cfg) {
  net.validate_with(model);
  if (cfg.n_paths < 1) throw ValidationError("simulate: n_paths must be >= 1");
  SimStats stats;
  stats.per_path.assign(cfg.n_paths, 0.0);
  if (cfg.record_paths) stats.paths.assign(cfg.n_paths, {});

  const int workers = std::max(1, cfg.threads);
  std::vector<std::vector<long long>> accepts(
      workers, std::vector<long long>(net.num_products(), 0));
  auto work = [&](int w) {
    for (long long i = w; i < cfg.n_paths; i += workers)
      stats.per_path[i] = run_path(net, model, probs, policy, cfg.seed, i,
                                   accepts[w],
                                   cfg.record_paths ? &stats.paths[i] : nullptr);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  stats.accept_counts.assign(net.num_products(), 0);
  for (const auto& a : accepts)
    for (int j = 0; j < net.num_products(); ++j) stats.accept_counts[j] += a[j];
  double sum = 0.0, sumsq = 0.0;
  for (double v : stats.per_path) {
    sum += v;
    sumsq += v * v;
  }
  stats.mean = sum / cfg.n_paths;
  double var = cfg.n_paths > 1
                   ? std::max(0.0, (sumsq - sum * sum / cfg.n_paths) / (cfg.n_paths - 1))
                   : 0.0;
  stats.stderr_ = std::sqrt(var / cfg.n_paths);
  return stats;
}

}  // namespace rm

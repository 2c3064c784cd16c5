#include "rm/exact.hpp"

#include <algorithm>
#include <cmath>

namespace rm {

DPResult solve_dp(const NetworkInstance& net, const DemandModel& model,
                  const StageProbabilities& probs, long long state_cap) {
  net.validate_with(model);
  const int K = model.K, T = model.T, J = net.num_products();
  const int I = net.num_resources();

  long long Y = 1;
  for (int c : net.capacities) {
    Y *= c + 1;
    if (Y > state_cap) break;
  }
  long long states = static_cast<long long>(K) * T * T * Y;
  if (Y > state_cap || states > state_cap)
    throw StateSpaceTooLarge("dp: state count " + std::to_string(states) +
                             " exceeds cap " + std::to_string(state_cap));

  // Mixed-radix packing of the remaining-capacity vector.
  std::vector<long long> stride(I);
  long long s = 1;
  for (int i = 0; i < I; ++i) {
    stride[i] = s;
    s *= net.capacities[i] + 1;
  }
  struct ProductUse {
    long long delta = 0;             // index decrement when accepted
    std::vector<int> used;           // resources consumed
  };
  std::vector<ProductUse> use(J);
  for (int j = 0; j < J; ++j)
    for (int i = 0; i < I; ++i)
      if (net.products[j].usage[i]) {
        use[j].delta += stride[i];
        use[j].used.push_back(i);
      }
  auto feasible = [&](long long y, int j) {
    for (int i : use[j].used)
      if ((y / stride[i]) % (net.capacities[i] + 1) == 0) return false;
    return true;
  };

  // next_stage[y*T + d] = value of starting stage k+2 with previous demand
  // d+1 and capacity index y; zero beyond the horizon.
  std::vector<double> next_stage(static_cast<size_t>(Y) * T, 0.0);
  std::vector<double> next_t, cur(static_cast<size_t>(Y) * T, 0.0);
  for (int k = K - 1; k >= 0; --k) {
    next_t.assign(static_cast<size_t>(Y) * T, 0.0);
    for (int t = T - 1; t >= 0; --t) {
      for (long long y = 0; y < Y; ++y) {
        for (int q = 0; q < T; ++q) {
          double th = probs.survival[k][t][q];
          auto cont = [&](long long z) {
            double v = (1.0 - th) * next_stage[static_cast<size_t>(z) * T + t];
            if (t + 1 < T && th > 0.0)
              v += th * next_t[static_cast<size_t>(z) * T + q];
            return v;
          };
          double keep = cont(y);
          double val = 0.0;
          for (int j = 0; j < J; ++j) {
            double lam = net.arrivals[k][t][j];
            if (lam <= 0.0) continue;
            double best = keep;
            if (use[j].delta == 0) {
              best = std::max(best, net.products[j].revenue + keep);
            } else if (feasible(y, j)) {
              best = std::max(best,
                              net.products[j].revenue + cont(y - use[j].delta));
            }
            val += lam * best;
          }
          cur[static_cast<size_t>(y) * T + q] = val;
        }
      }
      std::swap(next_t, cur);
    }
    next_stage = next_t;  // values at the first period of stage k+1
  }

  DPResult out;
  out.state_count = states;
  out.opt = next_stage[static_cast<size_t>(Y - 1) * T + (model.initial_prev_demand - 1)];
  return out;
}

namespace {

struct Knapsack {
  const NetworkInstance& net;
  std::vector<int> items;  // request product indices, revenue-descending
  std::vector<double> suffix_rev;
  double best = 0.0;

  explicit Knapsack(const NetworkInstance& n, const std::vector<int>& requests)
      : net(n) {
    for (int j : requests)
      if (!net.is_null(j) && net.products[j].revenue > 0.0) items.push_back(j);
    std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
      return net.products[a].revenue > net.products[b].revenue;
    });
    suffix_rev.assign(items.size() + 1, 0.0);
    for (int i = static_cast<int>(items.size()) - 1; i >= 0; --i)
      suffix_rev[i] = suffix_rev[i + 1] + net.products[items[i]].revenue;
  }

  // Optimistic completion: for each resource, relax all other resources and
  // take the highest-revenue remaining requests it can carry; the tightest
  // resource gives the bound.
  double bound(size_t idx, const std::vector<int>& cap) const {
    double b = suffix_rev[idx];
    for (int i = 0; i < net.num_resources(); ++i) {
      double with_i = 0.0;
      int room = cap[i];
      for (size_t r = idx; r < items.size(); ++r) {
        if (net.products[items[r]].usage[i]) {
          if (room == 0) continue;
          --room;
        }
        with_i += net.products[items[r]].revenue;
      }
      b = std::min(b, with_i);
    }
    return b;
  }

  void dfs(size_t idx, double rev, std::vector<int>& cap) {
    best = std::max(best, rev);
    if (idx >= items.size()) return;
    if (rev + bound(idx, cap) <= best + 1e-12) return;
    int j = items[idx];
    bool fits = true;
    for (int i = 0; i < net.num_resources(); ++i)
      if (net.products[j].usage[i] && cap[i] == 0) fits = false;
    if (fits) {
      for (int i = 0; i < net.num_resources(); ++i)
        if (net.products[j].usage[i]) --cap[i];
      dfs(idx + 1, rev + net.products[j].revenue, cap);
      for (int i = 0; i < net.num_resources(); ++i)
        if (net.products[j].usage[i]) ++cap[i];
    }
    dfs(idx + 1, rev, cap);
  }
};

}  // namespace

double hindsight_optimum(const NetworkInstance& net, const std::vector<int>& requests) {
  Knapsack ks(net, requests);
  std::vector<int> cap = net.capacities;
  ks.dfs(0, 0.0, cap);
  return ks.best;
}

namespace {

struct Enumerator {
  const NetworkInstance& net;
  const DemandModel& model;
  long long max_outcomes;
  long long leaves = 0;
  double total = 0.0;
  std::vector<int> requests;

  void run() { stage(0, model.initial_prev_demand - 1, 1.0); }

  void stage(int k, int qprev, double prob) {
    if (k == model.K) {
      if (++leaves > max_outcomes)
        throw EnumerationTooLarge("offline: more than " +
                                  std::to_string(max_outcomes) + " outcomes");
      total += prob * hindsight_optimum(net, requests);
      return;
    }
    for (int d = 0; d < model.T; ++d) {
      double pd = model.transition[k][qprev][d];
      if (pd <= 0.0) continue;
      period(k, d, 0, d + 1, prob * pd);
    }
  }

  void period(int k, int d, int t, int demand, double prob) {
    if (t == demand) {
      stage(k + 1, d, prob);
      return;
    }
    for (int j = 0; j < net.num_products(); ++j) {
      double lam = net.arrivals[k][t][j];
      if (lam <= 0.0) continue;
      requests.push_back(j);
      period(k, d, t + 1, demand, prob * lam);
      requests.pop_back();
    }
  }
};

}  // namespace

OfflineResult offline_exact(const NetworkInstance& net, const DemandModel& model,
                            long long max_outcomes) {
  net.validate_with(model);
  Enumerator e{net, model, max_outcomes};
  e.run();
  return {e.total, true, 0, 0.0};
}

OfflineResult offline_mc(const NetworkInstance& net, const DemandModel& model,
                         int n_paths, std::uint64_t seed) {
  net.validate_with(model);
  if (n_paths < 1) throw ValidationError("offline_mc: n_paths must be >= 1");
  double sum = 0.0, sumsq = 0.0;
  std::vector<int> requests;
  for (int path = 0; path < n_paths; ++path) {
    RandomStream stream(seed, 0x0FF1 + static_cast<std::uint64_t>(path));
    std::vector<int> demands = sample_path(model, stream);
    requests.clear();
    for (int k = 0; k < model.K; ++k)
      for (int t = 0; t < demands[k]; ++t) {
        double u = stream.next();
        double acc = 0.0;
        int pick = net.num_products() - 1;
        for (int j = 0; j < net.num_products(); ++j) {
          acc += net.arrivals[k][t][j];
          if (u < acc) {
            pick = j;
            break;
          }
        }
        requests.push_back(pick);
      }
    double v = hindsight_optimum(net, requests);
    sum += v;
    sumsq += v * v;
  }
  OfflineResult out;
  out.exact = false;
  out.n_paths = n_paths;
  out.value = sum / n_paths;
  double var = std::max(0.0, (sumsq - sum * sum / n_paths) / std::max(1, n_paths - 1));
  out.stderr_ = std::sqrt(var / n_paths);
  return out;
}

}  // namespace rm

#include "rm/instance.hpp"

#include <cmath>

namespace rm {

namespace {
constexpr double kRowTol = 1e-12;

// Standard normal CDF.
double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
}  // namespace

int NetworkInstance::max_usage() const {
  int L = 0;
  for (int j = 0; j < num_products(); ++j) {
    if (is_null(j)) continue;
    int s = 0;
    for (int u : products[j].usage) s += u;
    L = std::max(L, s);
  }
  return L;
}

int NetworkInstance::min_capacity() const {
  int c = capacities.empty() ? 0 : capacities[0];
  for (int v : capacities) c = std::min(c, v);
  return c;
}

void NetworkInstance::validate() const {
  if (capacities.empty()) throw ValidationError("instance: no resources");
  for (int c : capacities)
    if (c < 1) throw ValidationError("instance: capacities must be >= 1");
  if (products.empty()) throw ValidationError("instance: no products");
  const int I = num_resources(), J = num_products();
  for (int j = 0; j < J; ++j) {
    const Product& p = products[j];
    if (!(p.revenue >= 0.0))
      throw ValidationError("instance: revenue must be >= 0");
    if (static_cast<int>(p.usage.size()) != I)
      throw ValidationError("instance: usage vector size mismatch");
    int used = 0;
    for (int u : p.usage) {
      if (u != 0 && u != 1)
        throw ValidationError("instance: usage entries must be 0/1");
      used += u;
    }
    if (is_null(j)) {
      if (used != 0 || p.revenue != 0.0)
        throw ValidationError("instance: null product must have f=0 and a=0");
    } else if (used == 0) {
      throw ValidationError("instance: non-null product uses no resources");
    }
  }
  if (null_product_index && (*null_product_index < 0 || *null_product_index >= J))
    throw ValidationError("instance: null_product_index out of range");
  if (arrivals.empty()) throw ValidationError("instance: no arrival table");
  const size_t T = arrivals[0].size();
  for (const auto& stage : arrivals) {
    if (stage.size() != T)
      throw ValidationError("instance: ragged arrival table");
    for (const auto& row : stage) {
      if (row.size() != static_cast<size_t>(J))
        throw ValidationError("instance: arrival row size mismatch");
      double sum = 0.0;
      for (double v : row) {
        if (!(v >= 0.0) || v > 1.0 + kRowTol)
          throw ValidationError("instance: arrival rate out of [0,1]");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > kRowTol)
        throw ValidationError("instance: arrival row does not sum to 1");
    }
  }
}

void NetworkInstance::validate_with(const DemandModel& model) const {
  validate();
  model.validate();
  if (stages() != model.K || periods() != model.T)
    throw ValidationError("instance: (K,T) disagree with demand model");
}

NamedInstance generate_hub_spoke(const HubSpokeConfig& cfg) {
  if (cfg.spoke_count < 1) throw ParamOutOfRange("hub-spoke: spoke_count >= 1");
  if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw ParamOutOfRange("hub-spoke: rho in [0,1)");
  if (!(cfg.m >= 2.0)) throw ParamOutOfRange("hub-spoke: m >= 2");
  if (!(cfg.beta > 0.0)) throw ParamOutOfRange("hub-spoke: beta > 0");
  if (cfg.K < 1) throw ParamOutOfRange("hub-spoke: K >= 1");

  RandomStream rng(cfg.seed, /*substream=*/0x5b5b);
  const int S = cfg.spoke_count;
  const int K = cfg.K;
  const int T = static_cast<int>(std::ceil(1.9 * cfg.m));

  // Locations: index 0 is the hub at the center of a 100x100 square.
  std::vector<std::pair<double, double>> loc(S + 1);
  loc[0] = {50.0, 50.0};
  for (int s = 1; s <= S; ++s) {
    double x = 100.0 * rng.next();
    double y = 100.0 * rng.next();
    loc[s] = {x, y};
  }

  NetworkInstance net;
  // Legs: resource 2(s-1) flies spoke s -> hub, 2(s-1)+1 flies hub -> spoke s.
  net.capacities.assign(2 * S, 1);

  struct Pair {
    int from, to;
    double zeta;
    int tau;
  };
  std::vector<Pair> pairs;
  for (int f = 0; f <= S; ++f)
    for (int g = 0; g <= S; ++g) {
      if (f == g) continue;
      pairs.push_back({f, g, 0.0, 0});
    }
  const int KT = K * T;
  const int tau_lo = (KT + 1) / 2;          // ceil(KT/2)
  const int tau_hi = (2 * KT + 2) / 3;      // ceil(2KT/3)
  double zeta_sum = 0.0;
  for (auto& pr : pairs) {
    pr.zeta = rng.next();
    pr.tau = tau_lo + static_cast<int>(rng.next_below(tau_hi - tau_lo + 1));
    zeta_sum += pr.zeta;
  }

  // Two fare classes per ordered O-D pair; low fare = Euclidean distance.
  for (const auto& pr : pairs) {
    double dx = loc[pr.from].first - loc[pr.to].first;
    double dy = loc[pr.from].second - loc[pr.to].second;
    double dist = std::sqrt(dx * dx + dy * dy);
    std::vector<int> usage(2 * S, 0);
    if (pr.from != 0) usage[2 * (pr.from - 1)] = 1;  // spoke -> hub leg
    if (pr.to != 0) usage[2 * (pr.to - 1) + 1] = 1;  // hub -> spoke leg
    net.products.push_back({dist, usage});                 // low fare
    net.products.push_back({cfg.kappa * dist, usage});     // high fare
  }

  // Demand: log-normal with mean rho*q + (1-rho)*m and cv-scaled std,
  // rounded up and truncated to {1..T}; probabilities from the exact CDF.
  DemandModel model;
  model.K = K;
  model.T = T;
  model.initial_prev_demand = std::min(T, std::max(1, (int)std::llround(cfg.m)));
  const double sln2 = std::log(1.0 + cfg.cv * cfg.cv);
  const double sln = std::sqrt(sln2);
  std::vector<std::vector<double>> matrix(T, std::vector<double>(T, 0.0));
  for (int q = 0; q < T; ++q) {
    double mu = cfg.rho * (q + 1) + (1.0 - cfg.rho) * cfg.m;
    double mln = std::log(mu) - 0.5 * sln2;
    auto cdf = [&](double x) {
      return x <= 0.0 ? 0.0 : phi((std::log(x) - mln) / sln);
    };
    double prev = 0.0;
    for (int d = 1; d < T; ++d) {
      double cur = cdf(d);
      matrix[q][d - 1] = cur - prev;
      prev = cur;
    }
    matrix[q][T - 1] = 1.0 - prev;
  }
  model.transition.assign(K, matrix);

  // Arrival rates: within each O-D pair the low fare dominates early and the
  // high fare ramps up after the pair's threshold; shares are normalized so
  // every (k,t) row sums to one.
  const int J = static_cast<int>(net.products.size());
  net.arrivals.assign(K, std::vector<std::vector<double>>(T, std::vector<double>(J, 0.0)));
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) {
      int g = k * T + t + 1;  // global period in 1..KT
      double F = static_cast<double>(KT + 1 - g) / KT;
      for (size_t p = 0; p < pairs.size(); ++p) {
        double gamma = pairs[p].zeta / zeta_sum;
        double H = g > pairs[p].tau
                       ? static_cast<double>(g - pairs[p].tau) / (KT - pairs[p].tau)
                       : 0.0;
        net.arrivals[k][t][2 * p] = gamma * F / (F + H);
        net.arrivals[k][t][2 * p + 1] = gamma * H / (F + H);
      }
    }

  // Capacities sized against expected leg consumption.
  StageProbabilities probs = derive_probabilities(model);
  for (int i = 0; i < 2 * S; ++i) {
    double xi = 0.0;
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) {
        double tail = probs.tail(k, t);
        for (int j = 0; j < J; ++j)
          if (net.products[j].usage[i])
            xi += tail * net.arrivals[k][t][j];
      }
    net.capacities[i] = std::max(1, static_cast<int>(std::ceil(xi / cfg.beta)));
  }

  NamedInstance out{"hub-spoke", std::move(net), std::move(model)};
  out.network.validate_with(out.demand);
  return out;
}

namespace {

// Shorthand for a transition matrix whose every row is the same pmf.
std::vector<std::vector<double>> uniform_rows(int T, const std::vector<std::pair<int, double>>& pmf) {
  std::vector<std::vector<double>> m(T, std::vector<double>(T, 0.0));
  for (int q = 0; q < T; ++q)
    for (auto [d, p] : pmf) m[q][d - 1] = p;
  return m;
}

std::vector<double> arrival_row(int J, const std::vector<std::pair<int, double>>& entries) {
  std::vector<double> row(J, 0.0);
  for (auto [j, p] : entries) row[j] = p;
  return row;
}

}  // namespace

NamedInstance counterexample(const std::string& name, int param) {
  NamedInstance out;
  out.name = name;
  NetworkInstance& net = out.network;
  DemandModel& dm = out.demand;

  if (name == "appE1") {
    // Two stages, zero-demand encoded by a leading null period: stage-1
    // demand is 1 (nothing) or 2 (one unit-revenue request); if stage 1 was
    // empty, stage 2 surely brings one request, else a coin flip again.
    dm.K = 2;
    dm.T = 2;
    dm.initial_prev_demand = 1;
    dm.transition = {uniform_rows(2, {{1, 0.5}, {2, 0.5}}),
                     {{0.0, 1.0}, {0.5, 0.5}}};
    net.capacities = {1};
    net.products = {{1.0, {1}}, {2.0, {1}}, {0.0, {0}}};
    net.null_product_index = 2;
    net.arrivals = {{arrival_row(3, {{2, 1.0}}), arrival_row(3, {{0, 1.0}})},
                    {arrival_row(3, {{2, 1.0}}),
                     arrival_row(3, {{0, 0.5}, {1, 0.5}})}};
  } else if (name == "appE2") {
    dm.K = 2;
    dm.T = 1;
    dm.initial_prev_demand = 1;
    dm.transition = {{{1.0}}, {{1.0}}};
    net.capacities = {1};
    net.products = {{1.0, {1}}, {2.0, {1}}, {0.0, {0}}};
    net.null_product_index = 2;
    net.arrivals = {{arrival_row(3, {{0, 0.5}, {1, 0.5}})},
                    {arrival_row(3, {{1, 0.5}, {2, 0.5}})}};
  } else if (name == "appF") {
    int K = param > 0 ? param : 8;
    if (K < 2 || K % 2 != 0) throw ParamOutOfRange("appF: K must be even and >= 2");
    dm.K = K;
    dm.T = 1;
    dm.initial_prev_demand = 1;
    dm.transition.assign(K, {{1.0}});
    net.capacities = {K / 2};
    net.products = {{1.0, {1}}, {0.0, {0}}};
    net.null_product_index = 1;
    net.arrivals.assign(K, {arrival_row(2, {{0, 0.5}, {1, 0.5}})});
  } else if (name == "appG") {
    int C = param > 0 ? param : 8;
    if (C < 8 || C % 2 != 0) throw ParamOutOfRange("appG: C must be even and >= 8");
    const int T = C + 1;
    dm.K = 3;
    dm.T = T;
    dm.initial_prev_demand = 1;
    dm.transition = {uniform_rows(T, {{1, 0.5}, {T, 0.5}}),
                     uniform_rows(T, {{1, 1.0}}),
                     uniform_rows(T, {{C / 2, 1.0}})};
    net.capacities = {C + 1};
    net.products = {{1.0, {1}}, {C / 4.0, {1}}, {0.0, {0}}};
    net.null_product_index = 2;
    std::vector<std::vector<double>> s1(T), s2(T), s3(T);
    for (int t = 0; t < T; ++t) {
      s1[t] = arrival_row(3, {{t == 0 ? 2 : 0, 1.0}});
      s2[t] = arrival_row(3, {{t == 0 ? 0 : 2, 1.0}});
      int j3 = (t + 1 < C / 2) ? 0 : (t + 1 == C / 2 ? 1 : 2);
      s3[t] = arrival_row(3, {{j3, 1.0}});
    }
    net.arrivals = {s1, s2, s3};
  } else if (name == "appK1") {
    int a = param > 0 ? param : 2;
    if (a < 2) throw ParamOutOfRange("appK1: alpha must be >= 2");
    const int T = a * a * a * a;
    dm.K = 1;
    dm.T = T;
    dm.initial_prev_demand = 1;
    dm.transition = {uniform_rows(
        T, {{a, 1.0 - 1.0 / (a * a)}, {T, 1.0 / (a * a)}})};
    net.capacities = {a * a * a};
    net.products = {{1.0, {1}}};
    net.arrivals.assign(1, std::vector<std::vector<double>>(T, arrival_row(1, {{0, 1.0}})));
  } else if (name == "appK2") {
    dm.K = 2;
    dm.T = 2;
    dm.initial_prev_demand = 1;
    dm.transition = {uniform_rows(2, {{1, 0.5}, {2, 0.5}}),
                     uniform_rows(2, {{1, 0.5}, {2, 0.5}})};
    net.capacities = {3};
    net.products = {{1.0, {1}}};
    net.arrivals.assign(2, std::vector<std::vector<double>>(2, arrival_row(1, {{0, 1.0}})));
  } else if (name == "appN") {
    int a = param > 0 ? param : 3;
    if (a < 3) throw ParamOutOfRange("appN: alpha must be >= 3");
    const int T = a * a * a;
    dm.K = 1;
    dm.T = T;
    dm.initial_prev_demand = 1;
    dm.transition = {uniform_rows(
        T, {{a, 1.0 - 0.5 / (a - 1)}, {T, 0.5 / (a - 1)}})};
    net.capacities = {a * a};
    net.products = {{1.0, {1}}};
    net.arrivals.assign(1, std::vector<std::vector<double>>(T, arrival_row(1, {{0, 1.0}})));
  } else {
    throw UnknownName("unknown fixture: " + name);
  }

  net.validate_with(dm);
  return out;
}

}  // namespace rm

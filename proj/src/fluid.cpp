#include "rm/fluid.hpp"

#include <cmath>

namespace rm {

namespace {

void check_dims(const NetworkInstance& net, const DemandModel& model) {
  if (net.stages() != model.K || net.periods() != model.T)
    throw DimensionMismatch("fluid: instance (K,T) disagree with demand model");
}

// Conditional joint tables for every reachable (k,q) block.
std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>>
all_joints(const DemandModel& model, const StageProbabilities& probs) {
  std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>> cj(
      model.K,
      std::vector<std::vector<std::vector<std::vector<double>>>>(model.T));
  for (int k = 0; k < model.K; ++k)
    for (int q = 0; q < model.T; ++q)
      if (probs.prev_marginal[k][q] > 0.0)
        cj[k][q] = conditional_joint(model, probs, k, q);
  return cj;
}

}  // namespace

std::string bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::PRF_reduced: return "prf";
    case BoundKind::PRF_full: return "prf-full";
    case BoundKind::EXF: return "exf";
    case BoundKind::INDEP: return "indep";
    case BoundKind::NAIVE_CUMULATIVE: return "naive-cum";
    case BoundKind::NAIVE_UNWEIGHTED: return "naive-unw";
    case BoundKind::LAGRANGIAN_DUAL: return "lagrangian";
    case BoundKind::LINEAR_VFA: return "vfa";
    case BoundKind::ASSORTMENT: return "assortment";
  }
  return "?";
}

PrfLP build_prf(const NetworkInstance& net, const DemandModel& model,
                const StageProbabilities& probs, PrfForm form) {
  check_dims(net, model);
  const int K = model.K, T = model.T, J = net.num_products();
  const int I = net.num_resources();

  PrfLP out;
  out.map.K = K;
  out.map.T = T;
  out.map.J = J;
  out.map.col.assign(static_cast<size_t>(K) * T * T * J, -1);
  out.lp.sense = Sense::Maximize;

  // Variables only for reachable (k,q) blocks; x <= lambda as bounds.
  for (int k = 0; k < K; ++k)
    for (int q = 0; q < T; ++q) {
      if (probs.prev_marginal[k][q] <= 0.0) continue;
      for (int t = 0; t < T; ++t)
        for (int j = 0; j < J; ++j) {
          double lam = net.arrivals[k][t][j];
          double wgt = probs.w[k][t][q];
          int col = out.lp.add_variable(
              net.products[j].revenue * wgt, 0.0, lam,
              "x_j" + std::to_string(j) + "_k" + std::to_string(k + 1) + "_t" +
                  std::to_string(t + 1) + "_q" + std::to_string(q + 1));
          out.map.at(k, t, q, j) = col;
        }
    }

  auto cj = all_joints(model, probs);

  for (int k = 0; k < K; ++k)
    for (int q = 0; q < T; ++q) {
      if (probs.prev_marginal[k][q] <= 0.0) continue;
      for (int i = 0; i < I; ++i) {
        // Expected consumption from earlier stages, conditional on this
        // block; independent of the period within the block.
        std::vector<std::pair<int, double>> prior;
        for (int l = 0; l < k; ++l)
          for (int s = 0; s < T; ++s)
            for (int p = 0; p < T; ++p) {
              double cw = cj[k][q][l][s][p];
              if (cw <= 0.0) continue;
              for (int j = 0; j < J; ++j) {
                if (!net.products[j].usage[i]) continue;
                int col = out.map(l, s, p, j);
                if (col >= 0) prior.push_back({col, cw});
              }
            }
        if (form == PrfForm::Reduced) {
          auto coefs = prior;
          for (int s = 0; s < T; ++s)
            for (int j = 0; j < J; ++j)
              if (net.products[j].usage[i])
                coefs.push_back({out.map(k, s, q, j), 1.0});
          out.lp.add_row(std::move(coefs), Rel::LE, net.capacities[i],
                         "cap_i" + std::to_string(i) + "_k" + std::to_string(k + 1) +
                             "_q" + std::to_string(q + 1));
        } else {
          for (int t = 0; t < T; ++t) {
            auto coefs = prior;
            for (int s = 0; s <= t; ++s)
              for (int j = 0; j < J; ++j)
                if (net.products[j].usage[i])
                  coefs.push_back({out.map(k, s, q, j), 1.0});
            out.lp.add_row(std::move(coefs), Rel::LE, net.capacities[i],
                           "cap_i" + std::to_string(i) + "_k" +
                               std::to_string(k + 1) + "_t" + std::to_string(t + 1) +
                               "_q" + std::to_string(q + 1));
          }
        }
      }
    }
  return out;
}

FluidSolution prf_solution(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs) {
  PrfLP prf = build_prf(net, model, probs, PrfForm::Reduced);
  LPSolution sol = solve_lp(prf.lp);
  if (sol.status != LPStatus::Optimal)
    throw NumericalBreakdown("prf_solution: LP not optimal");
  FluidSolution out;
  out.kind = BoundKind::PRF_reduced;
  out.bound = sol.objective;
  const int K = model.K, T = model.T, J = net.num_products();
  out.xbar.assign(K, std::vector<std::vector<std::vector<double>>>(
                         T, std::vector<std::vector<double>>(
                                T, std::vector<double>(J, 0.0))));
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int q = 0; q < T; ++q)
        for (int j = 0; j < J; ++j) {
          int col = prf.map(k, t, q, j);
          if (col >= 0) out.xbar[k][t][q][j] = std::max(0.0, sol.primal[col]);
        }
  return out;
}

BoundedLP build_exf(const NetworkInstance& net, const DemandModel& model,
                    const StageProbabilities& probs) {
  check_dims(net, model);
  BoundedLP lp;
  lp.sense = Sense::Maximize;
  const int J = net.num_products();
  for (int j = 0; j < J; ++j) {
    double cap = 0.0;
    for (int k = 0; k < model.K; ++k)
      for (int t = 0; t < model.T; ++t)
        cap += probs.tail(k, t) * net.arrivals[k][t][j];
    lp.add_variable(net.products[j].revenue, 0.0, cap, "w_j" + std::to_string(j));
  }
  for (int i = 0; i < net.num_resources(); ++i) {
    std::vector<std::pair<int, double>> coefs;
    for (int j = 0; j < J; ++j)
      if (net.products[j].usage[i]) coefs.push_back({j, 1.0});
    lp.add_row(std::move(coefs), Rel::LE, net.capacities[i],
               "cap_i" + std::to_string(i));
  }
  return lp;
}

ExfSolution exf_solution(const NetworkInstance& net, const DemandModel& model,
                         const StageProbabilities& probs) {
  BoundedLP lp = build_exf(net, model, probs);
  LPSolution sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal)
    throw NumericalBreakdown("exf_solution: LP not optimal");
  return {sol.objective, sol.primal};
}

bool is_independent(const DemandModel& model) {
  for (const auto& mat : model.transition)
    for (size_t q = 1; q < mat.size(); ++q)
      for (size_t p = 0; p < mat[q].size(); ++p)
        if (std::fabs(mat[q][p] - mat[0][p]) > 1e-12) return false;
  return true;
}

namespace {

BoundedLP build_indep_like(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs, int variant) {
  // variant: 0 = proper independent LP, 1 = naive cumulative, 2 = unweighted.
  check_dims(net, model);
  if (!is_independent(model))
    throw PreconditionViolated("indep LP: demand stages are not independent");
  const int K = model.K, T = model.T, J = net.num_products();
  BoundedLP lp;
  lp.sense = Sense::Maximize;
  auto idx = [&](int k, int t, int j) { return (k * T + t) * J + j; };
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < J; ++j)
        lp.add_variable(net.products[j].revenue * probs.tail(k, t), 0.0,
                        net.arrivals[k][t][j],
                        "x_j" + std::to_string(j) + "_k" + std::to_string(k + 1) +
                            "_t" + std::to_string(t + 1));
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < net.num_resources(); ++i) {
      std::vector<std::pair<int, double>> coefs;
      for (int l = 0; l <= k; ++l)
        for (int t = 0; t < T; ++t) {
          double wgt;
          if (variant == 2)
            wgt = 1.0;
          else if (variant == 1 || l < k)
            wgt = probs.tail(l, t);
          else
            wgt = 1.0;  // own stage enters unweighted in the proper LP
          if (wgt <= 0.0) continue;
          for (int j = 0; j < J; ++j)
            if (net.products[j].usage[i]) coefs.push_back({idx(l, t, j), wgt});
        }
      lp.add_row(std::move(coefs), Rel::LE, net.capacities[i],
                 "cap_i" + std::to_string(i) + "_k" + std::to_string(k + 1));
    }
  return lp;
}

}  // namespace

BoundedLP build_indep(const NetworkInstance& net, const DemandModel& model,
                      const StageProbabilities& probs) {
  return build_indep_like(net, model, probs, 0);
}

BoundedLP build_naive(const NetworkInstance& net, const DemandModel& model,
                      const StageProbabilities& probs, NaiveVariant variant) {
  return build_indep_like(net, model, probs,
                          variant == NaiveVariant::Cumulative ? 1 : 2);
}

BoundedLP build_lagrangian(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs) {
  check_dims(net, model);
  const int K = model.K, T = model.T, J = net.num_products();
  const int I = net.num_resources();
  BoundedLP lp;
  lp.sense = Sense::Minimize;
  const int n_alpha = I * K * T * T;
  const int n_beta = K * T * T;
  auto alpha = [&](int i, int k, int t, int q) {
    return ((i * K + k) * T + t) * T + q;
  };
  auto beta = [&](int k, int t, int q) { return n_alpha + (k * T + t) * T + q; };
  auto mu = [&](int i, int k, int t, int q) {
    return n_alpha + n_beta + ((i * K + k) * T + t) * T + q;
  };
  auto eta = [&](int j, int k, int t, int q) {
    return n_alpha + n_beta + n_alpha + ((j * K + k) * T + t) * T + q;
  };
  const int D0 = model.initial_prev_demand - 1;
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t)
        for (int q = 0; q < T; ++q)
          lp.add_variable((k == 0 && t == 0 && q == D0) ? net.capacities[i] : 0.0,
                          -lp_inf(), lp_inf());
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int q = 0; q < T; ++q)
        lp.add_variable((k == 0 && t == 0 && q == D0) ? 1.0 : 0.0, -lp_inf(),
                        lp_inf());
  for (int n = 0; n < n_alpha + J * K * T * T; ++n)
    lp.add_variable(0.0, 0.0, lp_inf());

  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int q = 0; q < T; ++q) {
        double th = probs.survival[k][t][q];
        for (int i = 0; i < I; ++i) {
          std::vector<std::pair<int, double>> coefs{{alpha(i, k, t, q), 1.0},
                                                    {mu(i, k, t, q), -1.0}};
          if (t + 1 < T && th > 0.0) coefs.push_back({alpha(i, k, t + 1, q), -th});
          if (k + 1 < K) coefs.push_back({alpha(i, k + 1, 0, t), -(1.0 - th)});
          lp.add_row(std::move(coefs), Rel::EQ, 0.0);
        }
        std::vector<std::pair<int, double>> bcoefs{{beta(k, t, q), 1.0}};
        for (int j = 0; j < J; ++j) {
          double lam = net.arrivals[k][t][j];
          if (lam > 0.0) bcoefs.push_back({eta(j, k, t, q), -lam});
        }
        if (t + 1 < T && th > 0.0) bcoefs.push_back({beta(k, t + 1, q), -th});
        if (k + 1 < K) bcoefs.push_back({beta(k + 1, 0, t), -(1.0 - th)});
        lp.add_row(std::move(bcoefs), Rel::EQ, 0.0);
        for (int j = 0; j < J; ++j) {
          std::vector<std::pair<int, double>> ecoefs{{eta(j, k, t, q), 1.0}};
          for (int i = 0; i < I; ++i)
            if (net.products[j].usage[i]) ecoefs.push_back({alpha(i, k, t, q), 1.0});
          lp.add_row(std::move(ecoefs), Rel::GE, net.products[j].revenue);
        }
      }
  return lp;
}

BoundedLP build_linear_vfa(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs) {
  check_dims(net, model);
  const int K = model.K, T = model.T, J = net.num_products();
  const int I = net.num_resources();
  BoundedLP lp;
  lp.sense = Sense::Minimize;
  const int n_alpha = I * K * T * T;
  const int n_beta = K * T * T;
  auto alpha = [&](int i, int k, int t, int q) {
    return ((i * K + k) * T + t) * T + q;
  };
  auto beta = [&](int k, int t, int q) { return n_alpha + (k * T + t) * T + q; };
  // u: linearized revenue plus-part per (j,k,t,q); v: capacity plus-part
  // per (i,k,t,q).
  auto u = [&](int j, int k, int t, int q) {
    return n_alpha + n_beta + ((j * K + k) * T + t) * T + q;
  };
  auto v = [&](int i, int k, int t, int q) {
    return n_alpha + n_beta + J * K * T * T + ((i * K + k) * T + t) * T + q;
  };
  const int D0 = model.initial_prev_demand - 1;
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t)
        for (int q = 0; q < T; ++q)
          lp.add_variable((k == 0 && t == 0 && q == D0) ? net.capacities[i] : 0.0,
                          -lp_inf(), lp_inf());
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int q = 0; q < T; ++q)
        lp.add_variable((k == 0 && t == 0 && q == D0) ? 1.0 : 0.0, -lp_inf(),
                        lp_inf());
  for (int n = 0; n < (J + I) * K * T * T; ++n) lp.add_variable(0.0, 0.0, lp_inf());

  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int q = 0; q < T; ++q) {
        double th = probs.survival[k][t][q];
        const bool has_t1 = (t + 1 < T && th > 0.0);
        const bool has_k1 = (k + 1 < K);
        std::vector<std::pair<int, double>> bc{{beta(k, t, q), 1.0}};
        if (has_t1) bc.push_back({beta(k, t + 1, q), -th});
        if (has_k1) bc.push_back({beta(k + 1, 0, t), -(1.0 - th)});
        for (int j = 0; j < J; ++j) {
          double lam = net.arrivals[k][t][j];
          if (lam > 0.0) bc.push_back({u(j, k, t, q), -lam});
        }
        for (int i = 0; i < I; ++i)
          bc.push_back({v(i, k, t, q), -static_cast<double>(net.capacities[i])});
        lp.add_row(std::move(bc), Rel::GE, 0.0);

        for (int j = 0; j < J; ++j) {
          std::vector<std::pair<int, double>> uc{{u(j, k, t, q), 1.0}};
          for (int i = 0; i < I; ++i) {
            if (!net.products[j].usage[i]) continue;
            if (has_t1) uc.push_back({alpha(i, k, t + 1, q), th});
            if (has_k1) uc.push_back({alpha(i, k + 1, 0, t), 1.0 - th});
          }
          lp.add_row(std::move(uc), Rel::GE, net.products[j].revenue);
        }
        for (int i = 0; i < I; ++i) {
          std::vector<std::pair<int, double>> vc{{v(i, k, t, q), 1.0},
                                                 {alpha(i, k, t, q), 1.0}};
          if (has_t1) vc.push_back({alpha(i, k, t + 1, q), -th});
          if (has_k1) vc.push_back({alpha(i, k + 1, 0, t), -(1.0 - th)});
          lp.add_row(std::move(vc), Rel::GE, 0.0);
        }
      }
  return lp;
}

BoundedLP build_assortment(const NetworkInstance& net, const DemandModel& model,
                           const StageProbabilities& probs,
                           const MNLChoiceModel& choice) {
  check_dims(net, model);
  if (choice.v.size() != static_cast<size_t>(net.num_products()))
    throw DimensionMismatch("assortment: choice weights size mismatch");
  const int K = model.K, T = model.T, I = net.num_resources();
  std::vector<int> offer;  // offerable (non-null) products
  for (int j = 0; j < net.num_products(); ++j)
    if (!net.is_null(j)) offer.push_back(j);
  const int n = static_cast<int>(offer.size());
  if (n > 10)
    throw TooManyProducts("assortment: subset enumeration limited to 10 products");
  const int nS = 1 << n;

  // Per-subset MNL revenue and per-resource consumption.
  std::vector<double> rev(nS, 0.0);
  std::vector<std::vector<double>> cons(nS, std::vector<double>(I, 0.0));
  for (int S = 0; S < nS; ++S) {
    double denom = 1.0;
    for (int b = 0; b < n; ++b)
      if (S & (1 << b)) denom += choice.v[offer[b]];
    for (int b = 0; b < n; ++b) {
      if (!(S & (1 << b))) continue;
      int j = offer[b];
      double phi = choice.v[j] / denom;
      rev[S] += net.products[j].revenue * phi;
      for (int i = 0; i < I; ++i)
        if (net.products[j].usage[i]) cons[S][i] += phi;
    }
  }

  BoundedLP lp;
  lp.sense = Sense::Maximize;
  // Columns for reachable blocks only.
  std::vector<int> base(static_cast<size_t>(K) * T * T, -1);
  auto block = [&](int k, int q) { return k * T + q; };
  for (int k = 0; k < K; ++k)
    for (int q = 0; q < T; ++q) {
      if (probs.prev_marginal[k][q] <= 0.0) continue;
      base[block(k, q)] = lp.num_vars();
      for (int t = 0; t < T; ++t)
        for (int S = 0; S < nS; ++S)
          lp.add_variable(probs.w[k][t][q] * rev[S], 0.0, lp_inf());
    }
  auto col = [&](int k, int t, int q, int S) {
    return base[block(k, q)] + t * nS + S;
  };

  auto cj = all_joints(model, probs);
  for (int k = 0; k < K; ++k)
    for (int q = 0; q < T; ++q) {
      if (base[block(k, q)] < 0) continue;
      for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> one;
        for (int S = 0; S < nS; ++S) one.push_back({col(k, t, q, S), 1.0});
        lp.add_row(std::move(one), Rel::EQ, 1.0);
      }
      for (int i = 0; i < I; ++i) {
        std::vector<std::pair<int, double>> coefs;
        for (int l = 0; l < k; ++l)
          for (int s = 0; s < T; ++s)
            for (int p = 0; p < T; ++p) {
              double cw = cj[k][q][l][s][p];
              if (cw <= 0.0 || base[block(l, p)] < 0) continue;
              for (int S = 1; S < nS; ++S)
                if (cons[S][i] > 0.0)
                  coefs.push_back({col(l, s, p, S), cw * cons[S][i]});
            }
        for (int s = 0; s < T; ++s)
          for (int S = 1; S < nS; ++S)
            if (cons[S][i] > 0.0) coefs.push_back({col(k, s, q, S), cons[S][i]});
        lp.add_row(std::move(coefs), Rel::LE, net.capacities[i]);
      }
    }
  return lp;
}

}  // namespace rm

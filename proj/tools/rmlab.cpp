// rmlab: bound reports, policy simulation, experiment grids, instance
// generation and demand calibration for calendar-aware network revenue
// management.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rm/exact.hpp"
#include "rm/fluid.hpp"
#include "rm/io.hpp"
#include "rm/policy.hpp"

namespace {

using namespace rm;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Common {
  std::string instance_path;
  std::string fixture;
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
};

int fixture_param(const std::vector<std::string>& params) {
  // --param NAME=VALUE; the single numeric parameter of a fixture family.
  for (const auto& p : params) {
    auto eq = p.find('=');
    if (eq == std::string::npos)
      throw ValidationError("bad --param (expected NAME=VALUE): " + p);
    return std::stoi(p.substr(eq + 1));
  }
  return 0;
}

NamedInstance resolve_instance(const Common& c) {
  if (!c.fixture.empty()) return counterexample(c.fixture, fixture_param(c.params));
  if (!c.instance_path.empty()) return load_instance(c.instance_path);
  throw ValidationError("need --instance or --fixture");
}

std::ostream& open_out(std::ofstream& file, const std::string& out) {
  if (out.empty()) return std::cout;
  file.open(out);
  if (!file) throw ValidationError("cannot write " + out);
  return file;
}

double one_bound(const std::string& kind, const NamedInstance& inst,
                 const StageProbabilities& probs, std::uint64_t seed) {
  const NetworkInstance& net = inst.network;
  const DemandModel& dm = inst.demand;
  auto solve = [](const BoundedLP& lp) {
    LPSolution s = solve_lp(lp);
    if (s.status != LPStatus::Optimal)
      throw NumericalBreakdown("bound LP not optimal");
    return s.objective;
  };
  if (kind == "prf") return solve(build_prf(net, dm, probs, PrfForm::Reduced).lp);
  if (kind == "prf-full") return solve(build_prf(net, dm, probs, PrfForm::Full).lp);
  if (kind == "exf") return solve(build_exf(net, dm, probs));
  if (kind == "indep") return solve(build_indep(net, dm, probs));
  if (kind == "naive-cum")
    return solve(build_naive(net, dm, probs, NaiveVariant::Cumulative));
  if (kind == "naive-unw")
    return solve(build_naive(net, dm, probs, NaiveVariant::Unweighted));
  if (kind == "lagrangian") return solve(build_lagrangian(net, dm, probs));
  if (kind == "vfa") return solve(build_linear_vfa(net, dm, probs));
  if (kind == "assortment") {
    MNLChoiceModel choice;
    choice.v.assign(net.num_products(), 1.0);
    return solve(build_assortment(net, dm, probs, choice));
  }
  if (kind == "dp") return solve_dp(net, dm, probs).opt;
  if (kind == "offline") return offline_exact(net, dm).value;
  if (kind == "offline-mc") return offline_mc(net, dm, 10000, seed).value;
  throw ValidationError("unknown bound kind: " + kind);
}

AdmissionPolicy make_policy(const std::string& kind, const NamedInstance& inst,
                            const StageProbabilities& probs, double gamma) {
  if (kind == "prf")
    return prf_policy(prf_solution(inst.network, inst.demand, probs), inst.network,
                      gamma);
  if (kind == "indep")
    return indep_policy(prf_solution(inst.network, inst.demand, probs),
                        inst.network, probs, gamma);
  if (kind == "exf")
    return exf_policy(exf_solution(inst.network, inst.demand, probs), inst.network,
                      inst.demand, probs, gamma);
  throw ValidationError("unknown policy kind: " + kind);
}

double resolve_gamma(const std::string& text, const NamedInstance& inst,
                     const StageProbabilities& probs) {
  if (text == "auto-asymptotic")
    return recommended_gamma(inst.network, inst.demand, probs,
                             GammaRegime::Asymptotic);
  if (text == "auto-constant")
    return recommended_gamma(inst.network, inst.demand, probs,
                             GammaRegime::ConstantFactor);
  return std::stod(text);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

int cmd_bounds(const Common& c, const std::string& bounds) {
  NamedInstance inst = resolve_instance(c);
  StageProbabilities probs = derive_probabilities(inst.demand);
  std::ofstream file;
  std::ostream& os = open_out(file, c.out);
  os << "bound,value,seconds\n";
  for (const auto& kind : split_list(bounds)) {
    auto start = std::chrono::steady_clock::now();
    double v = one_bound(kind, inst, probs, c.seed);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    os << kind << "," << v << "," << secs << "\n";
  }
  return 0;
}

int cmd_simulate(const Common& c, const std::string& policy_kind,
                 const std::string& gamma_text, int n_paths) {
  NamedInstance inst = resolve_instance(c);
  StageProbabilities probs = derive_probabilities(inst.demand);
  double gamma = resolve_gamma(gamma_text, inst, probs);
  AdmissionPolicy pol = make_policy(policy_kind, inst, probs, gamma);
  SimConfig cfg{n_paths, c.seed, c.threads, false};
  SimStats stats = simulate(inst.network, inst.demand, probs, pol, cfg);
  double prf = one_bound("prf", inst, probs, c.seed);
  double exf = one_bound("exf", inst, probs, c.seed);
  std::ofstream file;
  std::ostream& os = open_out(file, c.out);
  os << "policy,gamma,n_paths,mean,stderr,bound_prf,bound_exf,ratio_prf\n";
  os << policy_kind << "," << gamma << "," << n_paths << "," << stats.mean << ","
     << stats.stderr_ << "," << prf << "," << exf << "," << stats.mean / prf
     << "\n";
  return 0;
}

int cmd_sweep_gamma(const Common& c, const std::string& policy_kind,
                    const std::string& grid_text, int n_paths) {
  NamedInstance inst = resolve_instance(c);
  StageProbabilities probs = derive_probabilities(inst.demand);
  std::vector<double> grid;
  for (const auto& g : split_list(grid_text)) {
    double v = std::stod(g);
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("sweep-gamma: gamma values must lie in [0,1]");
    if (std::find(grid.begin(), grid.end(), v) != grid.end()) {
      std::cerr << "warning: duplicate gamma " << v << " ignored\n";
      continue;
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw ValidationError("sweep-gamma: empty grid");
  FluidSolution fluid = prf_solution(inst.network, inst.demand, probs);
  std::ofstream file;
  std::ostream& os = open_out(file, c.out);
  os << "gamma,mean,stderr\n";
  for (double g : grid) {
    AdmissionPolicy pol = policy_kind == "exf"
                              ? exf_policy(exf_solution(inst.network, inst.demand,
                                                        probs),
                                           inst.network, inst.demand, probs, g)
                              : prf_policy(fluid, inst.network, g);
    SimConfig cfg{n_paths, c.seed, c.threads, false};
    SimStats stats = simulate(inst.network, inst.demand, probs, pol, cfg);
    os << g << "," << stats.mean << "," << stats.stderr_ << "\n";
  }
  return 0;
}

int cmd_experiment(const Common& c, const std::string& cells_text, double m,
                   int n_paths) {
  // Cells are K:rho pairs, e.g. --cells 3:0.2,3:0.8,5:0.2,5:0.8
  auto cells = split_list(cells_text);
  if (cells.empty()) throw ValidationError("experiment: empty cell list");
  if (n_paths < 1) throw ValidationError("experiment: n_paths must be >= 1");
  std::ofstream file;
  std::ostream& os = open_out(file, c.out);
  os << "K,rho,bound_prf,bound_exf,bound_gap_pct,prf_mean,prf_stderr,exf_mean,"
        "exf_stderr,policy_gap_pct,prf_ratio,exf_ratio,status\n";
  for (const auto& cell : cells) {
    auto colon = cell.find(':');
    if (colon == std::string::npos)
      throw ValidationError("experiment: cell must be K:rho, got " + cell);
    int K = std::stoi(cell.substr(0, colon));
    double rho = std::stod(cell.substr(colon + 1));
    os << K << "," << rho << ",";
    try {
      HubSpokeConfig cfg;
      cfg.K = K;
      cfg.rho = rho;
      cfg.m = m;
      cfg.seed = c.seed;
      NamedInstance inst = generate_hub_spoke(cfg);
      StageProbabilities probs = derive_probabilities(inst.demand);
      FluidSolution fluid = prf_solution(inst.network, inst.demand, probs);
      ExfSolution exf = exf_solution(inst.network, inst.demand, probs);
      SimConfig scfg{n_paths, c.seed, c.threads, false};
      SimStats prf_stats = simulate(inst.network, inst.demand, probs,
                                    prf_policy(fluid, inst.network, 1.0), scfg);
      SimStats exf_stats = simulate(
          inst.network, inst.demand, probs,
          exf_policy(exf, inst.network, inst.demand, probs, 1.0), scfg);
      double bound_gap = (exf.bound - fluid.bound) / exf.bound * 100.0;
      double policy_gap =
          (prf_stats.mean - exf_stats.mean) / exf_stats.mean * 100.0;
      os << fluid.bound << "," << exf.bound << "," << bound_gap << ","
         << prf_stats.mean << "," << prf_stats.stderr_ << "," << exf_stats.mean
         << "," << exf_stats.stderr_ << "," << policy_gap << ","
         << prf_stats.mean / fluid.bound << "," << exf_stats.mean / exf.bound
         << ",ok\n";
    } catch (const std::exception& e) {
      os << ",,,,,,,,,,failed: " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_generate(const Common& c, int spokes, double m, double rho, int K,
                 const std::string& out) {
  HubSpokeConfig cfg;
  cfg.spoke_count = spokes;
  cfg.m = m;
  cfg.rho = rho;
  cfg.K = K;
  cfg.seed = c.seed;
  NamedInstance inst = generate_hub_spoke(cfg);
  if (out.empty()) throw ValidationError("generate: --out required");
  save_instance(inst, out);
  return 0;
}

int cmd_calibrate(const std::string& target_path, const std::string& out) {
  CalibrationTarget t = load_calibration_target(target_path);
  DemandModel model = calibrate_total_demand(t.K, t.T, t.pmf);
  if (out.empty()) throw ValidationError("calibrate: --out required");
  save_demand_model(model, out);
  return 0;
}

int cmd_dump_lp(const Common& c, const std::string& kind) {
  NamedInstance inst = resolve_instance(c);
  StageProbabilities probs = derive_probabilities(inst.demand);
  const NetworkInstance& net = inst.network;
  BoundedLP lp;
  if (kind == "prf")
    lp = build_prf(net, inst.demand, probs, PrfForm::Reduced).lp;
  else if (kind == "prf-full")
    lp = build_prf(net, inst.demand, probs, PrfForm::Full).lp;
  else if (kind == "exf")
    lp = build_exf(net, inst.demand, probs);
  else if (kind == "indep")
    lp = build_indep(net, inst.demand, probs);
  else if (kind == "naive-cum")
    lp = build_naive(net, inst.demand, probs, NaiveVariant::Cumulative);
  else if (kind == "naive-unw")
    lp = build_naive(net, inst.demand, probs, NaiveVariant::Unweighted);
  else if (kind == "lagrangian")
    lp = build_lagrangian(net, inst.demand, probs);
  else if (kind == "vfa")
    lp = build_linear_vfa(net, inst.demand, probs);
  else
    throw ValidationError("dump-lp: unknown kind " + kind);
  std::ofstream file;
  std::ostream& os = open_out(file, c.out);
  write_lp_file(lp, os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network revenue management with calendar-aware demands"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  Common common;
  app.add_option("--seed", common.seed, "Master random seed");
  app.add_option("--out", common.out, "Output file (default: stdout)");
  app.add_option("--threads", common.threads, "Simulation worker threads");

  auto add_instance_opts = [&](CLI::App* sub) {
    sub->add_option("--instance", common.instance_path, "Instance file");
    sub->add_option("--fixture", common.fixture, "Named fixture");
    sub->add_option("--param", common.params, "Fixture parameter NAME=VALUE");
  };

  std::string bounds = "prf";
  auto* sb = app.add_subcommand("bounds", "Solve upper bounds");
  add_instance_opts(sb);
  sb->add_option("--bound", bounds, "Comma list of bound kinds");

  std::string policy = "prf", gamma = "1.0";
  int n_paths = 10000;
  auto* ss = app.add_subcommand("simulate", "Simulate an admission policy");
  add_instance_opts(ss);
  ss->add_option("--policy", policy, "prf|indep|exf");
  ss->add_option("--gamma", gamma, "value, auto-asymptotic or auto-constant");
  ss->add_option("--paths", n_paths, "Number of sample paths");

  std::string grid = "0.25,0.5,0.75,1.0";
  auto* sg = app.add_subcommand("sweep-gamma", "Simulate over a gamma grid");
  add_instance_opts(sg);
  sg->add_option("--policy", policy, "prf|exf");
  sg->add_option("--grid", grid, "Comma list of gamma values");
  sg->add_option("--paths", n_paths, "Number of sample paths");

  std::string cells = "3:0.2,3:0.8,5:0.2,5:0.8";
  double m = 10.0;
  auto* se = app.add_subcommand("experiment", "Hub-spoke experiment grid");
  se->add_option("--cells", cells, "Comma list of K:rho cells");
  se->add_option("--m", m, "Base mean demand per stage");
  se->add_option("--paths", n_paths, "Number of sample paths per cell");

  int spokes = 3, K = 5;
  double rho = 0.5;
  auto* sgen = app.add_subcommand("generate", "Generate a hub-spoke instance");
  sgen->add_option("--spokes", spokes, "Spoke count");
  sgen->add_option("--m", m, "Base mean demand per stage");
  sgen->add_option("--rho", rho, "Stage-to-stage dependence");
  sgen->add_option("--K", K, "Number of stages");

  std::string target;
  auto* sc = app.add_subcommand("calibrate", "Fit a model to a total-demand pmf");
  sc->add_option("--target", target, "Calibration target file")->required();

  std::string lp_kind = "prf";
  auto* sd = app.add_subcommand("dump-lp", "Write an LP in text format");
  add_instance_opts(sd);
  sd->add_option("--bound", lp_kind, "LP kind to dump");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sb->parsed()) return cmd_bounds(common, bounds);
    if (ss->parsed()) return cmd_simulate(common, policy, gamma, n_paths);
    if (sg->parsed()) return cmd_sweep_gamma(common, policy, grid, n_paths);
    if (se->parsed()) return cmd_experiment(common, cells, m, n_paths);
    if (sgen->parsed()) return cmd_generate(common, spokes, m, rho, K, common.out);
    if (sc->parsed()) return cmd_calibrate(target, common.out);
    if (sd->parsed()) return cmd_dump_lp(common, lp_kind);
  } catch (const NumericalBreakdown& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const StateSpaceTooLarge& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const EnumerationTooLarge& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}

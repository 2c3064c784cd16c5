#include "rm/lp.hpp"

#include <algorithm>
#include <cmath>

#include "rm/demand.hpp"  // ValidationError

namespace rm {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr int kRefactorEvery = 100;
constexpr int kBlandAfter = 500;
constexpr long kMaxIterations = 2000000;

enum VStat : unsigned char { kBasic, kAtLo, kAtHi };

/** Internal canonical problem: minimize c.x subject to A x = b with finite
 *  lower bounds (upper bounds may be +inf).  Built from a BoundedLP by
 *  negating >= rows, splitting/mirroring variables with infinite lower
 *  bounds, appending row slacks, then phase-1 artificials.
 */
struct Canon {
  int m = 0;             // rows
  int n = 0;             // columns incl. slacks and artificials
  int n_struct = 0;      // transformed structural columns
  int n_slack = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> cost;  // phase-2 cost
  std::vector<double> lo, hi;
  std::vector<double> b;
  // Mapping back to original variables: for original j, either one
  // transformed column (maybe mirrored) or a split pair.
  struct VarMap {
    int pos = -1;     // column of the positive part
    int neg = -1;     // column of the negative part (split only)
    double shift = 0; // mirrored: x = shift - z
    bool mirrored = false;
  };
  std::vector<VarMap> vmap;
  std::vector<int> row_sign;  // +1 rows kept, -1 rows negated (>=)
};

class Simplex {
 public:
  explicit Simplex(Canon c)
      : c_(std::move(c)),
        x_(c.n, 0.0),
        stat_(c.n, kAtLo),
        basis_(c.m, -1),
        binv_(static_cast<size_t>(c.m) * c.m, 0.0),
        cost_(c.n, 0.0) {}

  // Returns final status; duals available via duals().
  LPStatus run(long& iterations) {
    // Phase 1: artificials are the last m columns with unit phase-1 cost.
    for (int j = 0; j < c_.n; ++j) x_[j] = c_.lo[j];
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int i = 0; i < c_.m; ++i) {
      int a = c_.n - c_.m + i;
      cost_[a] = 1.0;
      basis_[i] = a;
      stat_[a] = kBasic;
    }
    refactorize();
    phase1_ = true;
    LPStatus st = iterate(iterations);
    if (st != LPStatus::Optimal) return st;  // cannot happen in phase 1
    double infeas = 0.0;
    for (int i = 0; i < c_.m; ++i)
      if (basis_[i] >= c_.n - c_.m) infeas += std::fabs(x_[basis_[i]]);
    if (infeas > kFeasTol) return LPStatus::Infeasible;

    // Phase 2: freeze artificials at zero, restore the real costs.
    phase1_ = false;
    for (int i = 0; i < c_.m; ++i) {
      int a = c_.n - c_.m + i;
      c_.hi[a] = 0.0;
      if (stat_[a] != kBasic) x_[a] = 0.0;
    }
    cost_ = c_.cost;
    cost_.resize(c_.n, 0.0);
    return iterate(iterations);
  }

  const std::vector<double>& x() const { return x_; }

  // y = c_B B^{-1}
  std::vector<double> duals() const {
    std::vector<double> y(c_.m, 0.0);
    for (int i = 0; i < c_.m; ++i) {
      double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(i) * c_.m];
      for (int k = 0; k < c_.m; ++k) y[k] += cb * row[k];
    }
    return y;
  }

 private:
  LPStatus iterate(long& iterations) {
    int since_refactor = 0;
    int nonimproving = 0;
    while (true) {
      if (++iterations > kMaxIterations)
        throw NumericalBreakdown("simplex: iteration limit exceeded");
      bool bland = nonimproving >= kBlandAfter;

      std::vector<double> y(c_.m, 0.0);
      for (int i = 0; i < c_.m; ++i) {
        double cb = cost_[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = &binv_[static_cast<size_t>(i) * c_.m];
        for (int k = 0; k < c_.m; ++k) y[k] += cb * row[k];
      }

      int enter = -1;
      double best = 0.0;
      int dir = 0;
      for (int j = 0; j < c_.n; ++j) {
        if (stat_[j] == kBasic) continue;
        if (c_.hi[j] - c_.lo[j] < kPivotTol) continue;  // fixed
        double d = cost_[j];
        for (auto [i, a] : c_.cols[j]) d -= y[i] * a;
        double viol = 0.0;
        int dj = 0;
        if (stat_[j] == kAtLo && d < -kDualTol) {
          viol = -d;
          dj = +1;
        } else if (stat_[j] == kAtHi && d > kDualTol) {
          viol = d;
          dj = -1;
        } else {
          continue;
        }
        if (bland) {
          enter = j;
          best = viol;
          dir = dj;
          break;
        }
        if (viol > best) {
          best = viol;
          enter = j;
          dir = dj;
        }
      }
      if (enter < 0) return LPStatus::Optimal;

      // FTRAN
      std::vector<double> w(c_.m, 0.0);
      for (auto [i, a] : c_.cols[enter])
        for (int r = 0; r < c_.m; ++r)
          w[r] += binv_[static_cast<size_t>(r) * c_.m + i] * a;

      // Ratio test: entering moves by t in direction dir; a bound flip
      // happens when nothing basic blocks before tmax.
      double tmax = c_.hi[enter] - c_.lo[enter];
      int leave_row = -1;
      int leave_to = kAtLo;
      double t = tmax;
      for (int r = 0; r < c_.m; ++r) {
        double alpha = dir * w[r];
        if (std::fabs(alpha) <= kPivotTol) continue;
        int bv = basis_[r];
        double limit;
        int to;
        if (alpha > 0.0) {
          limit = (x_[bv] - c_.lo[bv]) / alpha;
          to = kAtLo;
        } else {
          if (c_.hi[bv] == lp_inf()) continue;
          limit = (x_[bv] - c_.hi[bv]) / alpha;
          to = kAtHi;
        }
        if (limit < 0.0) limit = 0.0;
        bool take = false;
        if (limit < t - 1e-12) {
          take = true;
        } else if (leave_row >= 0 && limit <= t + 1e-12) {
          // Tie-break: Bland by smallest variable index, otherwise by the
          // largest pivot magnitude for stability.
          take = bland ? bv < basis_[leave_row]
                       : std::fabs(alpha) > std::fabs(dir * w[leave_row]);
        }
        if (take) {
          t = std::min(t, limit);
          leave_row = r;
          leave_to = to;
        }
      }
      if (leave_row < 0 && tmax == lp_inf()) {
        if (phase1_)
          throw NumericalBreakdown("simplex: phase-1 ray detected");
        return LPStatus::Unbounded;
      }
      if (leave_row < 0) t = tmax;
      if (t < 0.0) t = 0.0;
      if (best * t < 1e-12)
        ++nonimproving;
      else
        nonimproving = 0;

      // Apply the step.
      x_[enter] += dir * t;
      for (int r = 0; r < c_.m; ++r)
        if (std::fabs(w[r]) > 0.0) x_[basis_[r]] -= dir * t * w[r];

      if (leave_row < 0) {
        // Bound flip, basis unchanged.
        stat_[enter] = (stat_[enter] == kAtLo) ? kAtHi : kAtLo;
        x_[enter] = (stat_[enter] == kAtLo) ? c_.lo[enter] : c_.hi[enter];
        continue;
      }

      int leaving = basis_[leave_row];
      stat_[leaving] = static_cast<VStat>(leave_to);
      x_[leaving] = (leave_to == kAtLo) ? c_.lo[leaving] : c_.hi[leaving];
      basis_[leave_row] = enter;
      stat_[enter] = kBasic;

      // Rank-one update of the dense inverse.
      double piv = w[leave_row];
      if (std::fabs(piv) < kPivotTol) {
        refactorize();
        since_refactor = 0;
        continue;
      }
      double* prow = &binv_[static_cast<size_t>(leave_row) * c_.m];
      for (int k = 0; k < c_.m; ++k) prow[k] /= piv;
      for (int r = 0; r < c_.m; ++r) {
        if (r == leave_row) continue;
        double f = w[r];
        if (std::fabs(f) < 1e-14) continue;
        double* row = &binv_[static_cast<size_t>(r) * c_.m];
        for (int k = 0; k < c_.m; ++k) row[k] -= f * prow[k];
      }
      if (++since_refactor >= kRefactorEvery) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

  // Rebuild binv_ from the basis by Gauss-Jordan and recompute basic values.
  void refactorize() {
    const int m = c_.m;
    std::vector<double> B(static_cast<size_t>(m) * m, 0.0);
    for (int r = 0; r < m; ++r)
      for (auto [i, a] : c_.cols[basis_[r]]) B[static_cast<size_t>(i) * m + r] = a;
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int i = 0; i < m; ++i) binv_[static_cast<size_t>(i) * m + i] = 1.0;
    for (int col = 0; col < m; ++col) {
      int piv = -1;
      double bestv = kPivotTol;
      for (int r = col; r < m; ++r) {
        double v = std::fabs(B[static_cast<size_t>(r) * m + col]);
        if (v > bestv) {
          bestv = v;
          piv = r;
        }
      }
      if (piv < 0)
        throw NumericalBreakdown("simplex: singular basis during refactorization");
      if (piv != col) {
        for (int k = 0; k < m; ++k) {
          std::swap(B[static_cast<size_t>(piv) * m + k], B[static_cast<size_t>(col) * m + k]);
          std::swap(binv_[static_cast<size_t>(piv) * m + k],
                    binv_[static_cast<size_t>(col) * m + k]);
        }
      }
      double d = B[static_cast<size_t>(col) * m + col];
      for (int k = 0; k < m; ++k) {
        B[static_cast<size_t>(col) * m + k] /= d;
        binv_[static_cast<size_t>(col) * m + k] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        double f = B[static_cast<size_t>(r) * m + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          B[static_cast<size_t>(r) * m + k] -= f * B[static_cast<size_t>(col) * m + k];
          binv_[static_cast<size_t>(r) * m + k] -= f * binv_[static_cast<size_t>(col) * m + k];
        }
      }
    }
    // x_B = B^{-1} (b - A_N x_N)
    std::vector<double> rhs = c_.b;
    for (int j = 0; j < c_.n; ++j) {
      if (stat_[j] == kBasic || x_[j] == 0.0) continue;
      for (auto [i, a] : c_.cols[j]) rhs[i] -= a * x_[j];
    }
    for (int r = 0; r < m; ++r) {
      double v = 0.0;
      const double* row = &binv_[static_cast<size_t>(r) * m];
      for (int k = 0; k < m; ++k) v += row[k] * rhs[k];
      x_[basis_[r]] = v;
    }
  }

  Canon c_;
  std::vector<double> x_;
  std::vector<VStat> stat_;
  std::vector<int> basis_;
  std::vector<double> binv_;
  std::vector<double> cost_;
  bool phase1_ = false;
};

Canon canonicalize(const BoundedLP& lp) {
  Canon c;
  const double sgn = (lp.sense == Sense::Maximize) ? -1.0 : 1.0;
  c.vmap.resize(lp.num_vars());
  std::vector<std::vector<std::pair<int, double>>> struct_cols;
  std::vector<double> scost, slo, shi;
  std::vector<double> rhs_shift(lp.rows.size(), 0.0);

  // Row coefficients grouped per original variable.
  std::vector<std::vector<std::pair<int, double>>> by_var(lp.num_vars());
  for (size_t r = 0; r < lp.rows.size(); ++r)
    for (auto [j, a] : lp.rows[r].coefs)
      if (a != 0.0) by_var[j].push_back({static_cast<int>(r), a});

  for (int j = 0; j < lp.num_vars(); ++j) {
    double lo = lp.lower[j], hi = lp.upper[j];
    auto& vm = c.vmap[j];
    if (lo != -lp_inf()) {
      vm.pos = static_cast<int>(scost.size());
      scost.push_back(sgn * lp.objective[j]);
      slo.push_back(lo);
      shi.push_back(hi);
      struct_cols.push_back(by_var[j]);
    } else if (hi == lp_inf()) {
      // Free: x = u - v.
      vm.pos = static_cast<int>(scost.size());
      scost.push_back(sgn * lp.objective[j]);
      slo.push_back(0.0);
      shi.push_back(lp_inf());
      struct_cols.push_back(by_var[j]);
      vm.neg = static_cast<int>(scost.size());
      scost.push_back(-sgn * lp.objective[j]);
      slo.push_back(0.0);
      shi.push_back(lp_inf());
      auto negcol = by_var[j];
      for (auto& [r, a] : negcol) a = -a;
      struct_cols.push_back(negcol);
    } else {
      // (-inf, hi]: mirror x = hi - z with z >= 0.
      vm.mirrored = true;
      vm.shift = hi;
      vm.pos = static_cast<int>(scost.size());
      scost.push_back(-sgn * lp.objective[j]);
      slo.push_back(0.0);
      shi.push_back(lp_inf());
      auto negcol = by_var[j];
      for (auto& [r, a] : negcol) {
        rhs_shift[r] += a * hi;
        a = -a;
      }
      struct_cols.push_back(negcol);
    }
  }

  const int m = static_cast<int>(lp.rows.size());
  c.m = m;
  c.n_struct = static_cast<int>(scost.size());
  c.n_slack = m;
  c.n = c.n_struct + 2 * m;  // slacks + artificials
  c.cols.assign(c.n, {});
  c.cost.assign(c.n, 0.0);
  c.lo.assign(c.n, 0.0);
  c.hi.assign(c.n, lp_inf());
  c.b.assign(m, 0.0);
  c.row_sign.assign(m, 1);

  for (int j = 0; j < c.n_struct; ++j) {
    c.cost[j] = scost[j];
    c.lo[j] = slo[j];
    c.hi[j] = shi[j];
  }
  for (int r = 0; r < m; ++r) {
    double rs = (lp.rows[r].rel == Rel::GE) ? -1.0 : 1.0;
    c.row_sign[r] = static_cast<int>(rs);
    c.b[r] = rs * (lp.rows[r].rhs - rhs_shift[r]);
  }
  for (int j = 0; j < c.n_struct; ++j)
    for (auto [r, a] : struct_cols[j])
      c.cols[j].push_back({r, c.row_sign[r] * a});
  for (int r = 0; r < m; ++r) {
    int s = c.n_struct + r;
    c.cols[s].push_back({r, 1.0});
    if (lp.rows[r].rel == Rel::EQ) c.hi[s] = 0.0;
  }
  // Artificials: columns sized so the all-lower-bound start is feasible.
  std::vector<double> resid = c.b;
  for (int j = 0; j < c.n_struct + c.n_slack; ++j) {
    if (c.lo[j] == 0.0) continue;
    for (auto [r, a] : c.cols[j]) resid[r] -= a * c.lo[j];
  }
  for (int r = 0; r < m; ++r) {
    int a = c.n_struct + c.n_slack + r;
    c.cols[a].push_back({r, resid[r] >= 0.0 ? 1.0 : -1.0});
  }
  return c;
}

}  // namespace

void BoundedLP::validate() const {
  const int n = num_vars();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw ValidationError("lp: bound vectors size mismatch");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(objective[j]) || std::isinf(objective[j]))
      throw ValidationError("lp: bad objective coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw ValidationError("lp: inconsistent bounds");
  }
  for (const auto& row : rows) {
    if (std::isnan(row.rhs) || std::isinf(row.rhs))
      throw ValidationError("lp: bad rhs");
    for (auto [j, a] : row.coefs) {
      if (j < 0 || j >= n) throw ValidationError("lp: row index out of range");
      if (std::isnan(a) || std::isinf(a))
        throw ValidationError("lp: bad row coefficient");
    }
  }
}

LPSolution solve_lp(const BoundedLP& lp) {
  lp.validate();
  LPSolution sol;
  Canon c = canonicalize(lp);
  Simplex sx(c);
  sol.status = sx.run(sol.iterations);
  if (sol.status != LPStatus::Optimal) return sol;

  sol.primal.assign(lp.num_vars(), 0.0);
  const auto& x = sx.x();
  for (int j = 0; j < lp.num_vars(); ++j) {
    const auto& vm = c.vmap[j];
    double v = x[vm.pos];
    if (vm.neg >= 0) v -= x[vm.neg];
    if (vm.mirrored) v = vm.shift - v;
    sol.primal[j] = v;
  }
  sol.objective = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j)
    sol.objective += lp.objective[j] * sol.primal[j];

  // Row duals, mapped back through sense and >=-negation.
  std::vector<double> y = sx.duals();
  sol.dual.assign(lp.rows.size(), 0.0);
  const double sgn = (lp.sense == Sense::Maximize) ? -1.0 : 1.0;
  for (size_t r = 0; r < lp.rows.size(); ++r)
    sol.dual[r] = sgn * c.row_sign[r] * y[r];
  return sol;
}

void write_lp_file(const BoundedLP& lp, std::ostream& os) {
  auto vname = [&](int j) {
    if (j < static_cast<int>(lp.var_labels.size()) && !lp.var_labels[j].empty())
      return lp.var_labels[j];
    return std::string("x") + std::to_string(j);
  };
  os.precision(17);
  os << (lp.sense == Sense::Maximize ? "Maximize" : "Minimize") << "\n obj:";
  for (int j = 0; j < lp.num_vars(); ++j) {
    double v = lp.objective[j];
    if (v == 0.0) continue;
    os << (v >= 0 ? " + " : " - ") << std::fabs(v) << " " << vname(j);
  }
  os << "\nSubject To\n";
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    os << " " << (row.label.empty() ? "c" + std::to_string(r) : row.label) << ":";
    if (row.coefs.empty()) os << " 0 " << vname(0);
    for (auto [j, a] : row.coefs)
      os << (a >= 0 ? " + " : " - ") << std::fabs(a) << " " << vname(j);
    os << (row.rel == Rel::LE ? " <= " : row.rel == Rel::EQ ? " = " : " >= ")
       << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    double lo = lp.lower[j], hi = lp.upper[j];
    if (lo == 0.0 && hi == lp_inf()) continue;
    if (lo == -lp_inf() && hi == lp_inf()) {
      os << " " << vname(j) << " free\n";
      continue;
    }
    if (lo == -lp_inf())
      os << " -inf <= " << vname(j) << " <= " << hi << "\n";
    else if (hi == lp_inf())
      os << " " << vname(j) << " >= " << lo << "\n";
    else
      os << " " << lo << " <= " << vname(j) << " <= " << hi << "\n";
  }
  os << "End\n";
}

}  // namespace rm

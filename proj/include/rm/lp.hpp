#pragma once

#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rm {

struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Sense { Maximize, Minimize };
enum class Rel { LE, EQ, GE };

inline double lp_inf() { return std::numeric_limits<double>::infinity(); }

struct LPRow {
  std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
  Rel rel = Rel::LE;
  double rhs = 0.0;
  std::string label;
};

/** Sparse LP with per-variable bounds.  Bounds may be -inf / +inf; demand
 *  caps such as x <= lambda live here rather than as rows.
 */
struct BoundedLP {
  Sense sense = Sense::Maximize;
  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<LPRow> rows;
  std::vector<std::string> var_labels;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_variable(double obj, double lo, double hi, std::string label = {}) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    var_labels.push_back(std::move(label));
    return num_vars() - 1;
  }

  void add_row(std::vector<std::pair<int, double>> coefs, Rel rel, double rhs,
               std::string label = {}) {
    rows.push_back({std::move(coefs), rel, rhs, std::move(label)});
  }

  void validate() const;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Optimal;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> dual;  // one multiplier per row
  long iterations = 0;
};

/** Two-phase revised simplex with bounded variables; dense basis inverse
 *  refactorized periodically; Dantzig pricing with Bland fallback.
 */
LPSolution solve_lp(const BoundedLP& lp);

// Fixed-format LP text export (CPLEX-style) for external cross-checking.
void write_lp_file(const BoundedLP& lp, std::ostream& os);

}  // namespace rm

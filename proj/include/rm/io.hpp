#pragma once

#include <string>

#include "rm/demand.hpp"
#include "rm/instance.hpp"

namespace rm {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void save_demand_model(const DemandModel& model, const std::string& path);
DemandModel load_demand_model(const std::string& path);

// Instance files embed their demand model.
void save_instance(const NamedInstance& inst, const std::string& path);
NamedInstance load_instance(const std::string& path);

struct CalibrationTarget {
  int K = 0;
  int T = 0;
  std::vector<double> pmf;  // total-demand law on {K..K*T}
};

CalibrationTarget load_calibration_target(const std::string& path);

}  // namespace rm

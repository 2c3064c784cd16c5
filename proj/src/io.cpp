#include "rm/io.hpp"

#include <fstream>

#include <json.hpp>

namespace rm {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << "\n";
}

json demand_to_json(const DemandModel& m) {
  return json{{"K", m.K},
              {"T", m.T},
              {"initial_prev_demand", m.initial_prev_demand},
              {"transition", m.transition}};
}

DemandModel demand_from_json(const json& j, const std::string& where) {
  DemandModel m;
  try {
    m.K = j.at("K").get<int>();
    m.T = j.at("T").get<int>();
    m.initial_prev_demand = j.at("initial_prev_demand").get<int>();
    m.transition = j.at("transition")
                       .get<std::vector<std::vector<std::vector<double>>>>();
  } catch (const std::exception& e) {
    throw ParseError(where + ": demand model: " + e.what());
  }
  m.validate();
  return m;
}

}  // namespace

void save_demand_model(const DemandModel& model, const std::string& path) {
  model.validate();
  write_json(demand_to_json(model), path);
}

DemandModel load_demand_model(const std::string& path) {
  return demand_from_json(read_json(path), path);
}

void save_instance(const NamedInstance& inst, const std::string& path) {
  inst.network.validate_with(inst.demand);
  json products = json::array();
  for (const auto& p : inst.network.products)
    products.push_back({{"revenue", p.revenue}, {"usage", p.usage}});
  json j{{"name", inst.name},
         {"resources", inst.network.capacities},
         {"products", products},
         {"arrivals", inst.network.arrivals},
         {"demand_model", demand_to_json(inst.demand)}};
  if (inst.network.null_product_index)
    j["null_product_index"] = *inst.network.null_product_index;
  write_json(j, path);
}

NamedInstance load_instance(const std::string& path) {
  json j = read_json(path);
  NamedInstance inst;
  try {
    inst.name = j.value("name", path);
    inst.network.capacities = j.at("resources").get<std::vector<int>>();
    for (const auto& pj : j.at("products")) {
      Product p;
      p.revenue = pj.at("revenue").get<double>();
      p.usage = pj.at("usage").get<std::vector<int>>();
      inst.network.products.push_back(std::move(p));
    }
    inst.network.arrivals =
        j.at("arrivals").get<std::vector<std::vector<std::vector<double>>>>();
    if (j.contains("null_product_index"))
      inst.network.null_product_index = j.at("null_product_index").get<int>();
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (j.contains("demand_model")) {
    inst.demand = demand_from_json(j.at("demand_model"), path);
  } else if (j.contains("demand_model_file")) {
    inst.demand = load_demand_model(j.at("demand_model_file").get<std::string>());
  } else {
    throw ParseError(path + ": missing demand_model or demand_model_file");
  }
  inst.network.validate_with(inst.demand);
  return inst;
}

CalibrationTarget load_calibration_target(const std::string& path) {
  json j = read_json(path);
  CalibrationTarget t;
  try {
    t.K = j.at("K").get<int>();
    t.T = j.at("T").get<int>();
    t.pmf = j.at("pmf").get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return t;
}

}  // namespace rm

#include "edgesim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "edgesim/errors.hpp"
#include "json.hpp"

namespace edgesim {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + where + it.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + where + key + "' must be a number");
  return v.get<double>();
}

long get_integer(const json& obj, const std::string& where, const std::string& key,
                 long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + where + key + "' must be an integer");
  return v.get<long>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("'" + where + key + "' must be a boolean");
  return v.get<bool>();
}

void require_positive(double x, const std::string& field) {
  if (!(x > 0.0)) throw ConfigError("'" + field + "' must be positive");
}

void require_nonnegative(double x, const std::string& field) {
  if (!(x >= 0.0)) throw ConfigError("'" + field + "' must be nonnegative");
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  reject_unknown(doc, "",
                 {"topology", "radio", "compute", "controller", "rejo", "traffic",
                  "congestion", "policy", "slots", "seed", "pinned_queue"});

  ExperimentConfig cfg;

  if (doc.contains("topology")) {
    const json& topo = doc.at("topology");
    if (!topo.is_object()) throw ConfigError("'topology' must be an object");
    reject_unknown(topo, "topology.",
                   {"file", "grid_rows", "grid_cols", "coverage_radius", "service_rate",
                    "power_cap"});
    if (topo.contains("file")) {
      cfg.topology.file = topo.at("file").get<std::string>();
    }
    cfg.topology.grid_rows =
        static_cast<int>(get_integer(topo, "topology.", "grid_rows", cfg.topology.grid_rows));
    cfg.topology.grid_cols =
        static_cast<int>(get_integer(topo, "topology.", "grid_cols", cfg.topology.grid_cols));
    cfg.topology.coverage_radius =
        get_number(topo, "topology.", "coverage_radius", cfg.topology.coverage_radius);
    cfg.topology.service_rate =
        get_number(topo, "topology.", "service_rate", cfg.topology.service_rate);
    cfg.topology.power_cap = get_number(topo, "topology.", "power_cap", cfg.topology.power_cap);
    if (!cfg.topology.file) {
      if (cfg.topology.grid_rows < 2 || cfg.topology.grid_cols < 2) {
        throw ConfigError("'topology.grid_rows'/'topology.grid_cols' must be at least 2");
      }
      require_positive(cfg.topology.coverage_radius, "topology.coverage_radius");
      require_positive(cfg.topology.service_rate, "topology.service_rate");
      require_positive(cfg.topology.power_cap, "topology.power_cap");
    }
  }

  if (doc.contains("radio")) {
    const json& radio = doc.at("radio");
    if (!radio.is_object()) throw ConfigError("'radio' must be an object");
    reject_unknown(radio, "radio.",
                   {"bandwidth", "target_rate", "pathloss_constant", "pathloss_exponent",
                    "noise_power", "operational_power", "min_pathloss_distance"});
    cfg.radio.bandwidth = get_number(radio, "radio.", "bandwidth", cfg.radio.bandwidth);
    cfg.radio.target_rate = get_number(radio, "radio.", "target_rate", cfg.radio.target_rate);
    cfg.radio.pathloss_constant =
        get_number(radio, "radio.", "pathloss_constant", cfg.radio.pathloss_constant);
    cfg.radio.pathloss_exponent =
        get_number(radio, "radio.", "pathloss_exponent", cfg.radio.pathloss_exponent);
    cfg.radio.noise_power = get_number(radio, "radio.", "noise_power", cfg.radio.noise_power);
    cfg.radio.operational_power =
        get_number(radio, "radio.", "operational_power", cfg.radio.operational_power);
    cfg.radio.min_pathloss_distance =
        get_number(radio, "radio.", "min_pathloss_distance", cfg.radio.min_pathloss_distance);
  }
  require_positive(cfg.radio.bandwidth, "radio.bandwidth");
  require_positive(cfg.radio.target_rate, "radio.target_rate");
  require_positive(cfg.radio.pathloss_constant, "radio.pathloss_constant");
  require_positive(cfg.radio.pathloss_exponent, "radio.pathloss_exponent");
  require_positive(cfg.radio.noise_power, "radio.noise_power");
  require_nonnegative(cfg.radio.operational_power, "radio.operational_power");
  require_positive(cfg.radio.min_pathloss_distance, "radio.min_pathloss_distance");

  if (doc.contains("compute")) {
    const json& compute = doc.at("compute");
    if (!compute.is_object()) throw ConfigError("'compute' must be an object");
    reject_unknown(compute, "compute.",
                   {"compute_fraction", "utilization_cap", "compute_power_coefficient",
                    "utilization_includes_rho"});
    cfg.compute.compute_fraction =
        get_number(compute, "compute.", "compute_fraction", cfg.compute.compute_fraction);
    cfg.compute.utilization_cap =
        get_number(compute, "compute.", "utilization_cap", cfg.compute.utilization_cap);
    cfg.compute.compute_power_coefficient = get_number(
        compute, "compute.", "compute_power_coefficient", cfg.compute.compute_power_coefficient);
    cfg.compute.utilization_includes_rho = get_bool(
        compute, "compute.", "utilization_includes_rho", cfg.compute.utilization_includes_rho);
  }
  if (!(cfg.compute.compute_fraction > 0.0 && cfg.compute.compute_fraction <= 1.0)) {
    throw ConfigError("'compute.compute_fraction' must lie in (0, 1]");
  }
  if (!(cfg.compute.utilization_cap > 0.0 && cfg.compute.utilization_cap < 1.0)) {
    throw ConfigError("'compute.utilization_cap' must lie in (0, 1)");
  }
  require_nonnegative(cfg.compute.compute_power_coefficient,
                      "compute.compute_power_coefficient");

  if (doc.contains("controller")) {
    const json& ctrl = doc.at("controller");
    if (!ctrl.is_object()) throw ConfigError("'controller' must be an object");
    reject_unknown(ctrl, "controller.", {"tradeoff_V", "power_budget_Q"});
    cfg.controller.tradeoff_v =
        get_number(ctrl, "controller.", "tradeoff_V", cfg.controller.tradeoff_v);
    cfg.controller.power_budget =
        get_number(ctrl, "controller.", "power_budget_Q", cfg.controller.power_budget);
  }
  require_nonnegative(cfg.controller.tradeoff_v, "controller.tradeoff_V");
  require_positive(cfg.controller.power_budget, "controller.power_budget_Q");

  if (doc.contains("rejo")) {
    const json& rejo = doc.at("rejo");
    if (!rejo.is_object()) throw ConfigError("'rejo' must be an object");
    reject_unknown(rejo, "rejo.", {"temperature", "max_iterations", "stall_window"});
    cfg.rejo.temperature = get_number(rejo, "rejo.", "temperature", cfg.rejo.temperature);
    cfg.rejo.max_iterations = static_cast<int>(
        get_integer(rejo, "rejo.", "max_iterations", cfg.rejo.max_iterations));
    cfg.rejo.stall_window =
        static_cast<int>(get_integer(rejo, "rejo.", "stall_window", cfg.rejo.stall_window));
  }
  require_positive(cfg.rejo.temperature, "rejo.temperature");
  if (cfg.rejo.max_iterations < 0) throw ConfigError("'rejo.max_iterations' must be >= 0");
  if (cfg.rejo.stall_window < 0) throw ConfigError("'rejo.stall_window' must be >= 0");

  if (doc.contains("traffic")) {
    const json& traffic = doc.at("traffic");
    if (!traffic.is_object()) throw ConfigError("'traffic' must be an object");
    reject_unknown(traffic, "traffic.", {"mean", "std"});
    if (traffic.contains("mean")) {
      if (traffic.at("mean").is_array()) {
        cfg.traffic_mean_per_region = traffic.at("mean").get<std::vector<double>>();
      } else {
        cfg.traffic_mean = get_number(traffic, "traffic.", "mean", cfg.traffic_mean);
      }
    }
    if (traffic.contains("std")) {
      if (traffic.at("std").is_array()) {
        cfg.traffic_std_per_region = traffic.at("std").get<std::vector<double>>();
      } else {
        cfg.traffic_std = get_number(traffic, "traffic.", "std", cfg.traffic_std);
      }
    }
  }
  require_nonnegative(cfg.traffic_mean, "traffic.mean");
  require_nonnegative(cfg.traffic_std, "traffic.std");
  for (double m : cfg.traffic_mean_per_region) require_nonnegative(m, "traffic.mean");
  for (double s : cfg.traffic_std_per_region) require_nonnegative(s, "traffic.std");

  if (doc.contains("congestion")) {
    const json& cong = doc.at("congestion");
    if (!cong.is_object()) throw ConfigError("'congestion' must be an object");
    reject_unknown(cong, "congestion.", {"kind", "value", "low", "high"});
    const std::string kind = cong.contains("kind") ? cong.at("kind").get<std::string>()
                                                   : std::string("uniform");
    if (kind == "constant") {
      cfg.congestion.kind = CongestionModel::Kind::Constant;
    } else if (kind == "uniform") {
      cfg.congestion.kind = CongestionModel::Kind::Uniform;
    } else {
      throw ConfigError("'congestion.kind' must be 'constant' or 'uniform'");
    }
    cfg.congestion.value = get_number(cong, "congestion.", "value", cfg.congestion.value);
    cfg.congestion.low = get_number(cong, "congestion.", "low", cfg.congestion.low);
    cfg.congestion.high = get_number(cong, "congestion.", "high", cfg.congestion.high);
  }
  require_nonnegative(cfg.congestion.value, "congestion.value");
  require_nonnegative(cfg.congestion.low, "congestion.low");
  if (cfg.congestion.high < cfg.congestion.low) {
    throw ConfigError("'congestion.high' must be >= 'congestion.low'");
  }

  if (doc.contains("policy")) {
    cfg.policy = policy_from_name(doc.at("policy").get<std::string>());
  }
  cfg.slots = static_cast<int>(get_integer(doc, "", "slots", cfg.slots));
  if (cfg.slots <= 0) throw ConfigError("'slots' must be positive");
  cfg.controller.horizon = cfg.slots;
  const long seed = get_integer(doc, "", "seed", static_cast<long>(cfg.seed));
  if (seed < 0) throw ConfigError("'seed' must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  if (doc.contains("pinned_queue") && !doc.at("pinned_queue").is_null()) {
    const double pinned = doc.at("pinned_queue").get<double>();
    require_nonnegative(pinned, "pinned_queue");
    cfg.pinned_queue = pinned;
  }
  return cfg;
}

std::string emit_config(const ExperimentConfig& cfg) {
  ordered_json doc;
  ordered_json topo;
  if (cfg.topology.file) {
    topo["file"] = *cfg.topology.file;
  } else {
    topo["grid_rows"] = cfg.topology.grid_rows;
    topo["grid_cols"] = cfg.topology.grid_cols;
    topo["coverage_radius"] = cfg.topology.coverage_radius;
    topo["service_rate"] = cfg.topology.service_rate;
    topo["power_cap"] = cfg.topology.power_cap;
  }
  doc["topology"] = topo;
  doc["radio"] = {{"bandwidth", cfg.radio.bandwidth},
                  {"target_rate", cfg.radio.target_rate},
                  {"pathloss_constant", cfg.radio.pathloss_constant},
                  {"pathloss_exponent", cfg.radio.pathloss_exponent},
                  {"noise_power", cfg.radio.noise_power},
                  {"operational_power", cfg.radio.operational_power},
                  {"min_pathloss_distance", cfg.radio.min_pathloss_distance}};
  doc["compute"] = {{"compute_fraction", cfg.compute.compute_fraction},
                    {"utilization_cap", cfg.compute.utilization_cap},
                    {"compute_power_coefficient", cfg.compute.compute_power_coefficient},
                    {"utilization_includes_rho", cfg.compute.utilization_includes_rho}};
  doc["controller"] = {{"tradeoff_V", cfg.controller.tradeoff_v},
                       {"power_budget_Q", cfg.controller.power_budget}};
  doc["rejo"] = {{"temperature", cfg.rejo.temperature},
                 {"max_iterations", cfg.rejo.max_iterations},
                 {"stall_window", cfg.rejo.stall_window}};
  ordered_json traffic;
  if (!cfg.traffic_mean_per_region.empty()) {
    traffic["mean"] = cfg.traffic_mean_per_region;
  } else {
    traffic["mean"] = cfg.traffic_mean;
  }
  if (!cfg.traffic_std_per_region.empty()) {
    traffic["std"] = cfg.traffic_std_per_region;
  } else {
    traffic["std"] = cfg.traffic_std;
  }
  doc["traffic"] = traffic;
  ordered_json cong;
  cong["kind"] = cfg.congestion.kind == CongestionModel::Kind::Constant ? "constant" : "uniform";
  if (cfg.congestion.kind == CongestionModel::Kind::Constant) {
    cong["value"] = cfg.congestion.value;
  } else {
    cong["low"] = cfg.congestion.low;
    cong["high"] = cfg.congestion.high;
  }
  doc["congestion"] = cong;
  doc["policy"] = policy_name(cfg.policy);
  doc["slots"] = cfg.slots;
  doc["seed"] = cfg.seed;
  if (cfg.pinned_queue) doc["pinned_queue"] = *cfg.pinned_queue;
  return doc.dump(2) + "\n";
}

RunSpec make_run_spec(const ExperimentConfig& cfg) {
  RunSpec spec;
  if (cfg.topology.file) {
    std::ifstream in(*cfg.topology.file);
    if (!in) throw IoError("cannot open topology file '" + *cfg.topology.file + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    spec.topology = topology_from_json(buffer.str());
  } else {
    spec.topology = build_grid_topology(cfg.topology.grid_rows, cfg.topology.grid_cols,
                                        cfg.topology.coverage_radius,
                                        cfg.topology.service_rate, cfg.topology.power_cap);
  }
  spec.params.radio = cfg.radio;
  spec.params.compute = cfg.compute;
  spec.controller = cfg.controller;
  spec.rejo = cfg.rejo;

  const int regions = spec.topology.num_regions();
  if (!cfg.traffic_mean_per_region.empty()) {
    if (static_cast<int>(cfg.traffic_mean_per_region.size()) != regions) {
      throw ConfigError("'traffic.mean' array length must equal the region count");
    }
    spec.traffic.mean = cfg.traffic_mean_per_region;
  } else {
    spec.traffic.mean.assign(static_cast<std::size_t>(regions), cfg.traffic_mean);
  }
  if (!cfg.traffic_std_per_region.empty()) {
    if (static_cast<int>(cfg.traffic_std_per_region.size()) != regions) {
      throw ConfigError("'traffic.std' array length must equal the region count");
    }
    spec.traffic.std = cfg.traffic_std_per_region;
  } else {
    spec.traffic.std.assign(static_cast<std::size_t>(regions), cfg.traffic_std);
  }
  spec.congestion = cfg.congestion;
  spec.policy = cfg.policy;
  spec.slots = cfg.slots;
  spec.pinned_queue = cfg.pinned_queue;
  return spec;
}

}  // namespace edgesim

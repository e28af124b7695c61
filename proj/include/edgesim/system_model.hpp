#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "edgesim/topology.hpp"

namespace edgesim {

struct RadioParams {
  double bandwidth = 1.0;            // channel bandwidth W
  double target_rate = 2.0;          // downlink rate each served region must get
  double pathloss_constant = 1.0;    // reference gain at unit distance
  double pathloss_exponent = 3.0;
  double noise_power = 1.0;
  double operational_power = 100.0;  // fixed draw of an active station
  double min_pathloss_distance = 0.01;
};

// Optional replacement for the linear compute-power curve: monotone piecewise
// linear samples of g(load). When present the offload solve falls back to a
// numeric search.
struct PowerCurve {
  std::vector<double> load;   // ascending
  std::vector<double> power;  // nondecreasing
  double operator()(double x) const;
};

struct ComputeParams {
  double compute_fraction = 0.5;          // share of traffic that needs computing
  double utilization_cap = 0.9;           // keeps queues strictly stable
  double compute_power_coefficient = 8.0; // linear g(load) slope
  bool utilization_includes_rho = true;
  std::shared_ptr<const PowerCurve> power_curve;  // optional g override
};

struct ModelParams {
  RadioParams radio;
  ComputeParams compute;
};

// Per-slot environment draw.
struct SlotInput {
  std::vector<double> traffic;     // per region
  std::vector<double> congestion;  // per station: round-trip delay factor to the cloud
};

// Activation plus local-processing fraction for every station.
struct Decision {
  std::vector<std::uint8_t> activation;
  std::vector<double> local_fraction;

  Decision() = default;
  Decision(std::vector<std::uint8_t> a, std::vector<double> b);

  // Sleeping stations never process locally.
  void normalize();

  bool operator==(const Decision& other) const = default;
};

struct SlotMetrics {
  std::vector<double> arrivals;      // workload routed to each station
  std::vector<double> power_op;
  std::vector<double> power_tx;
  std::vector<double> power_com;
  std::vector<double> delay_local;
  std::vector<double> delay_remote;
  double power_total = 0.0;
  double delay_total = 0.0;
};

struct FeasibilityReport {
  std::vector<int> uncovered_regions;       // 1-based region ids
  std::vector<int> utilization_violations;  // 1-based station ids
  std::vector<int> power_cap_violations;    // 1-based station ids
  bool feasible() const {
    return uncovered_regions.empty() && utilization_violations.empty() &&
           power_cap_violations.empty();
  }
};

// Workload routed to each station: active coverers of a region split its
// traffic evenly. Throws CoverageError if an occupied region has no coverer.
std::vector<double> bs_arrivals(const Topology& topo,
                                const std::vector<std::uint8_t>& activation,
                                const std::vector<double>& traffic);

// Transmit power each active station spends to deliver the target rate to
// its share of every region it serves.
std::vector<double> transmission_power(const Topology& topo, const RadioParams& radio,
                                       const std::vector<std::uint8_t>& activation,
                                       const std::vector<double>& traffic);

double computation_power(const ComputeParams& compute, double local_fraction,
                         double arrivals);

// Processor-sharing sojourn cost; load must stay below the service rate.
double local_delay(double service_rate, double load);

double remote_delay(const ComputeParams& compute, double local_fraction,
                    double arrivals, double congestion);

SlotMetrics evaluate_slot(const Topology& topo, const ModelParams& params,
                          const Decision& decision, const SlotInput& input);

FeasibilityReport check_feasibility(const Topology& topo, const ModelParams& params,
                                    const Decision& decision, const SlotInput& input);

}  // namespace edgesim

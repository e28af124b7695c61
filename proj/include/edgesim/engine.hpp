#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/system_model.hpp"
#include "edgesim/topology.hpp"

namespace edgesim {

struct ControllerConfig {
  double tradeoff_v = 200.0;     // weight on delay cost against queue pressure
  double power_budget = 1750.0;  // long-term average power target
  long horizon = 200;

  // Sanity notes (budget unreachable or never binding); empty when fine.
  std::vector<std::string> warnings(const Topology& topo) const;
};

struct ControllerState {
  double deficit_queue = 0.0;
  long slot = 0;  // slots completed
};

// Virtual queue tracking accumulated power overuse.
double queue_update(double queue, double power, double budget);

// Per-slot optimization target: v * delay cost + queue * power.
double slot_objective(double v_weight, double deficit_queue, double delay_cost,
                      double power);

// Guaranteed gap to the best achievable delay cost, shrinking as 1/v.
double theorem1_delay_bound(double v_weight, double budget, double sum_power_caps,
                            double best_delay_cost);

// Guaranteed ceiling on long-run average power; needs budget > best_power.
double theorem1_power_bound(double v_weight, double budget, double sum_power_caps,
                            double best_delay_cost, double best_power);

// Anything that can pick a decision for one slot given the queue pressure.
class SlotSolver {
 public:
  virtual ~SlotSolver() = default;
  virtual Decision solve(const Topology& topo, const ModelParams& params,
                         const SlotInput& input, double v_weight, double deficit_q,
                         const Decision& warm_start, std::uint64_t seed) = 0;
};

struct EngineStepResult {
  Decision decision;
  SlotMetrics metrics;
  double objective = 0.0;
  double queue_before = 0.0;
};

// One control round: solve the weighted slot problem, apply it, push the
// power overshoot into the queue.
EngineStepResult engine_step(ControllerState& state, const Topology& topo,
                             const ModelParams& params, const ControllerConfig& ctrl,
                             const SlotInput& input, SlotSolver& solver,
                             const Decision& warm_start, std::uint64_t seed);

}  // namespace edgesim

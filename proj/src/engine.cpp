#include "edgesim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgesim/errors.hpp"

namespace edgesim {

std::vector<std::string> ControllerConfig::warnings(const Topology& topo) const {
  std::vector<std::string> notes;
  double sum_caps = 0.0;
  for (const BaseStation& s : topo.stations()) sum_caps += s.power_cap;
  if (power_budget >= sum_caps) {
    notes.push_back("power budget " + std::to_string(power_budget) +
                    " is at or above the total power cap " + std::to_string(sum_caps) +
                    "; the budget can never bind");
  }
  return notes;
}

double queue_update(double queue, double power, double budget) {
  if (queue < 0.0) throw std::invalid_argument("queue must be nonnegative");
  return std::max(queue + power - budget, 0.0);
}

double slot_objective(double v_weight, double deficit_queue, double delay_cost,
                      double power) {
  return v_weight * delay_cost + deficit_queue * power;
}

double theorem1_delay_bound(double v_weight, double budget, double sum_power_caps,
                            double best_delay_cost) {
  if (v_weight <= 0.0) throw std::invalid_argument("v_weight must be positive");
  const double gap = sum_power_caps - budget;
  return best_delay_cost + gap * gap / (2.0 * v_weight);
}

double theorem1_power_bound(double v_weight, double budget, double sum_power_caps,
                            double best_delay_cost, double best_power) {
  if (budget <= best_power) {
    throw std::domain_error("power bound undefined: budget must exceed best_power");
  }
  const double gap = sum_power_caps - budget;
  return (gap * gap + 2.0 * v_weight * best_delay_cost) / (2.0 * (budget - best_power)) +
         budget;
}

EngineStepResult engine_step(ControllerState& state, const Topology& topo,
                             const ModelParams& params, const ControllerConfig& ctrl,
                             const SlotInput& input, SlotSolver& solver,
                             const Decision& warm_start, std::uint64_t seed) {
  const double q = state.deficit_queue;
  const double total_traffic =
      std::accumulate(input.traffic.begin(), input.traffic.end(), 0.0);

  EngineStepResult out;
  out.queue_before = q;
  // With no queue pressure and nothing for the delay term to separate (zero
  // weight or an idle slot), every feasible decision scores the same; fall
  // back to spending the least power.
  if (q == 0.0 && (ctrl.tradeoff_v == 0.0 || total_traffic == 0.0)) {
    out.decision = solver.solve(topo, params, input, 0.0, 1.0, warm_start, seed);
  } else {
    out.decision = solver.solve(topo, params, input, ctrl.tradeoff_v, q, warm_start, seed);
  }
  out.metrics = evaluate_slot(topo, params, out.decision, input);
  out.objective = slot_objective(ctrl.tradeoff_v, q, out.metrics.delay_total,
                                 out.metrics.power_total);
  state.deficit_queue = queue_update(q, out.metrics.power_total, ctrl.power_budget);
  state.slot += 1;
  return out;
}

}  // namespace edgesim

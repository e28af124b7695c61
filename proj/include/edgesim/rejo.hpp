#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "edgesim/engine.hpp"
#include "edgesim/system_model.hpp"
#include "edgesim/topology.hpp"

namespace edgesim {

struct RejoConfig {
  double temperature = 0.1;
  int max_iterations = 0;  // 0: 50 * N
  int stall_window = 0;    // 0: 10 * N; iterations without an accepted change
  std::uint64_t seed = 1;
};

struct RejoTraceRow {
  int iteration = 0;
  int station = 0;         // 1-based id of the station that moved
  int proposed_mode = 0;   // 0 sleep, 1 active
  double objective = 0.0;  // candidate objective (weighted delay + queue * power)
  double acceptance = 0.0;
  bool accepted = false;
  bool feasible = true;
};

struct RejoTrace {
  std::vector<RejoTraceRow> rows;
  std::vector<double> incumbent;  // chain objective after each iteration
  std::vector<double> best;       // best feasible objective after each iteration
  std::vector<std::uint32_t> incumbent_code;  // activation bitmask (N <= 32 only)
  long messages = 0;              // state-changing accepted moves, i.e. broadcasts
};

// Largest allowed local fraction for one station under the utilization and
// power caps; nullopt when the station breaks its power cap even at b = 0.
std::optional<double> local_fraction_bound(const ComputeParams& compute,
                                           const BaseStation& station, double arrivals,
                                           double power_op, double power_tx);

// Closed-form minimizer of the station's share of the slot objective over
// local fraction in [0, b_max]; numeric fallback with a tabulated power curve.
double inner_offload_solve(double v_weight, double deficit_q, double congestion,
                           double service_rate, double arrivals,
                           const ComputeParams& compute, double b_max);

// Probability of adopting a candidate with objective `candidate` over the
// current `incumbent` at the given temperature; safe for huge exponents.
double acceptance_probability(double candidate, double incumbent, double temperature);

// Boltzmann law exp(-o/tau) over the given states, computed with the usual
// max-shift so large magnitudes do not overflow.
std::vector<double> gibbs_stationary_distribution(const std::vector<double>& objectives,
                                                  double temperature);

using RejoObserver = std::function<void(const Decision&, double objective, bool accepted)>;

// Randomized single-station coordinate search over activations; every state
// carries closed-form-resolved offload fractions (a flip re-solves the moved
// station and the stations sharing a region with it, since their routed load
// changes). Returns the best feasible decision ever visited.
Decision rejo_solve(const Topology& topo, const ModelParams& params,
                    const SlotInput& input, double v_weight, double deficit_q,
                    const Decision& warm_start, const RejoConfig& config,
                    double total_power_cap = std::numeric_limits<double>::infinity(),
                    RejoTrace* trace = nullptr, const RejoObserver& observer = {});

// Global minimizer by full enumeration of activations (N <= 16), ties broken
// toward lower power then lexicographically smaller activation.
Decision exhaustive_oracle(const Topology& topo, const ModelParams& params,
                           const SlotInput& input, double v_weight, double deficit_q);

// Objective of the given activation with every active station's offload
// fraction resolved by the inner solve; nullopt when the pattern is
// infeasible.
std::optional<double> resolved_objective(const Topology& topo, const ModelParams& params,
                                         const SlotInput& input, double v_weight,
                                         double deficit_q,
                                         const std::vector<std::uint8_t>& activation);

class RejoSlotSolver : public SlotSolver {
 public:
  explicit RejoSlotSolver(RejoConfig config) : config_(config) {}
  Decision solve(const Topology& topo, const ModelParams& params, const SlotInput& input,
                 double v_weight, double deficit_q, const Decision& warm_start,
                 std::uint64_t seed) override;
  long messages() const { return messages_; }

 private:
  RejoConfig config_;
  long messages_ = 0;
};

class OracleSlotSolver : public SlotSolver {
 public:
  Decision solve(const Topology& topo, const ModelParams& params, const SlotInput& input,
                 double v_weight, double deficit_q, const Decision& warm_start,
                 std::uint64_t seed) override;
};

}  // namespace edgesim

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/baselines.hpp"
#include "edgesim/engine.hpp"
#include "edgesim/rejo.hpp"
#include "edgesim/rng.hpp"
#include "edgesim/system_model.hpp"
#include "edgesim/topology.hpp"

namespace edgesim {

// Truncated-normal per-region workload.
struct TrafficModel {
  std::vector<double> mean;  // per region
  std::vector<double> std;
  std::vector<double> sample(Rng& rng) const;
};

// Per-station cloud round-trip factor, redrawn each slot.
struct CongestionModel {
  enum class Kind { Constant, Uniform } kind = Kind::Uniform;
  double value = 2.0;  // Constant
  double low = 1.0;    // Uniform
  double high = 3.0;
  std::vector<double> sample(int n, Rng& rng) const;
};

struct TraceRow {
  int t = 0;
  double deficit_queue = 0.0;
  double power_total = 0.0;
  double delay_total = 0.0;
  Decision decision;
  SlotMetrics metrics;
  bool flagged = false;
};

struct RunResult {
  PolicyKind policy = PolicyKind::Engine;
  std::uint64_t seed = 0;
  double power_budget = 0.0;
  std::vector<TraceRow> rows;
  double mean_delay_cost = 0.0;
  double mean_power = 0.0;
  double final_queue = 0.0;
  double mean_sleeping = 0.0;
  double mean_local_fraction = 0.0;  // averaged over active stations and slots
  std::vector<long> sleep_histogram;  // index = stations asleep in a slot
  long messages = 0;
  long flagged_slots = 0;
};

struct RunSpec {
  Topology topology;
  ModelParams params;
  ControllerConfig controller;
  RejoConfig rejo;
  TrafficModel traffic;
  CongestionModel congestion;
  PolicyKind policy = PolicyKind::Engine;
  int slots = 200;
  std::optional<double> pinned_queue;  // diagnostic: hold the queue fixed
};

RunResult run_simulation(const RunSpec& spec, std::uint64_t seed);

// Runs seeds in parallel (bounded by EDGESIM_THREADS) with results ordered by
// seed regardless of scheduling.
std::vector<RunResult> run_batch(const RunSpec& spec, const std::vector<std::uint64_t>& seeds);

struct SweepPoint {
  double value = 0.0;
  double mean_delay_cost = 0.0;
  double mean_power = 0.0;
  double mean_sleeping = 0.0;
  double mean_local_fraction = 0.0;
  double stderr_delay_cost = 0.0;
  double stderr_power = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepPoint> points;
  // Spearman rank correlation of each metric against the swept value.
  std::map<std::string, double> trend;
};

// parameter in {Q, V, tau, traffic_mean, q_pin}; each value is applied on top
// of the base spec, every seed is run, and seed-averaged metrics recorded.
SweepResult sweep(const RunSpec& base, const std::string& parameter,
                  const std::vector<double>& values, const std::vector<std::uint64_t>& seeds);

struct BoundsReport {
  double v_weight = 0.0;
  double budget = 0.0;
  double sum_power_caps = 0.0;
  double c_star_estimate = 0.0;  // delay-only baseline mean cost
  double p_star_estimate = 0.0;  // power-only baseline mean power
  double mean_delay_cost = 0.0;  // controller, seed-averaged
  double mean_power = 0.0;
  double stderr_delay_cost = 0.0;
  double stderr_power = 0.0;
  double delay_bound = 0.0;
  double power_bound = 0.0;
  bool power_bound_applicable = false;
  bool delay_ok = false;
  bool power_ok = false;
  bool telescoping_ok = false;  // q(T)/T >= mean power - Q on every trace
  int seeds = 0;
};

// Runs the controller plus both single-objective baselines over the seeds and
// checks the guaranteed delay/power ceilings and the queue identity.
BoundsReport verify_theorem1(const RunSpec& spec, const std::vector<std::uint64_t>& seeds);

// Fixed small instance whose sampling chain is exactly Markov on activations:
// several stations share one region and offloading is free, so the inner
// solve pins every fraction to zero and the chain objective depends on the
// activation alone.
struct GibbsCheckSetup {
  Topology topology;
  ModelParams params;
  SlotInput input;
  double v_weight = 1.0;
  double deficit_q = 0.05;
};

GibbsCheckSetup make_gibbs_check_setup(int stations = 2);

struct GibbsCheckState {
  std::uint32_t code = 0;  // activation bitmask, bit s = station s+1
  double objective = 0.0;
  double expected = 0.0;   // stationary probability
  double empirical = 0.0;  // visit frequency
};

struct GibbsCheckResult {
  std::vector<GibbsCheckState> states;
  double total_variation = 0.0;
  long iterations = 0;
};

// Runs the sampling chain for the given number of iterations and compares
// visit frequencies against the closed-form stationary law.
GibbsCheckResult gibbs_check(const GibbsCheckSetup& setup, double temperature,
                             long iterations, std::uint64_t seed);

// First iteration (1-based) after which the chain objective stays within
// rel_band of its final value; 1 when it never leaves the band.
long settle_iteration(const std::vector<double>& incumbent, double rel_band);

}  // namespace edgesim

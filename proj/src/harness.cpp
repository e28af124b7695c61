#include "edgesim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "edgesim/errors.hpp"
#include "edgesim/stats.hpp"

namespace edgesim {

namespace {

constexpr std::uint64_t kTrafficStream = 0x11;
constexpr std::uint64_t kCongestionStream = 0x22;
constexpr std::uint64_t kSolverStream = 0x33;

int thread_budget() {
  if (const char* env = std::getenv("EDGESIM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<double> TrafficModel::sample(Rng& rng) const {
  if (mean.size() != std.size()) throw std::invalid_argument("traffic mean/std sizes differ");
  std::vector<double> out(mean.size());
  for (std::size_t m = 0; m < mean.size(); ++m) {
    out[m] = std::max(rng.normal(mean[m], std[m]), 0.0);
  }
  return out;
}

std::vector<double> CongestionModel::sample(int n, Rng& rng) const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& h : out) {
    h = kind == Kind::Constant ? value : rng.uniform(low, high);
  }
  return out;
}

RunResult run_simulation(const RunSpec& spec, std::uint64_t seed) {
  const Topology& topo = spec.topology;
  const int n = topo.num_stations();
  if (spec.slots <= 0) throw std::invalid_argument("slots must be positive");
  if (static_cast<int>(spec.traffic.mean.size()) != topo.num_regions()) {
    throw std::invalid_argument("traffic model size does not match region count");
  }

  Rng traffic_rng(derive_seed(seed, kTrafficStream));
  Rng congestion_rng(derive_seed(seed, kCongestionStream));

  RunResult result;
  result.policy = spec.policy;
  result.seed = seed;
  result.power_budget = spec.controller.power_budget;
  result.rows.reserve(static_cast<std::size_t>(spec.slots));
  result.sleep_histogram.assign(static_cast<std::size_t>(n) + 1, 0);

  RejoSlotSolver rejo_solver(spec.rejo);
  OracleSlotSolver oracle_solver;
  SlotSolver& engine_solver =
      spec.policy == PolicyKind::Oracle ? static_cast<SlotSolver&>(oracle_solver)
                                        : static_cast<SlotSolver&>(rejo_solver);

  ControllerState state;
  if (spec.pinned_queue) state.deficit_queue = *spec.pinned_queue;
  Decision previous(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1),
                    std::vector<double>(static_cast<std::size_t>(n), 0.0));

  double local_fraction_sum = 0.0;
  long local_fraction_count = 0;

  for (int t = 1; t <= spec.slots; ++t) {
    SlotInput input;
    input.traffic = spec.traffic.sample(traffic_rng);
    input.congestion = spec.congestion.sample(n, congestion_rng);
    const std::uint64_t slot_seed =
        derive_seed(derive_seed(seed, kSolverStream), static_cast<std::uint64_t>(t));

    TraceRow row;
    row.t = t;
    row.flagged = false;

    switch (spec.policy) {
      case PolicyKind::Engine:
      case PolicyKind::Oracle: {
        if (spec.pinned_queue) state.deficit_queue = *spec.pinned_queue;
        const EngineStepResult step = engine_step(state, topo, spec.params, spec.controller,
                                                  input, engine_solver, previous, slot_seed);
        row.decision = step.decision;
        row.metrics = step.metrics;
        row.deficit_queue = step.queue_before;
        break;
      }
      case PolicyKind::Stsc: {
        bool flagged = false;
        row.decision = stsc_step(topo, spec.params, input, spec.controller.tradeoff_v,
                                 spec.controller.power_budget, spec.rejo, previous, slot_seed,
                                 &flagged);
        row.metrics = evaluate_slot(topo, spec.params, row.decision, input);
        row.flagged = flagged;
        break;
      }
      case PolicyKind::Pcu: {
        row.decision = pcu_step(topo, spec.params, input, spec.controller.tradeoff_v,
                                spec.rejo, previous, slot_seed);
        row.metrics = evaluate_slot(topo, spec.params, row.decision, input);
        break;
      }
      case PolicyKind::Dcu: {
        row.decision = dcu_step(topo, spec.params, input, spec.rejo, previous, slot_seed);
        row.metrics = evaluate_slot(topo, spec.params, row.decision, input);
        break;
      }
    }

    row.power_total = row.metrics.power_total;
    row.delay_total = row.metrics.delay_total;

    int sleeping = 0;
    for (int s = 0; s < n; ++s) {
      if (row.decision.activation[s]) {
        local_fraction_sum += row.decision.local_fraction[s];
        ++local_fraction_count;
      } else {
        ++sleeping;
      }
    }
    result.sleep_histogram[static_cast<std::size_t>(sleeping)] += 1;
    result.mean_sleeping += sleeping;
    result.mean_delay_cost += row.delay_total;
    result.mean_power += row.power_total;
    if (row.flagged) result.flagged_slots += 1;

    previous = row.decision;
    result.rows.push_back(std::move(row));
  }

  const double slots = static_cast<double>(spec.slots);
  result.mean_delay_cost /= slots;
  result.mean_power /= slots;
  result.mean_sleeping /= slots;
  result.mean_local_fraction =
      local_fraction_count > 0 ? local_fraction_sum / local_fraction_count : 0.0;
  result.final_queue = state.deficit_queue;
  result.messages = rejo_solver.messages();
  return result;
}

std::vector<RunResult> run_batch(const RunSpec& spec, const std::vector<std::uint64_t>& seeds) {
  std::vector<RunResult> results(seeds.size());
  const int workers = std::min<int>(thread_budget(), static_cast<int>(seeds.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) results[i] = run_simulation(spec, seeds[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= seeds.size()) return;
        try {
          results[i] = run_simulation(spec, seeds[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

SweepResult sweep(const RunSpec& base, const std::string& parameter,
                  const std::vector<double>& values, const std::vector<std::uint64_t>& seeds) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");

  SweepResult out;
  out.parameter = parameter;
  for (double value : values) {
    RunSpec spec = base;
    if (parameter == "Q") {
      spec.controller.power_budget = value;
    } else if (parameter == "V") {
      spec.controller.tradeoff_v = value;
    } else if (parameter == "tau") {
      spec.rejo.temperature = value;
    } else if (parameter == "traffic_mean") {
      if (value < 0.0) throw std::invalid_argument("traffic_mean must be nonnegative");
      for (std::size_t m = 0; m < spec.traffic.mean.size(); ++m) {
        const double scale = base.traffic.mean[m] > 0.0 ? value / base.traffic.mean[m] : 0.0;
        spec.traffic.mean[m] = value;
        spec.traffic.std[m] = base.traffic.std[m] * scale;
      }
    } else if (parameter == "q_pin") {
      if (value < 0.0) throw std::invalid_argument("q_pin must be nonnegative");
      spec.pinned_queue = value;
    } else {
      throw std::invalid_argument("unknown sweep parameter '" + parameter +
                                  "' (expected Q, V, tau, traffic_mean or q_pin)");
    }

    const std::vector<RunResult> runs = run_batch(spec, seeds);
    std::vector<double> delay, power, sleeping, local;
    for (const RunResult& r : runs) {
      delay.push_back(r.mean_delay_cost);
      power.push_back(r.mean_power);
      sleeping.push_back(r.mean_sleeping);
      local.push_back(r.mean_local_fraction);
    }
    SweepPoint point;
    point.value = value;
    point.mean_delay_cost = mean(delay);
    point.mean_power = mean(power);
    point.mean_sleeping = mean(sleeping);
    point.mean_local_fraction = mean(local);
    point.stderr_delay_cost = standard_error(delay);
    point.stderr_power = standard_error(power);
    out.points.push_back(point);
  }

  std::vector<double> xs, delay, power, sleeping, local;
  for (const SweepPoint& p : out.points) {
    xs.push_back(p.value);
    delay.push_back(p.mean_delay_cost);
    power.push_back(p.mean_power);
    sleeping.push_back(p.mean_sleeping);
    local.push_back(p.mean_local_fraction);
  }
  out.trend["mean_delay_cost"] = spearman(xs, delay);
  out.trend["mean_power"] = spearman(xs, power);
  out.trend["mean_sleeping"] = spearman(xs, sleeping);
  out.trend["mean_local_fraction"] = spearman(xs, local);
  return out;
}

BoundsReport verify_theorem1(const RunSpec& spec, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("verify_theorem1 needs seeds");

  RunSpec engine_spec = spec;
  engine_spec.policy = spec.policy == PolicyKind::Oracle ? PolicyKind::Oracle
                                                         : PolicyKind::Engine;
  RunSpec pcu_spec = spec;
  pcu_spec.policy = PolicyKind::Pcu;
  RunSpec dcu_spec = spec;
  dcu_spec.policy = PolicyKind::Dcu;

  const std::vector<RunResult> engine_runs = run_batch(engine_spec, seeds);
  const std::vector<RunResult> pcu_runs = run_batch(pcu_spec, seeds);
  const std::vector<RunResult> dcu_runs = run_batch(dcu_spec, seeds);

  std::vector<double> delay, power, c_star, p_star;
  for (const RunResult& r : engine_runs) {
    delay.push_back(r.mean_delay_cost);
    power.push_back(r.mean_power);
  }
  for (const RunResult& r : pcu_runs) c_star.push_back(r.mean_delay_cost);
  for (const RunResult& r : dcu_runs) p_star.push_back(r.mean_power);

  BoundsReport report;
  report.v_weight = spec.controller.tradeoff_v;
  report.budget = spec.controller.power_budget;
  for (const BaseStation& s : spec.topology.stations()) report.sum_power_caps += s.power_cap;
  report.c_star_estimate = mean(c_star);
  report.p_star_estimate = mean(p_star);
  report.mean_delay_cost = mean(delay);
  report.mean_power = mean(power);
  report.stderr_delay_cost = standard_error(delay);
  report.stderr_power = standard_error(power);
  report.seeds = static_cast<int>(seeds.size());

  report.delay_bound = theorem1_delay_bound(report.v_weight, report.budget,
                                            report.sum_power_caps, report.c_star_estimate);
  report.delay_ok = report.mean_delay_cost <= report.delay_bound;

  report.power_bound_applicable = report.budget > report.p_star_estimate;
  if (report.power_bound_applicable) {
    report.power_bound = theorem1_power_bound(report.v_weight, report.budget,
                                              report.sum_power_caps, report.c_star_estimate,
                                              report.p_star_estimate);
    report.power_ok = report.mean_power <= report.power_bound;
  }

  // Queue telescoping: q(T)/T >= mean power - Q holds path by path.
  report.telescoping_ok = true;
  for (const RunResult& r : engine_runs) {
    const double lhs = r.final_queue / static_cast<double>(r.rows.size());
    const double rhs = r.mean_power - spec.controller.power_budget;
    if (lhs < rhs - 1e-9 * std::max(1.0, std::abs(rhs))) report.telescoping_ok = false;
  }
  return report;
}

GibbsCheckSetup make_gibbs_check_setup(int stations) {
  if (stations < 2 || stations > 4) {
    throw std::invalid_argument("gibbs check supports 2 to 4 stations");
  }
  // All stations in range of the single region at distinct distances, so the
  // activation states have distinct powers.
  const double xs[] = {0.6, 0.0, -0.7, 0.0};
  const double ys[] = {0.0, 0.9, 0.0, -0.8};
  std::vector<Region> regions{{1, 0.0, 0.0}};
  std::vector<BaseStation> bss;
  for (int s = 0; s < stations; ++s) {
    bss.push_back({s + 1, xs[s], ys[s], 1.0, 3.0, 1000.0});
  }
  GibbsCheckSetup setup{Topology(regions, bss), ModelParams{}, SlotInput{}, 1.0, 0.05};
  setup.params.radio.operational_power = 1.0;
  setup.input.traffic = {2.0};
  // Free offloading: the inner solve pins every fraction to zero, making the
  // chain exactly Markov on the activation pattern.
  setup.input.congestion.assign(static_cast<std::size_t>(stations), 0.0);
  return setup;
}

GibbsCheckResult gibbs_check(const GibbsCheckSetup& setup, double temperature,
                             long iterations, std::uint64_t seed) {
  if (iterations <= 0) throw std::invalid_argument("iterations must be positive");
  const int n = setup.topology.num_stations();

  GibbsCheckResult result;
  result.iterations = iterations;
  std::vector<double> objectives;
  for (std::uint32_t code = 1; code < (1u << n); ++code) {
    std::vector<std::uint8_t> a(n, 0);
    for (int s = 0; s < n; ++s) a[s] = (code >> s) & 1u;
    const std::optional<double> obj = resolved_objective(
        setup.topology, setup.params, setup.input, setup.v_weight, setup.deficit_q, a);
    if (!obj) continue;
    GibbsCheckState st;
    st.code = code;
    st.objective = *obj;
    result.states.push_back(st);
    objectives.push_back(*obj);
  }
  const std::vector<double> expected = gibbs_stationary_distribution(objectives, temperature);
  for (std::size_t i = 0; i < result.states.size(); ++i) result.states[i].expected = expected[i];

  RejoConfig cfg;
  cfg.temperature = temperature;
  const int iters = static_cast<int>(std::min<long>(iterations, INT_MAX));
  cfg.max_iterations = iters;
  cfg.stall_window = iters;  // never stop early
  cfg.seed = seed;
  RejoTrace trace;
  const Decision warm(std::vector<std::uint8_t>(n, 1), std::vector<double>(n, 0.0));
  rejo_solve(setup.topology, setup.params, setup.input, setup.v_weight, setup.deficit_q,
             warm, cfg, std::numeric_limits<double>::infinity(), &trace);

  std::vector<long> counts(result.states.size(), 0);
  long stray = 0;
  for (std::uint32_t code : trace.incumbent_code) {
    bool found = false;
    for (std::size_t i = 0; i < result.states.size(); ++i) {
      if (result.states[i].code == code) {
        counts[i] += 1;
        found = true;
        break;
      }
    }
    if (!found) stray += 1;
  }
  const double total = static_cast<double>(trace.incumbent_code.size());
  double tv = stray / std::max(total, 1.0);
  for (std::size_t i = 0; i < result.states.size(); ++i) {
    result.states[i].empirical = counts[i] / std::max(total, 1.0);
    tv += std::abs(result.states[i].empirical - result.states[i].expected);
  }
  result.total_variation = 0.5 * tv;
  return result;
}

long settle_iteration(const std::vector<double>& incumbent, double rel_band) {
  if (incumbent.empty()) return 0;
  const double final_value = incumbent.back();
  const double band = rel_band * std::max(1.0, std::abs(final_value));
  long settle = 1;
  for (std::size_t i = 0; i < incumbent.size(); ++i) {
    if (std::abs(incumbent[i] - final_value) > band) settle = static_cast<long>(i) + 2;
  }
  return settle;
}

}  // namespace edgesim

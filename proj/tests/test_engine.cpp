#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "edgesim/engine.hpp"
#include "edgesim/rejo.hpp"
#include "edgesim/system_model.hpp"
#include "edgesim/topology.hpp"

using namespace edgesim;

TEST_CASE("deficit queue recursion") {
  CHECK(queue_update(100.0, 1800.0, 1750.0) == doctest::Approx(150.0));
  CHECK(queue_update(10.0, 100.0, 1750.0) == 0.0);
  CHECK(queue_update(0.0, 1750.0, 1750.0) == 0.0);
  CHECK_THROWS_AS(queue_update(-1.0, 100.0, 1750.0), std::invalid_argument);
}

TEST_CASE("slot objective weighs delay against queued power") {
  CHECK(slot_objective(200.0, 50.0, 118.25, 1240.0) == doctest::Approx(85650.0));
  CHECK(slot_objective(200.0, 0.0, 118.25, 1240.0) == doctest::Approx(23650.0));
  CHECK(slot_objective(0.0, 1.0, 118.25, 1240.0) == doctest::Approx(1240.0));
}

TEST_CASE("guaranteed delay and power ceilings") {
  // gap = 170 - 150 = 20; delay bound adds 400 / (2 * 4) = 50.
  CHECK(theorem1_delay_bound(4.0, 150.0, 170.0, 108.25) == doctest::Approx(158.25));
  // power bound: (400 + 2 * 4 * 108.25) / (2 * (150 - 149)) + 150 = 783.
  CHECK(theorem1_power_bound(4.0, 150.0, 170.0, 108.25, 149.0) == doctest::Approx(783.0));

  // Raising v tightens delay and loosens power.
  CHECK(theorem1_delay_bound(8.0, 150.0, 170.0, 108.25) <
        theorem1_delay_bound(4.0, 150.0, 170.0, 108.25));
  CHECK(theorem1_power_bound(8.0, 150.0, 170.0, 108.25, 149.0) >
        theorem1_power_bound(4.0, 150.0, 170.0, 108.25, 149.0));

  CHECK_THROWS_AS(theorem1_delay_bound(0.0, 150.0, 170.0, 108.25), std::invalid_argument);
  CHECK_THROWS_AS(theorem1_power_bound(4.0, 149.0, 170.0, 108.25, 149.0), std::domain_error);
}

TEST_CASE("budget warnings") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  ControllerConfig fine;
  fine.power_budget = 400.0;
  CHECK(fine.warnings(topo).empty());
  ControllerConfig slack;
  slack.power_budget = 600.0;  // above the 4 * 140 total cap, can never bind
  CHECK_FALSE(slack.warnings(topo).empty());
}

TEST_CASE("engine step is deterministic and accounts the queue") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  ModelParams params;
  ControllerConfig ctrl;
  ctrl.tradeoff_v = 200.0;
  ctrl.power_budget = 400.0;
  SlotInput input{std::vector<double>(9, 1.0), std::vector<double>(4, 2.0)};
  const Decision warm({1, 1, 1, 1}, {0.0, 0.0, 0.0, 0.0});
  RejoSlotSolver solver{RejoConfig{}};

  ControllerState s1, s2;
  const EngineStepResult r1 = engine_step(s1, topo, params, ctrl, input, solver, warm, 7);
  const EngineStepResult r2 = engine_step(s2, topo, params, ctrl, input, solver, warm, 7);
  CHECK(r1.decision == r2.decision);
  CHECK(r1.objective == doctest::Approx(r2.objective));
  CHECK(r1.queue_before == 0.0);
  CHECK(r1.objective ==
        doctest::Approx(slot_objective(200.0, 0.0, r1.metrics.delay_total,
                                       r1.metrics.power_total)));
  CHECK(s1.slot == 1);
  CHECK(s1.deficit_queue ==
        doctest::Approx(queue_update(0.0, r1.metrics.power_total, 400.0)));

  // Second slot starts from the accumulated queue.
  const EngineStepResult r3 = engine_step(s1, topo, params, ctrl, input, solver,
                                          r1.decision, 8);
  CHECK(r3.queue_before == doctest::Approx(queue_update(0.0, r1.metrics.power_total, 400.0)));
  CHECK(s1.slot == 2);
}

TEST_CASE("queue pressure pushes power down") {
  const Topology topo = build_grid_topology(5, 5, 1.0, 3.0, 140.0);
  ModelParams params;
  ControllerConfig ctrl;
  ctrl.tradeoff_v = 200.0;
  ctrl.power_budget = 1200.0;
  SlotInput input{std::vector<double>(25, 6.0), std::vector<double>(16, 2.0)};
  const Decision warm(std::vector<std::uint8_t>(16, 1), std::vector<double>(16, 0.0));
  RejoSlotSolver solver{RejoConfig{}};

  ControllerState relaxed;
  const EngineStepResult low = engine_step(relaxed, topo, params, ctrl, input, solver, warm, 3);
  ControllerState pressured;
  pressured.deficit_queue = 500.0;
  const EngineStepResult high =
      engine_step(pressured, topo, params, ctrl, input, solver, warm, 3);
  CHECK(high.metrics.power_total < low.metrics.power_total);
  CHECK(high.metrics.delay_total > low.metrics.delay_total);
}

TEST_CASE("degenerate zero-weight slot falls back to minimum power") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  ModelParams params;
  ControllerConfig ctrl;
  ctrl.tradeoff_v = 0.0;
  ctrl.power_budget = 400.0;
  SlotInput input{std::vector<double>(9, 1.0), std::vector<double>(4, 2.0)};
  const Decision warm({1, 1, 1, 1}, {0.0, 0.0, 0.0, 0.0});
  RejoSlotSolver solver{RejoConfig{}};

  ControllerState state;  // queue 0 and v 0: every decision scores 0
  const EngineStepResult r = engine_step(state, topo, params, ctrl, input, solver, warm, 1);
  // All four stations are needed for coverage; minimum power keeps b at 0.
  CHECK(r.decision.activation == std::vector<std::uint8_t>{1, 1, 1, 1});
  for (double b : r.decision.local_fraction) CHECK(b == 0.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "edgesim/errors.hpp"
#include "edgesim/system_model.hpp"
#include "edgesim/topology.hpp"

using namespace edgesim;

namespace {

Topology single_link(double distance, double radius) {
  std::vector<Region> regions{{1, 0.0, 0.0}};
  std::vector<BaseStation> stations{{1, distance, 0.0, radius, 3.0, 1000.0}};
  return Topology(regions, stations);
}

}  // namespace

TEST_CASE("arrivals split traffic evenly across active coverers") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  const std::vector<double> traffic(9, 1.0);

  // Each station serves one corner (1/1), two edges (1/2) and the center (1/4).
  const std::vector<double> a = bs_arrivals(topo, {1, 1, 1, 1}, traffic);
  for (double x : a) CHECK(x == doctest::Approx(2.25).epsilon(1e-12));

  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  CHECK(total == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("arrivals conserve traffic under partial activation") {
  const Topology topo = build_grid_topology(5, 5, 1.0, 3.0, 140.0);
  std::vector<double> traffic(25);
  for (int m = 0; m < 25; ++m) traffic[m] = 0.25 * (m + 1);
  // The 9-station pattern that still covers every region.
  std::vector<std::uint8_t> act(16, 0);
  for (int r : {0, 2, 3}) {
    for (int c : {0, 2, 3}) act[r * 4 + c] = 1;
  }
  REQUIRE(coverage_feasible(topo, act));
  const std::vector<double> a = bs_arrivals(topo, act, traffic);
  const double total_in = std::accumulate(traffic.begin(), traffic.end(), 0.0);
  const double total_out = std::accumulate(a.begin(), a.end(), 0.0);
  CHECK(total_out == doctest::Approx(total_in).epsilon(1e-12));
  for (int n = 0; n < 16; ++n) {
    if (!act[n]) CHECK(a[n] == 0.0);
  }
}

TEST_CASE("uncovered region raises CoverageError with its id") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  const std::vector<double> traffic(9, 1.0);
  try {
    bs_arrivals(topo, {0, 1, 1, 1}, traffic);
    FAIL("expected CoverageError");
  } catch (const CoverageError& e) {
    CHECK(e.region_id() == 1);
  }
  CHECK_THROWS_AS(bs_arrivals(topo, {1, 1, 1, 1}, std::vector<double>(9, -1.0)),
                  std::invalid_argument);
}

TEST_CASE("transmission power matches the rate inversion") {
  // One station two units away from the lone region: factor (2^(r/W)-1) = 1,
  // pathloss d^4 = 16, unit noise and gain -> 16 per unit of traffic.
  const Topology topo = single_link(2.0, 2.5);
  RadioParams radio;
  radio.bandwidth = 1.0;
  radio.target_rate = 1.0;
  radio.pathloss_exponent = 4.0;
  const std::vector<double> tx = transmission_power(topo, radio, {1}, {1.0});
  CHECK(tx[0] == doctest::Approx(16.0).epsilon(1e-12));

  // Doubling traffic doubles the draw; halving the rate shrinks the factor.
  CHECK(transmission_power(topo, radio, {1}, {2.0})[0] == doctest::Approx(32.0).epsilon(1e-12));
  radio.target_rate = 0.5;
  const double factor = std::exp2(0.5) - 1.0;
  CHECK(transmission_power(topo, radio, {1}, {1.0})[0] ==
        doctest::Approx(16.0 * factor).epsilon(1e-12));
}

TEST_CASE("transmission power on the shared grid") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  RadioParams radio;  // rate 2, bandwidth 1 -> factor 3; d^3 = 0.5^1.5
  const std::vector<double> tx =
      transmission_power(topo, radio, {1, 1, 1, 1}, std::vector<double>(9, 1.0));
  const double expected = 3.0 * std::pow(0.5, 1.5) * 2.25;
  for (double x : tx) CHECK(x == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(2.386485386504598).epsilon(1e-12));
}

TEST_CASE("computation power is linear in the compute load") {
  ComputeParams compute;
  compute.compute_fraction = 0.3;
  compute.compute_power_coefficient = 1.5;
  CHECK(computation_power(compute, 0.4, 7.0) == doctest::Approx(1.26).epsilon(1e-12));
  CHECK(computation_power(compute, 0.0, 7.0) == 0.0);
}

TEST_CASE("tabulated power curve interpolates and clamps") {
  ComputeParams compute;
  compute.compute_fraction = 1.0;
  auto curve = std::make_shared<PowerCurve>();
  curve->load = {0.0, 1.0, 2.0};
  curve->power = {0.0, 4.0, 6.0};
  compute.power_curve = curve;
  CHECK(computation_power(compute, 0.5, 1.0) == doctest::Approx(2.0));
  CHECK(computation_power(compute, 1.0, 1.5) == doctest::Approx(5.0));
  CHECK(computation_power(compute, 1.0, 9.0) == doctest::Approx(6.0));
  CHECK((*curve)(-1.0) == doctest::Approx(0.0));

  PowerCurve bad;
  bad.load = {0.0, 1.0};
  bad.power = {0.0};
  CHECK_THROWS_AS(bad(0.5), std::invalid_argument);
}

TEST_CASE("delay terms") {
  CHECK(local_delay(3.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(local_delay(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(local_delay(3.0, 3.0), OverloadError);
  CHECK_THROWS_AS(local_delay(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(local_delay(3.0, -0.1), std::invalid_argument);

  ComputeParams compute;
  compute.compute_fraction = 0.2;
  CHECK(remote_delay(compute, 0.25, 8.0, 1.5) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(remote_delay(compute, 1.0, 8.0, 1.5) == 0.0);
}

TEST_CASE("slot evaluation composes the pieces") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  ModelParams params;
  SlotInput input{std::vector<double>(9, 1.0), std::vector<double>(4, 2.0)};
  const Decision all_on({1, 1, 1, 1}, {0.0, 0.0, 0.0, 0.0});

  const SlotMetrics m = evaluate_slot(topo, params, all_on, input);
  // Zero local fractions: delay is purely remote, 0.5 * 2.25 * 2 per station.
  CHECK(m.delay_total == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(m.power_total == doctest::Approx(409.5459415460184).epsilon(1e-12));
  for (int n = 0; n < 4; ++n) {
    CHECK(m.power_op[n] == doctest::Approx(100.0));
    CHECK(m.power_com[n] == 0.0);
    CHECK(m.delay_local[n] == 0.0);
  }

  // Processing locally adds compute power and queueing delay, removes remote.
  const Decision local({1, 1, 1, 1}, {1.0, 1.0, 1.0, 1.0});
  const SlotMetrics ml = evaluate_slot(topo, params, local, input);
  const double load = 0.5 * 2.25;
  CHECK(ml.delay_local[0] == doctest::Approx(load / (3.0 - load)).epsilon(1e-12));
  CHECK(ml.delay_remote[0] == 0.0);
  CHECK(ml.power_com[0] == doctest::Approx(8.0 * load).epsilon(1e-12));

  CHECK_THROWS_AS(evaluate_slot(topo, params, Decision({1, 1, 1, 1}, {2.0, 0.0, 0.0, 0.0}),
                                input),
                  std::invalid_argument);
}

TEST_CASE("sleeping stations are normalized to zero fraction") {
  Decision d({0, 1}, {0.7, 0.3});
  CHECK(d.local_fraction[0] == 0.0);
  CHECK(d.local_fraction[1] == doctest::Approx(0.3));
  CHECK_THROWS_AS(Decision({1}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("feasibility report flags utilization and power caps") {
  const Topology topo = build_grid_topology(3, 3, 1.0, 3.0, 140.0);
  ModelParams params;
  SlotInput heavy{std::vector<double>(9, 3.0), std::vector<double>(4, 2.0)};
  const Decision all_local({1, 1, 1, 1}, {1.0, 1.0, 1.0, 1.0});

  // Load 0.5 * 6.75 = 3.375 exceeds the utilization cap 0.9 * 3 = 2.7.
  const FeasibilityReport r = check_feasibility(topo, params, all_local, heavy);
  CHECK_FALSE(r.feasible());
  CHECK(r.utilization_violations == std::vector<int>{1, 2, 3, 4});
  CHECK(r.uncovered_regions.empty());

  const FeasibilityReport ok = check_feasibility(
      topo, params, Decision({1, 1, 1, 1}, {0.0, 0.0, 0.0, 0.0}),
      SlotInput{std::vector<double>(9, 1.0), std::vector<double>(4, 2.0)});
  CHECK(ok.feasible());

  // A cap below the operational draw trips every active station.
  const Topology tight = build_grid_topology(3, 3, 1.0, 3.0, 99.0);
  const FeasibilityReport rp = check_feasibility(
      tight, params, Decision({1, 1, 1, 1}, {0.0, 0.0, 0.0, 0.0}),
      SlotInput{std::vector<double>(9, 1.0), std::vector<double>(4, 2.0)});
  CHECK(rp.power_cap_violations == std::vector<int>{1, 2, 3, 4});

  const FeasibilityReport rc =
      check_feasibility(topo, params, Decision({0, 1, 1, 1}, {0.0, 0.0, 0.0, 0.0}),
                        SlotInput{std::vector<double>(9, 1.0), std::vector<double>(4, 2.0)});
  CHECK(rc.uncovered_regions == std::vector<int>{1});
}

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/baselines.hpp"
#include "edgesim/config.hpp"
#include "edgesim/engine.hpp"
#include "edgesim/errors.hpp"
#include "edgesim/harness.hpp"
#include "edgesim/rejo.hpp"
#include "edgesim/stats.hpp"
#include "edgesim/system_model.hpp"
#include "edgesim/topology.hpp"
#include "edgesim/trace_io.hpp"

namespace py = pybind11;
using namespace edgesim;

PYBIND11_MODULE(_edgesim, m) {
  m.doc() = "base-station activation and computation-offload control simulator";

  py::register_exception<InfeasibleInstanceError>(m, "InfeasibleError");
  py::register_exception<CoverageError>(m, "CoverageError");
  py::register_exception<IoError>(m, "IoError");

  // ---- topology ----
  py::class_<Region>(m, "Region")
      .def(py::init([](int id, double x, double y) { return Region{id, x, y}; }),
           py::arg("id"), py::arg("x"), py::arg("y"))
      .def_readwrite("id", &Region::id)
      .def_readwrite("x", &Region::x)
      .def_readwrite("y", &Region::y);

  py::class_<BaseStation>(m, "BaseStation")
      .def(py::init([](int id, double x, double y, double radius, double rate, double cap) {
             return BaseStation{id, x, y, radius, rate, cap};
           }),
           py::arg("id"), py::arg("x"), py::arg("y"), py::arg("coverage_radius"),
           py::arg("service_rate"), py::arg("power_cap"))
      .def_readwrite("id", &BaseStation::id)
      .def_readwrite("x", &BaseStation::x)
      .def_readwrite("y", &BaseStation::y)
      .def_readwrite("coverage_radius", &BaseStation::coverage_radius)
      .def_readwrite("service_rate", &BaseStation::service_rate)
      .def_readwrite("power_cap", &BaseStation::power_cap);

  py::class_<Topology>(m, "Topology")
      .def(py::init<std::vector<Region>, std::vector<BaseStation>>(), py::arg("regions"),
           py::arg("stations"))
      .def_property_readonly("num_regions", &Topology::num_regions)
      .def_property_readonly("num_stations", &Topology::num_stations)
      .def("regions", &Topology::regions, py::return_value_policy::reference_internal)
      .def("stations", &Topology::stations, py::return_value_policy::reference_internal)
      .def("coverers", &Topology::coverers, py::arg("region"),
           py::return_value_policy::reference_internal)
      .def("covered_regions", &Topology::covered_regions, py::arg("station"),
           py::return_value_policy::reference_internal)
      .def("distance", &Topology::distance, py::arg("station"), py::arg("region"))
      .def("covers", &Topology::covers, py::arg("station"), py::arg("region"))
      .def("to_json", [](const Topology& t) { return topology_to_json(t); });

  m.def("build_grid_topology", &build_grid_topology, py::arg("rows"), py::arg("cols"),
        py::arg("coverage_radius") = 1.0, py::arg("service_rate") = 3.0,
        py::arg("power_cap") = 140.0);
  m.def("topology_from_json", &topology_from_json, py::arg("text"));
  m.def("coverage_feasible", &coverage_feasible, py::arg("topology"), py::arg("activation"));
  m.def("minimum_cover_size", &minimum_cover_size, py::arg("topology"));

  // ---- system model ----
  py::class_<RadioParams>(m, "RadioParams")
      .def(py::init<>())
      .def_readwrite("bandwidth", &RadioParams::bandwidth)
      .def_readwrite("target_rate", &RadioParams::target_rate)
      .def_readwrite("pathloss_constant", &RadioParams::pathloss_constant)
      .def_readwrite("pathloss_exponent", &RadioParams::pathloss_exponent)
      .def_readwrite("noise_power", &RadioParams::noise_power)
      .def_readwrite("operational_power", &RadioParams::operational_power)
      .def_readwrite("min_pathloss_distance", &RadioParams::min_pathloss_distance);

  py::class_<ComputeParams>(m, "ComputeParams")
      .def(py::init<>())
      .def_readwrite("compute_fraction", &ComputeParams::compute_fraction)
      .def_readwrite("utilization_cap", &ComputeParams::utilization_cap)
      .def_readwrite("compute_power_coefficient", &ComputeParams::compute_power_coefficient)
      .def_readwrite("utilization_includes_rho", &ComputeParams::utilization_includes_rho);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("radio", &ModelParams::radio)
      .def_readwrite("compute", &ModelParams::compute);

  py::class_<SlotInput>(m, "SlotInput")
      .def(py::init<>())
      .def(py::init([](std::vector<double> traffic, std::vector<double> congestion) {
             SlotInput in;
             in.traffic = std::move(traffic);
             in.congestion = std::move(congestion);
             return in;
           }),
           py::arg("traffic"), py::arg("congestion"))
      .def_readwrite("traffic", &SlotInput::traffic)
      .def_readwrite("congestion", &SlotInput::congestion);

  py::class_<Decision>(m, "Decision")
      .def(py::init<>())
      .def(py::init<std::vector<std::uint8_t>, std::vector<double>>(), py::arg("activation"),
           py::arg("local_fraction"))
      .def_readwrite("activation", &Decision::activation)
      .def_readwrite("local_fraction", &Decision::local_fraction)
      .def("normalize", &Decision::normalize)
      .def(py::self == py::self);

  py::class_<SlotMetrics>(m, "SlotMetrics")
      .def_readonly("arrivals", &SlotMetrics::arrivals)
      .def_readonly("power_op", &SlotMetrics::power_op)
      .def_readonly("power_tx", &SlotMetrics::power_tx)
      .def_readonly("power_com", &SlotMetrics::power_com)
      .def_readonly("delay_local", &SlotMetrics::delay_local)
      .def_readonly("delay_remote", &SlotMetrics::delay_remote)
      .def_readonly("power_total", &SlotMetrics::power_total)
      .def_readonly("delay_total", &SlotMetrics::delay_total);

  py::class_<FeasibilityReport>(m, "FeasibilityReport")
      .def_readonly("uncovered_regions", &FeasibilityReport::uncovered_regions)
      .def_readonly("utilization_violations", &FeasibilityReport::utilization_violations)
      .def_readonly("power_cap_violations", &FeasibilityReport::power_cap_violations)
      .def("feasible", &FeasibilityReport::feasible);

  m.def("bs_arrivals", &bs_arrivals, py::arg("topology"), py::arg("activation"),
        py::arg("traffic"));
  m.def("transmission_power", &transmission_power, py::arg("topology"), py::arg("radio"),
        py::arg("activation"), py::arg("traffic"));
  m.def("computation_power", &computation_power, py::arg("compute"),
        py::arg("local_fraction"), py::arg("arrivals"));
  m.def("local_delay", &local_delay, py::arg("service_rate"), py::arg("load"));
  m.def("remote_delay", &remote_delay, py::arg("compute"), py::arg("local_fraction"),
        py::arg("arrivals"), py::arg("congestion"));
  m.def("evaluate_slot", &evaluate_slot, py::arg("topology"), py::arg("params"),
        py::arg("decision"), py::arg("input"));
  m.def("check_feasibility", &check_feasibility, py::arg("topology"), py::arg("params"),
        py::arg("decision"), py::arg("input"));

  // ---- controller ----
  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_readwrite("tradeoff_v", &ControllerConfig::tradeoff_v)
      .def_readwrite("power_budget", &ControllerConfig::power_budget)
      .def_readwrite("horizon", &ControllerConfig::horizon)
      .def("warnings", &ControllerConfig::warnings, py::arg("topology"));

  py::class_<ControllerState>(m, "ControllerState")
      .def(py::init<>())
      .def_readwrite("deficit_queue", &ControllerState::deficit_queue)
      .def_readwrite("slot", &ControllerState::slot);

  py::class_<EngineStepResult>(m, "EngineStepResult")
      .def_readonly("decision", &EngineStepResult::decision)
      .def_readonly("metrics", &EngineStepResult::metrics)
      .def_readonly("objective", &EngineStepResult::objective)
      .def_readonly("queue_before", &EngineStepResult::queue_before);

  m.def("queue_update", &queue_update, py::arg("queue"), py::arg("power"), py::arg("budget"));
  m.def("slot_objective", &slot_objective, py::arg("v_weight"), py::arg("deficit_queue"),
        py::arg("delay_cost"), py::arg("power"));
  m.def("theorem1_delay_bound", &theorem1_delay_bound, py::arg("v_weight"), py::arg("budget"),
        py::arg("sum_power_caps"), py::arg("best_delay_cost"));
  m.def("theorem1_power_bound", &theorem1_power_bound, py::arg("v_weight"), py::arg("budget"),
        py::arg("sum_power_caps"), py::arg("best_delay_cost"), py::arg("best_power"));
  m.def(
      "engine_step",
      [](ControllerState& state, const Topology& topo, const ModelParams& params,
         const ControllerConfig& ctrl, const SlotInput& input, const RejoConfig& rejo,
         const Decision& warm_start, std::uint64_t seed, bool use_oracle) {
        if (use_oracle) {
          OracleSlotSolver solver;
          return engine_step(state, topo, params, ctrl, input, solver, warm_start, seed);
        }
        RejoSlotSolver solver(rejo);
        return engine_step(state, topo, params, ctrl, input, solver, warm_start, seed);
      },
      py::arg("state"), py::arg("topology"), py::arg("params"), py::arg("controller"),
      py::arg("input"), py::arg("rejo"), py::arg("warm_start"), py::arg("seed"),
      py::arg("use_oracle") = false);

  // ---- randomized search ----
  py::class_<RejoConfig>(m, "RejoConfig")
      .def(py::init<>())
      .def_readwrite("temperature", &RejoConfig::temperature)
      .def_readwrite("max_iterations", &RejoConfig::max_iterations)
      .def_readwrite("stall_window", &RejoConfig::stall_window)
      .def_readwrite("seed", &RejoConfig::seed);

  py::class_<RejoTraceRow>(m, "RejoTraceRow")
      .def_readonly("iteration", &RejoTraceRow::iteration)
      .def_readonly("station", &RejoTraceRow::station)
      .def_readonly("proposed_mode", &RejoTraceRow::proposed_mode)
      .def_readonly("objective", &RejoTraceRow::objective)
      .def_readonly("acceptance", &RejoTraceRow::acceptance)
      .def_readonly("accepted", &RejoTraceRow::accepted)
      .def_readonly("feasible", &RejoTraceRow::feasible);

  py::class_<RejoTrace>(m, "RejoTrace")
      .def_readonly("rows", &RejoTrace::rows)
      .def_readonly("incumbent", &RejoTrace::incumbent)
      .def_readonly("best", &RejoTrace::best)
      .def_readonly("incumbent_code", &RejoTrace::incumbent_code)
      .def_readonly("messages", &RejoTrace::messages);

  m.def(
      "rejo_solve",
      [](const Topology& topo, const ModelParams& params, const SlotInput& input,
         double v_weight, double deficit_q, const Decision& warm_start,
         const RejoConfig& config, double total_power_cap, bool return_trace) -> py::object {
        if (!return_trace) {
          return py::cast(rejo_solve(topo, params, input, v_weight, deficit_q, warm_start,
                                     config, total_power_cap));
        }
        RejoTrace trace;
        Decision d = rejo_solve(topo, params, input, v_weight, deficit_q, warm_start, config,
                                total_power_cap, &trace);
        return py::make_tuple(py::cast(d), py::cast(trace));
      },
      py::arg("topology"), py::arg("params"), py::arg("input"), py::arg("v_weight"),
      py::arg("deficit_q"), py::arg("warm_start"), py::arg("config"),
      py::arg("total_power_cap") = std::numeric_limits<double>::infinity(),
      py::arg("return_trace") = false);
  m.def("exhaustive_oracle", &exhaustive_oracle, py::arg("topology"), py::arg("params"),
        py::arg("input"), py::arg("v_weight"), py::arg("deficit_q"));
  m.def("resolved_objective", &resolved_objective, py::arg("topology"), py::arg("params"),
        py::arg("input"), py::arg("v_weight"), py::arg("deficit_q"), py::arg("activation"));
  m.def("local_fraction_bound", &local_fraction_bound, py::arg("compute"), py::arg("station"),
        py::arg("arrivals"), py::arg("power_op"), py::arg("power_tx"));
  m.def("inner_offload_solve", &inner_offload_solve, py::arg("v_weight"), py::arg("deficit_q"),
        py::arg("congestion"), py::arg("service_rate"), py::arg("arrivals"),
        py::arg("compute"), py::arg("b_max"));
  m.def("acceptance_probability", &acceptance_probability, py::arg("candidate"),
        py::arg("incumbent"), py::arg("temperature"));
  m.def("gibbs_stationary_distribution", &gibbs_stationary_distribution,
        py::arg("objectives"), py::arg("temperature"));

  // ---- baselines ----
  py::enum_<PolicyKind>(m, "PolicyKind")
      .value("ENGINE", PolicyKind::Engine)
      .value("STSC", PolicyKind::Stsc)
      .value("PCU", PolicyKind::Pcu)
      .value("DCU", PolicyKind::Dcu)
      .value("ORACLE", PolicyKind::Oracle);
  m.def("policy_from_name", &policy_from_name, py::arg("name"));
  m.def("policy_name", &policy_name, py::arg("kind"));

  // ---- harness ----
  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("t", &TraceRow::t)
      .def_readonly("deficit_queue", &TraceRow::deficit_queue)
      .def_readonly("power_total", &TraceRow::power_total)
      .def_readonly("delay_total", &TraceRow::delay_total)
      .def_readonly("decision", &TraceRow::decision)
      .def_readonly("metrics", &TraceRow::metrics)
      .def_readonly("flagged", &TraceRow::flagged);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("policy", &RunResult::policy)
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("power_budget", &RunResult::power_budget)
      .def_readonly("rows", &RunResult::rows)
      .def_readonly("mean_delay_cost", &RunResult::mean_delay_cost)
      .def_readonly("mean_power", &RunResult::mean_power)
      .def_readonly("final_queue", &RunResult::final_queue)
      .def_readonly("mean_sleeping", &RunResult::mean_sleeping)
      .def_readonly("mean_local_fraction", &RunResult::mean_local_fraction)
      .def_readonly("sleep_histogram", &RunResult::sleep_histogram)
      .def_readonly("messages", &RunResult::messages)
      .def_readonly("flagged_slots", &RunResult::flagged_slots)
      .def("summary_json", [](const RunResult& r) { return summary_to_json(r); })
      .def("write_trace", [](const RunResult& r, const std::string& path) {
        write_trace(r, path);
      });

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("value", &SweepPoint::value)
      .def_readonly("mean_delay_cost", &SweepPoint::mean_delay_cost)
      .def_readonly("mean_power", &SweepPoint::mean_power)
      .def_readonly("mean_sleeping", &SweepPoint::mean_sleeping)
      .def_readonly("mean_local_fraction", &SweepPoint::mean_local_fraction)
      .def_readonly("stderr_delay_cost", &SweepPoint::stderr_delay_cost)
      .def_readonly("stderr_power", &SweepPoint::stderr_power);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("parameter", &SweepResult::parameter)
      .def_readonly("points", &SweepResult::points)
      .def_readonly("trend", &SweepResult::trend)
      .def("to_json", [](const SweepResult& r) { return sweep_to_json(r); });

  py::class_<BoundsReport>(m, "BoundsReport")
      .def_readonly("v_weight", &BoundsReport::v_weight)
      .def_readonly("budget", &BoundsReport::budget)
      .def_readonly("sum_power_caps", &BoundsReport::sum_power_caps)
      .def_readonly("c_star_estimate", &BoundsReport::c_star_estimate)
      .def_readonly("p_star_estimate", &BoundsReport::p_star_estimate)
      .def_readonly("mean_delay_cost", &BoundsReport::mean_delay_cost)
      .def_readonly("mean_power", &BoundsReport::mean_power)
      .def_readonly("stderr_delay_cost", &BoundsReport::stderr_delay_cost)
      .def_readonly("stderr_power", &BoundsReport::stderr_power)
      .def_readonly("delay_bound", &BoundsReport::delay_bound)
      .def_readonly("power_bound", &BoundsReport::power_bound)
      .def_readonly("power_bound_applicable", &BoundsReport::power_bound_applicable)
      .def_readonly("delay_ok", &BoundsReport::delay_ok)
      .def_readonly("power_ok", &BoundsReport::power_ok)
      .def_readonly("telescoping_ok", &BoundsReport::telescoping_ok)
      .def_readonly("seeds", &BoundsReport::seeds)
      .def("to_json", [](const BoundsReport& r) { return bounds_to_json(r); });

  py::class_<GibbsCheckState>(m, "GibbsCheckState")
      .def_readonly("code", &GibbsCheckState::code)
      .def_readonly("objective", &GibbsCheckState::objective)
      .def_readonly("expected", &GibbsCheckState::expected)
      .def_readonly("empirical", &GibbsCheckState::empirical);

  py::class_<GibbsCheckResult>(m, "GibbsCheckResult")
      .def_readonly("states", &GibbsCheckResult::states)
      .def_readonly("total_variation", &GibbsCheckResult::total_variation)
      .def_readonly("iterations", &GibbsCheckResult::iterations);

  m.def("gibbs_check",
        [](int stations, double temperature, long iterations, std::uint64_t seed) {
          return gibbs_check(make_gibbs_check_setup(stations), temperature, iterations, seed);
        },
        py::arg("stations") = 2, py::arg("temperature") = 0.1,
        py::arg("iterations") = 100000, py::arg("seed") = 1);
  m.def("settle_iteration", &settle_iteration, py::arg("incumbent"), py::arg("rel_band"));

  m.def("spearman", &spearman, py::arg("xs"), py::arg("ys"));

  // ---- config-driven entry points ----
  m.def("default_config", [] { return emit_config(default_config()); });
  m.def("resolve_config", [](const std::string& text) { return emit_config(parse_config(text)); },
        py::arg("config"));
  m.def(
      "run_from_json",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        const ExperimentConfig cfg = parse_config(text);
        const RunSpec spec = make_run_spec(cfg);
        return run_simulation(spec, seed.value_or(cfg.seed));
      },
      py::arg("config"), py::arg("seed") = std::nullopt);
  m.def(
      "batch_from_json",
      [](const std::string& text, const std::vector<std::uint64_t>& seeds) {
        const ExperimentConfig cfg = parse_config(text);
        return run_batch(make_run_spec(cfg), seeds);
      },
      py::arg("config"), py::arg("seeds"));
  m.def(
      "sweep_from_json",
      [](const std::string& text, const std::string& parameter,
         const std::vector<double>& values, std::optional<std::vector<std::uint64_t>> seeds) {
        const ExperimentConfig cfg = parse_config(text);
        const std::vector<std::uint64_t> seed_list =
            seeds ? *seeds : std::vector<std::uint64_t>{cfg.seed};
        return sweep(make_run_spec(cfg), parameter, values, seed_list);
      },
      py::arg("config"), py::arg("parameter"), py::arg("values"),
      py::arg("seeds") = std::nullopt);
  m.def(
      "verify_bounds_from_json",
      [](const std::string& text, const std::vector<std::uint64_t>& seeds) {
        const ExperimentConfig cfg = parse_config(text);
        return verify_theorem1(make_run_spec(cfg), seeds);
      },
      py::arg("config"), py::arg("seeds"));
  m.def(
      "min_cover_from_json",
      [](const std::string& text) {
        const ExperimentConfig cfg = parse_config(text);
        return minimum_cover_size(make_run_spec(cfg).topology);
      },
      py::arg("config"));
}

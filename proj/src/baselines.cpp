#include "edgesim/baselines.hpp"

#include <limits>
#include <stdexcept>

#include "edgesim/errors.hpp"

namespace edgesim {

PolicyKind policy_from_name(const std::string& name) {
  if (name == "ENGINE") return PolicyKind::Engine;
  if (name == "STSC") return PolicyKind::Stsc;
  if (name == "PCU") return PolicyKind::Pcu;
  if (name == "DCU") return PolicyKind::Dcu;
  if (name == "ORACLE") return PolicyKind::Oracle;
  throw ConfigError("unknown policy '" + name + "' (expected ENGINE, STSC, PCU, DCU or ORACLE)");
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Engine: return "ENGINE";
    case PolicyKind::Stsc: return "STSC";
    case PolicyKind::Pcu: return "PCU";
    case PolicyKind::Dcu: return "DCU";
    case PolicyKind::Oracle: return "ORACLE";
  }
  throw std::logic_error("unreachable policy kind");
}

Decision stsc_step(const Topology& topo, const ModelParams& params, const SlotInput& input,
                   double v_weight, double power_cap, const RejoConfig& config,
                   const Decision& warm_start, std::uint64_t seed, bool* flagged) {
  if (flagged) *flagged = false;
  RejoConfig cfg = config;

  // Cheapest decision first: it anchors feasibility under the hard cap.
  cfg.seed = seed ^ 0x5354534344435500ULL;
  Decision min_power = rejo_solve(topo, params, input, 0.0, 1.0, warm_start, cfg);
  const SlotMetrics min_metrics = evaluate_slot(topo, params, min_power, input);
  if (min_metrics.power_total > power_cap) {
    if (flagged) *flagged = true;
    return min_power;
  }

  // Prefer continuing from the previous slot when its activation can fit the
  // cap at all (zero offload is the cheapest fraction for a fixed pattern).
  Decision start = min_power;
  Decision warm_zero(warm_start.activation, std::vector<double>(warm_start.activation.size(), 0.0));
  const SlotMetrics warm_metrics = evaluate_slot(topo, params, warm_zero, input);
  if (warm_metrics.power_total <= power_cap) start = warm_zero;

  cfg.seed = seed;
  try {
    return rejo_solve(topo, params, input, v_weight, 0.0, start, cfg, power_cap);
  } catch (const InfeasibleInstanceError&) {
    // The capped chain found no state under the budget; fall back to the
    // cheapest decision (fractions are zero there, so it passed the cap test).
    if (flagged) *flagged = true;
    return min_power;
  }
}

Decision pcu_step(const Topology& topo, const ModelParams& params, const SlotInput& input,
                  double v_weight, const RejoConfig& config, const Decision& warm_start,
                  std::uint64_t seed) {
  RejoConfig cfg = config;
  cfg.seed = seed;
  return rejo_solve(topo, params, input, v_weight, 0.0, warm_start, cfg);
}

Decision dcu_step(const Topology& topo, const ModelParams& params, const SlotInput& input,
                  const RejoConfig& config, const Decision& warm_start, std::uint64_t seed) {
  RejoConfig cfg = config;
  cfg.seed = seed;
  return rejo_solve(topo, params, input, 0.0, 1.0, warm_start, cfg);
}

}  // namespace edgesim

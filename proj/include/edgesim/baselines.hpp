#pragma once

#include <cstdint>
#include <string>

#include "edgesim/rejo.hpp"
#include "edgesim/system_model.hpp"

namespace edgesim {

enum class PolicyKind { Engine, Stsc, Pcu, Dcu, Oracle };

PolicyKind policy_from_name(const std::string& name);
std::string policy_name(PolicyKind kind);

// Per-slot delay minimizer under a hard per-slot power cap. Falls back to the
// minimum-power decision (and flags the slot) when even that busts the cap.
Decision stsc_step(const Topology& topo, const ModelParams& params, const SlotInput& input,
                   double v_weight, double power_cap, const RejoConfig& config,
                   const Decision& warm_start, std::uint64_t seed, bool* flagged = nullptr);

// Unconstrained per-slot delay minimizer (no queue pressure).
Decision pcu_step(const Topology& topo, const ModelParams& params, const SlotInput& input,
                  double v_weight, const RejoConfig& config, const Decision& warm_start,
                  std::uint64_t seed);

// Per-slot power minimizer (delay ignored).
Decision dcu_step(const Topology& topo, const ModelParams& params, const SlotInput& input,
                  const RejoConfig& config, const Decision& warm_start, std::uint64_t seed);

}  // namespace edgesim

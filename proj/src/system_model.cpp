#include "edgesim/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

void check_sizes(const Topology& topo, const std::vector<std::uint8_t>& activation,
                 const std::vector<double>& traffic) {
  if (static_cast<int>(activation.size()) != topo.num_stations()) {
    throw std::invalid_argument("activation size does not match station count");
  }
  if (static_cast<int>(traffic.size()) != topo.num_regions()) {
    throw std::invalid_argument("traffic size does not match region count");
  }
  for (double lam : traffic) {
    if (!(lam >= 0.0)) throw std::invalid_argument("traffic must be nonnegative");
  }
}

std::vector<int> active_coverer_counts(const Topology& topo,
                                       const std::vector<std::uint8_t>& activation) {
  std::vector<int> counts(topo.num_regions(), 0);
  for (int m = 0; m < topo.num_regions(); ++m) {
    for (int n : topo.coverers(m)) counts[m] += activation[n] ? 1 : 0;
  }
  return counts;
}

}  // namespace

double PowerCurve::operator()(double x) const {
  if (load.empty() || load.size() != power.size()) {
    throw std::invalid_argument("power curve needs matching load/power samples");
  }
  if (x <= load.front()) return power.front();
  if (x >= load.back()) return power.back();
  auto it = std::upper_bound(load.begin(), load.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - load.begin());
  const std::size_t lo = hi - 1;
  const double span = load[hi] - load[lo];
  const double w = span > 0.0 ? (x - load[lo]) / span : 0.0;
  return power[lo] + w * (power[hi] - power[lo]);
}

Decision::Decision(std::vector<std::uint8_t> a, std::vector<double> b)
    : activation(std::move(a)), local_fraction(std::move(b)) {
  if (activation.size() != local_fraction.size()) {
    throw std::invalid_argument("activation and local_fraction sizes differ");
  }
  normalize();
}

void Decision::normalize() {
  for (std::size_t n = 0; n < activation.size(); ++n) {
    if (!activation[n]) local_fraction[n] = 0.0;
  }
}

std::vector<double> bs_arrivals(const Topology& topo,
                                const std::vector<std::uint8_t>& activation,
                                const std::vector<double>& traffic) {
  check_sizes(topo, activation, traffic);
  const std::vector<int> counts = active_coverer_counts(topo, activation);
  std::vector<double> arrivals(topo.num_stations(), 0.0);
  for (int m = 0; m < topo.num_regions(); ++m) {
    if (counts[m] == 0) {
      throw CoverageError(m + 1, "region " + std::to_string(m + 1) +
                                     " has no active station covering it");
    }
    if (traffic[m] == 0.0) continue;
    const double share = traffic[m] / counts[m];
    for (int n : topo.coverers(m)) {
      if (activation[n]) arrivals[n] += share;
    }
  }
  return arrivals;
}

std::vector<double> transmission_power(const Topology& topo, const RadioParams& radio,
                                       const std::vector<std::uint8_t>& activation,
                                       const std::vector<double>& traffic) {
  check_sizes(topo, activation, traffic);
  const std::vector<int> counts = active_coverer_counts(topo, activation);
  // Power needed per unit traffic so the Shannon rate over the slice meets
  // the target: (2^(r/W) - 1) * noise * d^alpha / gain.
  const double rate_factor = std::exp2(radio.target_rate / radio.bandwidth) - 1.0;
  std::vector<double> tx(topo.num_stations(), 0.0);
  for (int m = 0; m < topo.num_regions(); ++m) {
    if (counts[m] == 0) {
      throw CoverageError(m + 1, "region " + std::to_string(m + 1) +
                                     " has no active station covering it");
    }
    if (traffic[m] == 0.0) continue;
    const double share = traffic[m] / counts[m];
    for (int n : topo.coverers(m)) {
      if (!activation[n]) continue;
      const double d = std::max(topo.distance(n, m), radio.min_pathloss_distance);
      tx[n] += share * rate_factor * radio.noise_power *
               std::pow(d, radio.pathloss_exponent) / radio.pathloss_constant;
    }
  }
  return tx;
}

double computation_power(const ComputeParams& compute, double local_fraction,
                         double arrivals) {
  const double load = compute.compute_fraction * local_fraction * arrivals;
  if (compute.power_curve) return (*compute.power_curve)(load);
  return compute.compute_power_coefficient * load;
}

double local_delay(double service_rate, double load) {
  if (service_rate <= 0.0) throw std::invalid_argument("service_rate must be positive");
  if (load < 0.0) throw std::invalid_argument("load must be nonnegative");
  if (load >= service_rate) {
    throw OverloadError("computation load " + std::to_string(load) +
                        " saturates service rate " + std::to_string(service_rate));
  }
  return load / (service_rate - load);
}

double remote_delay(const ComputeParams& compute, double local_fraction,
                    double arrivals, double congestion) {
  return compute.compute_fraction * (1.0 - local_fraction) * arrivals * congestion;
}

SlotMetrics evaluate_slot(const Topology& topo, const ModelParams& params,
                          const Decision& decision, const SlotInput& input) {
  const int n_stations = topo.num_stations();
  if (static_cast<int>(input.congestion.size()) != n_stations) {
    throw std::invalid_argument("congestion size does not match station count");
  }
  SlotMetrics out;
  out.arrivals = bs_arrivals(topo, decision.activation, input.traffic);
  out.power_tx = transmission_power(topo, params.radio, decision.activation, input.traffic);
  out.power_op.assign(n_stations, 0.0);
  out.power_com.assign(n_stations, 0.0);
  out.delay_local.assign(n_stations, 0.0);
  out.delay_remote.assign(n_stations, 0.0);
  for (int n = 0; n < n_stations; ++n) {
    if (!decision.activation[n]) continue;
    const double b = decision.local_fraction[n];
    if (b < 0.0 || b > 1.0) throw std::invalid_argument("local_fraction must lie in [0, 1]");
    out.power_op[n] = params.radio.operational_power;
    out.power_com[n] = computation_power(params.compute, b, out.arrivals[n]);
    const double load = params.compute.compute_fraction * b * out.arrivals[n];
    out.delay_local[n] = local_delay(topo.stations()[n].service_rate, load);
    out.delay_remote[n] = remote_delay(params.compute, b, out.arrivals[n], input.congestion[n]);
  }
  for (int n = 0; n < n_stations; ++n) {
    out.power_total += out.power_op[n] + out.power_tx[n] + out.power_com[n];
    out.delay_total += out.delay_local[n] + out.delay_remote[n];
  }
  return out;
}

FeasibilityReport check_feasibility(const Topology& topo, const ModelParams& params,
                                    const Decision& decision, const SlotInput& input) {
  FeasibilityReport report;
  const std::vector<int> counts = active_coverer_counts(topo, decision.activation);
  for (int m = 0; m < topo.num_regions(); ++m) {
    if (counts[m] == 0) report.uncovered_regions.push_back(m + 1);
  }
  if (!report.uncovered_regions.empty()) return report;

  const std::vector<double> arrivals = bs_arrivals(topo, decision.activation, input.traffic);
  const std::vector<double> tx = transmission_power(topo, params.radio, decision.activation,
                                                    input.traffic);
  for (int n = 0; n < topo.num_stations(); ++n) {
    if (!decision.activation[n]) continue;
    const double b = decision.local_fraction[n];
    const double rho = params.compute.compute_fraction;
    const double utilization = (params.compute.utilization_includes_rho ? rho : 1.0) * b *
                               arrivals[n];
    const double cap = params.compute.utilization_cap * topo.stations()[n].service_rate;
    if (utilization > cap * (1.0 + 1e-12)) report.utilization_violations.push_back(n + 1);
    const double power = params.radio.operational_power + tx[n] +
                         computation_power(params.compute, b, arrivals[n]);
    if (power > topo.stations()[n].power_cap * (1.0 + 1e-12)) {
      report.power_cap_violations.push_back(n + 1);
    }
  }
  return report;
}

}  // namespace edgesim

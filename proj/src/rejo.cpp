#include "edgesim/rejo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "edgesim/errors.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CandidateEval {
  double objective = kInf;
  double power = kInf;
  double delay = kInf;
  bool feasible = false;
};

// Shared evaluator: arrivals, per-station powers and the weighted objective
// for a full decision, plus the hard feasibility screens.
class SlotEvaluator {
 public:
  SlotEvaluator(const Topology& topo, const ModelParams& params, const SlotInput& input,
                double v_weight, double deficit_q, double total_power_cap)
      : topo_(topo),
        params_(params),
        input_(input),
        v_(v_weight),
        q_(deficit_q),
        total_cap_(total_power_cap),
        rate_factor_(std::exp2(params.radio.target_rate / params.radio.bandwidth) - 1.0) {
    const int n = topo.num_stations();
    const int m = topo.num_regions();
    unit_tx_.assign(static_cast<std::size_t>(n) * m, 0.0);
    for (int s = 0; s < n; ++s) {
      for (int r : topo.covered_regions(s)) {
        const double d = std::max(topo.distance(s, r), params.radio.min_pathloss_distance);
        unit_tx_[static_cast<std::size_t>(s) * m + r] =
            rate_factor_ * params.radio.noise_power *
            std::pow(d, params.radio.pathloss_exponent) / params.radio.pathloss_constant;
      }
    }
  }

  const Topology& topology() const { return topo_; }
  const ModelParams& params() const { return params_; }
  double v_weight() const { return v_; }
  double deficit_q() const { return q_; }

  // Arrivals and transmit power for an activation (coverage must hold).
  void route(const std::vector<std::uint8_t>& a, std::vector<double>& arrivals,
             std::vector<double>& tx) const {
    const int n_regions = topo_.num_regions();
    arrivals.assign(topo_.num_stations(), 0.0);
    tx.assign(topo_.num_stations(), 0.0);
    for (int m = 0; m < n_regions; ++m) {
      int count = 0;
      for (int s : topo_.coverers(m)) count += a[s] ? 1 : 0;
      const double lam = input_.traffic[m];
      if (lam == 0.0 || count == 0) continue;
      const double share = lam / count;
      for (int s : topo_.coverers(m)) {
        if (!a[s]) continue;
        arrivals[s] += share;
        tx[s] += share * unit_tx_[static_cast<std::size_t>(s) * n_regions + m];
      }
    }
  }

  std::optional<double> fraction_bound(int station, double arrivals, double tx) const {
    return local_fraction_bound(params_.compute, topo_.stations()[station], arrivals,
                                params_.radio.operational_power, tx);
  }

  double solve_fraction(int station, double arrivals, double b_max) const {
    return inner_offload_solve(v_, q_, input_.congestion[station],
                               topo_.stations()[station].service_rate, arrivals,
                               params_.compute, b_max);
  }

  // Full objective of (a, b); infeasible when any active station busts its
  // utilization or power cap, or the slot-wide cap when one is set.
  CandidateEval evaluate(const std::vector<std::uint8_t>& a,
                         const std::vector<double>& b) const {
    CandidateEval out;
    std::vector<double> arrivals, tx;
    route(a, arrivals, tx);
    const ComputeParams& comp = params_.compute;
    double power = 0.0;
    double delay = 0.0;
    bool feasible = true;
    for (int s = 0; s < topo_.num_stations(); ++s) {
      if (!a[s]) continue;
      const double load = comp.compute_fraction * b[s] * arrivals[s];
      const double chi = topo_.stations()[s].service_rate;
      const double util = (comp.utilization_includes_rho ? load : b[s] * arrivals[s]);
      if (util > comp.utilization_cap * chi * (1.0 + 1e-12)) feasible = false;
      if (load >= chi) {
        feasible = false;
        continue;
      }
      const double p_com = comp.power_curve ? (*comp.power_curve)(load)
                                            : comp.compute_power_coefficient * load;
      const double p = params_.radio.operational_power + tx[s] + p_com;
      if (p > topo_.stations()[s].power_cap * (1.0 + 1e-12)) feasible = false;
      power += p;
      delay += load / (chi - load) +
               comp.compute_fraction * (1.0 - b[s]) * arrivals[s] * input_.congestion[s];
    }
    if (power > total_cap_ * (1.0 + 1e-12)) feasible = false;
    out.objective = v_ * delay + q_ * power;
    out.power = power;
    out.delay = delay;
    out.feasible = feasible;
    return out;
  }

 private:
  const Topology& topo_;
  const ModelParams& params_;
  const SlotInput& input_;
  double v_;
  double q_;
  double total_cap_;
  double rate_factor_;
  std::vector<double> unit_tx_;  // per (station, region) transmit power per unit traffic
};

bool better(const CandidateEval& lhs, const CandidateEval& rhs) {
  if (lhs.objective != rhs.objective) return lhs.objective < rhs.objective;
  return lhs.power < rhs.power;
}

}  // namespace

std::optional<double> local_fraction_bound(const ComputeParams& compute,
                                           const BaseStation& station, double arrivals,
                                           double power_op, double power_tx) {
  const double headroom = station.power_cap - power_op - power_tx;
  if (headroom < 0.0) return std::nullopt;
  double b_max = 1.0;
  const double rho = compute.compute_fraction;
  if (arrivals > 0.0 && rho > 0.0) {
    const double util_denom = (compute.utilization_includes_rho ? rho : 1.0) * arrivals;
    b_max = std::min(b_max, compute.utilization_cap * station.service_rate / util_denom);
    if (compute.power_curve) {
      // Monotone curve: walk the cap back until the headroom is respected.
      double lo = 0.0, hi = b_max;
      if ((*compute.power_curve)(rho * hi * arrivals) > headroom) {
        for (int i = 0; i < 60; ++i) {
          const double mid = 0.5 * (lo + hi);
          if ((*compute.power_curve)(rho * mid * arrivals) > headroom) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        b_max = lo;
      }
    } else if (compute.compute_power_coefficient > 0.0) {
      b_max = std::min(b_max, headroom / (compute.compute_power_coefficient * rho * arrivals));
    }
  }
  return std::max(b_max, 0.0);
}

double inner_offload_solve(double v_weight, double deficit_q, double congestion,
                           double service_rate, double arrivals,
                           const ComputeParams& compute, double b_max) {
  if (b_max < 0.0) throw std::invalid_argument("b_max must be nonnegative");
  const double rho = compute.compute_fraction;
  const double lam = rho * arrivals;
  if (lam <= 0.0 || b_max == 0.0) return 0.0;

  if (compute.power_curve) {
    // No closed form for a tabulated curve; dense scan plus local refinement.
    const double cap = std::min(b_max, 1.0);
    auto f = [&](double b) {
      const double x = lam * b;
      if (x >= service_rate) return kInf;
      const double local = x / (service_rate - x);
      const double remote = (lam - x) * congestion;
      return v_weight * (local + remote) + deficit_q * (*compute.power_curve)(x);
    };
    const int steps = 2000;
    double best_b = 0.0, best_f = f(0.0);
    for (int i = 1; i <= steps; ++i) {
      const double b = cap * i / steps;
      const double fb = f(b);
      if (fb < best_f) {
        best_f = fb;
        best_b = b;
      }
    }
    double lo = std::max(0.0, best_b - cap / steps);
    double hi = std::min(cap, best_b + cap / steps);
    for (int i = 0; i < 80; ++i) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (f(m1) <= f(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    const double mid = 0.5 * (lo + hi);
    return f(mid) < best_f ? mid : best_b;
  }

  // Linear power curve: the load-domain objective
  //   v * (x / (chi - x) - h x) + q * kappa * x   (+ constants)
  // is strictly convex, so the interior stationary point (when the slope can
  // vanish) clamped to the box is the minimizer.
  const double slope_gap = v_weight * congestion - deficit_q * compute.compute_power_coefficient;
  if (slope_gap <= 0.0) return 0.0;
  const double chi = service_rate;
  const double x_star = chi - std::sqrt(v_weight * chi / slope_gap);
  const double b_star = x_star / lam;
  return std::clamp(b_star, 0.0, std::min(b_max, 1.0));
}

double acceptance_probability(double candidate, double incumbent, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  const double x = (candidate - incumbent) / temperature;
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

std::vector<double> gibbs_stationary_distribution(const std::vector<double>& objectives,
                                                  double temperature) {
  if (objectives.empty()) throw std::invalid_argument("objectives must be nonempty");
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  const double lo = *std::min_element(objectives.begin(), objectives.end());
  std::vector<double> weights(objectives.size());
  double total = 0.0;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    weights[i] = std::exp(-(objectives[i] - lo) / temperature);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

Decision rejo_solve(const Topology& topo, const ModelParams& params, const SlotInput& input,
                    double v_weight, double deficit_q, const Decision& warm_start,
                    const RejoConfig& config, double total_power_cap, RejoTrace* trace,
                    const RejoObserver& observer) {
  const int n = topo.num_stations();
  if (static_cast<int>(warm_start.activation.size()) != n) {
    throw std::invalid_argument("warm start size does not match station count");
  }
  if (!coverage_feasible(topo, warm_start.activation)) {
    throw std::invalid_argument("warm start violates coverage");
  }
  const int max_iterations = config.max_iterations > 0 ? config.max_iterations : 50 * n;
  const int stall_window = config.stall_window > 0 ? config.stall_window : 10 * n;

  SlotEvaluator eval(topo, params, input, v_weight, deficit_q, total_power_cap);
  Rng rng(config.seed);

  // Stations sharing a region with s, s included: exactly those whose load
  // (and so best fraction) shifts when s flips.
  std::vector<std::vector<int>> neighbors(n);
  for (int s = 0; s < n; ++s) {
    std::vector<char> seen(n, 0);
    seen[s] = 1;
    neighbors[s].push_back(s);
    for (int m : topo.covered_regions(s)) {
      for (int t : topo.coverers(m)) {
        if (!seen[t]) {
          seen[t] = 1;
          neighbors[s].push_back(t);
        }
      }
    }
  }

  std::vector<double> arrivals, tx;

  // Chain state: an activation pattern with every active station's fraction
  // resolved by the inner solve, so the chain walks the same state space the
  // stationary law is written over.
  std::vector<std::uint8_t> cur_a = warm_start.activation;
  std::vector<double> cur_b(n, 0.0);
  eval.route(cur_a, arrivals, tx);
  for (int s = 0; s < n; ++s) {
    if (!cur_a[s]) continue;
    const std::optional<double> b_max = eval.fraction_bound(s, arrivals[s], tx[s]);
    if (b_max) cur_b[s] = eval.solve_fraction(s, arrivals[s], *b_max);
  }
  CandidateEval cur = eval.evaluate(cur_a, cur_b);

  Decision best;
  CandidateEval best_eval;
  bool have_best = false;
  if (cur.feasible) {
    best = Decision(cur_a, cur_b);
    best_eval = cur;
    have_best = true;
  }

  // Active coverer counts let a deactivation be screened in O(regions of n).
  std::vector<int> counts(topo.num_regions(), 0);
  for (int m = 0; m < topo.num_regions(); ++m) {
    for (int s : topo.coverers(m)) counts[m] += cur_a[s] ? 1 : 0;
  }

  std::vector<std::uint8_t> cand_a = cur_a;
  std::vector<double> cand_b = cur_b;
  int since_accept = 0;

  for (int it = 1; it <= max_iterations && since_accept < stall_window; ++it) {
    ++since_accept;
    const int station = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    // Proposing the kept mode would be a no-op, so the candidate is the flip.
    const int mode = cur_a[station] ? 0 : 1;

    RejoTraceRow row;
    row.iteration = it;
    row.station = station + 1;
    row.proposed_mode = mode;

    cand_a = cur_a;
    cand_a[station] = static_cast<std::uint8_t>(mode);

    bool coverage_ok = true;
    if (mode == 0) {
      for (int m : topo.covered_regions(station)) {
        if (counts[m] == 1) {
          coverage_ok = false;
          break;
        }
      }
    }

    CandidateEval cand;
    if (coverage_ok) {
      eval.route(cand_a, arrivals, tx);
      cand_b = cur_b;
      bool bound_ok = true;
      // The flip shifts load for every station sharing a region with it;
      // each re-derives its own fraction from the broadcast activation.
      for (int j : neighbors[station]) {
        if (!cand_a[j]) {
          cand_b[j] = 0.0;
          continue;
        }
        const std::optional<double> b_max = eval.fraction_bound(j, arrivals[j], tx[j]);
        if (!b_max) {
          bound_ok = false;
          break;
        }
        cand_b[j] = eval.solve_fraction(j, arrivals[j], *b_max);
      }
      if (bound_ok) {
        cand = eval.evaluate(cand_a, cand_b);
      }
    }

    row.feasible = coverage_ok && cand.feasible;
    if (row.feasible) {
      row.objective = cand.objective;
      row.acceptance = acceptance_probability(cand.objective, cur.objective,
                                              config.temperature);
      if (rng.uniform01() < row.acceptance) {
        row.accepted = true;
        const int delta = cand_a[station] ? 1 : -1;
        for (int m : topo.covered_regions(station)) counts[m] += delta;
        cur_a = cand_a;
        cur_b = cand_b;
        cur = cand;
        since_accept = 0;
        if (trace) trace->messages += 1;
        if (!have_best || better(cand, best_eval)) {
          best = Decision(cand_a, cand_b);
          best_eval = cand;
          have_best = true;
        }
      }
      if (observer) observer(Decision(cand_a, cand_b), cand.objective, row.accepted);
    } else {
      row.objective = std::numeric_limits<double>::quiet_NaN();
    }

    if (trace) {
      trace->rows.push_back(row);
      trace->incumbent.push_back(cur.objective);
      trace->best.push_back(have_best ? best_eval.objective
                                      : std::numeric_limits<double>::quiet_NaN());
      if (n <= 32) {
        std::uint32_t code = 0;
        for (int s = 0; s < n; ++s) {
          if (cur_a[s]) code |= (1u << s);
        }
        trace->incumbent_code.push_back(code);
      }
    }
  }

  if (!have_best) {
    // Even the warm start was unusable; the safest cover is everything on.
    std::vector<std::uint8_t> all_on(n, 1);
    std::vector<double> zeros(n, 0.0);
    CandidateEval fallback = eval.evaluate(all_on, zeros);
    if (!fallback.feasible) {
      throw InfeasibleInstanceError("no feasible decision found for this slot");
    }
    return Decision(all_on, zeros);
  }
  return best;
}

Decision exhaustive_oracle(const Topology& topo, const ModelParams& params,
                           const SlotInput& input, double v_weight, double deficit_q) {
  const int n = topo.num_stations();
  if (n > 16) throw UnsupportedSizeError("exhaustive_oracle enumerates up to 16 stations");

  SlotEvaluator eval(topo, params, input, v_weight, deficit_q, kInf);
  std::vector<std::uint32_t> region_masks(topo.num_regions(), 0);
  for (int m = 0; m < topo.num_regions(); ++m) {
    for (int s : topo.coverers(m)) region_masks[m] |= (1u << s);
  }

  Decision best;
  CandidateEval best_eval;
  bool have_best = false;
  std::vector<std::uint8_t> a(n, 0);
  std::vector<double> b(n, 0.0);
  std::vector<double> arrivals, tx;

  const std::uint32_t limit = 1u << n;
  for (std::uint32_t code = 0; code < limit; ++code) {
    // Bit (n-1-i) drives station i so ascending codes scan activations in
    // lexicographic order; first hit wins ties.
    std::uint32_t mask = 0;
    for (int s = 0; s < n; ++s) {
      const bool on = (code >> (n - 1 - s)) & 1u;
      a[s] = on ? 1 : 0;
      if (on) mask |= (1u << s);
    }
    bool covered = true;
    for (std::uint32_t rm : region_masks) {
      if ((rm & mask) == 0) {
        covered = false;
        break;
      }
    }
    if (!covered) continue;

    eval.route(a, arrivals, tx);
    bool ok = true;
    for (int s = 0; s < n && ok; ++s) {
      b[s] = 0.0;
      if (!a[s]) continue;
      const std::optional<double> b_max = eval.fraction_bound(s, arrivals[s], tx[s]);
      if (!b_max) {
        ok = false;
        break;
      }
      b[s] = eval.solve_fraction(s, arrivals[s], *b_max);
    }
    if (!ok) continue;
    const CandidateEval cand = eval.evaluate(a, b);
    if (!cand.feasible) continue;
    if (!have_best || better(cand, best_eval)) {
      best = Decision(a, b);
      best_eval = cand;
      have_best = true;
    }
  }
  if (!have_best) throw InfeasibleInstanceError("no feasible decision for this slot");
  return best;
}

std::optional<double> resolved_objective(const Topology& topo, const ModelParams& params,
                                         const SlotInput& input, double v_weight,
                                         double deficit_q,
                                         const std::vector<std::uint8_t>& activation) {
  const int n = topo.num_stations();
  if (static_cast<int>(activation.size()) != n) {
    throw std::invalid_argument("activation size does not match station count");
  }
  if (!coverage_feasible(topo, activation)) return std::nullopt;
  SlotEvaluator eval(topo, params, input, v_weight, deficit_q, kInf);
  std::vector<double> arrivals, tx;
  eval.route(activation, arrivals, tx);
  std::vector<double> b(n, 0.0);
  for (int s = 0; s < n; ++s) {
    if (!activation[s]) continue;
    const std::optional<double> b_max = eval.fraction_bound(s, arrivals[s], tx[s]);
    if (!b_max) return std::nullopt;
    b[s] = eval.solve_fraction(s, arrivals[s], *b_max);
  }
  const CandidateEval cand = eval.evaluate(activation, b);
  if (!cand.feasible) return std::nullopt;
  return cand.objective;
}

Decision RejoSlotSolver::solve(const Topology& topo, const ModelParams& params,
                               const SlotInput& input, double v_weight, double deficit_q,
                               const Decision& warm_start, std::uint64_t seed) {
  RejoConfig cfg = config_;
  cfg.seed = seed;
  RejoTrace trace;
  Decision d = rejo_solve(topo, params, input, v_weight, deficit_q, warm_start, cfg,
                          std::numeric_limits<double>::infinity(), &trace);
  messages_ += trace.messages;
  return d;
}

Decision OracleSlotSolver::solve(const Topology& topo, const ModelParams& params,
                                 const SlotInput& input, double v_weight, double deficit_q,
                                 const Decision& warm_start, std::uint64_t seed) {
  (void)warm_start;
  (void)seed;
  return exhaustive_oracle(topo, params, input, v_weight, deficit_q);
}

}  // namespace edgesim

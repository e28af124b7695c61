#include "edgesim/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "edgesim/config.hpp"
#include "edgesim/errors.hpp"
#include "edgesim/harness.hpp"
#include "edgesim/topology.hpp"
#include "edgesim/trace_io.hpp"

namespace edgesim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  json record;
  record["error"] = kind;
  record["message"] = message;
  err << record.dump() << "\n";
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return default_config();
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto bad = [&] { return ConfigError("seeds must be N or N..M, got: " + text); };
  try {
    const std::size_t pos = text.find("..");
    if (pos == std::string::npos) return {std::stoull(text)};
    const std::uint64_t lo = std::stoull(text.substr(0, pos));
    const std::uint64_t hi = std::stoull(text.substr(pos + 2));
    if (hi < lo) throw ConfigError("seed range is inverted: " + text);
    if (hi - lo >= 100000) throw ConfigError("seed range too large: " + text);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  } catch (const std::invalid_argument&) {
    throw bad();
  } catch (const std::out_of_range&) {
    throw bad();
  }
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad value in --values list: '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError("--values list is empty");
  return values;
}

fs::path ensure_out_dir(const std::string& dir) {
  const fs::path path = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create output directory " + path.string() + ": " + ec.message());
  return path;
}

std::string activation_string(std::uint32_t code, int stations) {
  std::string s;
  for (int i = 0; i < stations; ++i) s.push_back((code >> i) & 1u ? '1' : '0');
  return s;
}

// Flags shared by the config-driven subcommands; values only apply when the
// flag was actually given.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  std::uint64_t seed = 0;
  std::string policy;
  double v_weight = 0.0;
  double power_budget = 0.0;
  double temperature = 0.0;
  int slots = 0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* policy_opt = nullptr;
  CLI::Option* v_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* slots_opt = nullptr;

  void attach(CLI::App* cmd, bool with_out = true) {
    cmd->add_option("--config", config_path, "JSON config file (defaults when omitted)");
    if (with_out) cmd->add_option("--out", out_dir, "output directory (default .)");
    cmd->add_option("--seeds", seeds, "seed range N..M (or single N)");
    seed_opt = cmd->add_option("--seed", seed, "RNG seed override");
    policy_opt = cmd->add_option("--policy", policy, "ENGINE|STSC|PCU|DCU|ORACLE");
    v_opt = cmd->add_option("--V", v_weight, "delay/power trade-off weight override");
    q_opt = cmd->add_option("--Q", power_budget, "long-term power budget override");
    tau_opt = cmd->add_option("--tau", temperature, "search temperature override");
    slots_opt = cmd->add_option("--slots", slots, "horizon override");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_opt->count()) cfg.seed = seed;
    if (policy_opt->count()) cfg.policy = policy_from_name(policy);
    if (v_opt->count()) cfg.controller.tradeoff_v = v_weight;
    if (q_opt->count()) cfg.controller.power_budget = power_budget;
    if (tau_opt->count()) cfg.rejo.temperature = temperature;
    if (slots_opt->count()) cfg.slots = slots;
    // Round-trip so overrides face the same validation as document fields.
    return parse_config(emit_config(cfg));
  }

  std::vector<std::uint64_t> seed_list(const ExperimentConfig& cfg) const {
    if (!seeds.empty()) return parse_seed_range(seeds);
    return {cfg.seed};
  }
};

void print_run_line(std::ostream& out, const RunResult& r) {
  out << "policy=" << policy_name(r.policy) << " seed=" << r.seed
      << " slots=" << r.rows.size()
      << " mean_delay_cost=" << format_number(r.mean_delay_cost)
      << " mean_power=" << format_number(r.mean_power)
      << " final_queue=" << format_number(r.final_queue)
      << " mean_sleeping=" << format_number(r.mean_sleeping);
  if (r.flagged_slots > 0) out << " flagged_slots=" << r.flagged_slots;
  out << "\n";
}

int cmd_run(const CommonFlags& flags, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const RunSpec spec = make_run_spec(cfg);
  const std::vector<std::uint64_t> seeds = flags.seed_list(cfg);
  const fs::path dir = ensure_out_dir(flags.out_dir);

  if (seeds.size() == 1) {
    const RunResult result = run_simulation(spec, seeds[0]);
    write_trace(result, (dir / "trace.csv").string());
    write_summary(result, (dir / "summary.json").string());
    print_run_line(out, result);
    out << "wrote " << (dir / "trace.csv").string() << " and "
        << (dir / "summary.json").string() << "\n";
    return kExitOk;
  }

  const std::vector<RunResult> results = run_batch(spec, seeds);
  double delay_sum = 0.0;
  double power_sum = 0.0;
  for (const RunResult& r : results) {
    const std::string tag = std::to_string(r.seed);
    write_trace(r, (dir / ("trace_" + tag + ".csv")).string());
    write_summary(r, (dir / ("summary_" + tag + ".json")).string());
    print_run_line(out, r);
    delay_sum += r.mean_delay_cost;
    power_sum += r.mean_power;
  }
  const double n = static_cast<double>(results.size());
  out << "seeds=" << results.size()
      << " mean_delay_cost=" << format_number(delay_sum / n)
      << " mean_power=" << format_number(power_sum / n) << "\n";
  out << "wrote per-seed trace_<seed>.csv and summary_<seed>.json under "
      << dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& parameter,
              const std::string& values_text, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const RunSpec spec = make_run_spec(cfg);
  const std::vector<double> values = parse_value_list(values_text);
  const std::vector<std::uint64_t> seeds = flags.seed_list(cfg);
  const fs::path dir = ensure_out_dir(flags.out_dir);

  const SweepResult result = sweep(spec, parameter, values, seeds);
  write_sweep_csv(result, (dir / "sweep.csv").string());
  write_sweep_json(result, (dir / "sweep.json").string());

  out << "sweep parameter=" << result.parameter << " points=" << result.points.size()
      << " seeds=" << seeds.size() << "\n";
  for (const auto& [metric, rho] : result.trend) {
    out << "trend " << metric << " spearman=" << format_number(rho) << "\n";
  }
  out << "wrote " << (dir / "sweep.csv").string() << " and "
      << (dir / "sweep.json").string() << "\n";
  return kExitOk;
}

int cmd_gibbs_check(int stations, double temperature, long iterations, std::uint64_t seed,
                    double tolerance, const std::string& out_dir, std::ostream& out) {
  const GibbsCheckSetup setup = make_gibbs_check_setup(stations);
  const GibbsCheckResult result = gibbs_check(setup, temperature, iterations, seed);
  const bool pass = result.total_variation <= tolerance;

  out << "gibbs-check stations=" << stations << " tau=" << format_number(temperature)
      << " iterations=" << result.iterations << " seed=" << seed << "\n";
  out << "activation  objective      expected    empirical\n";
  for (const GibbsCheckState& st : result.states) {
    out << activation_string(st.code, stations) << "          "
        << format_number(st.objective) << "   " << format_number(st.expected) << "   "
        << format_number(st.empirical) << "\n";
  }
  out << "total_variation=" << format_number(result.total_variation)
      << " tolerance=" << format_number(tolerance) << " => " << (pass ? "PASS" : "FAIL")
      << "\n";

  if (!out_dir.empty()) {
    const fs::path dir = ensure_out_dir(out_dir);
    json doc;
    doc["format"] = "edgesim-gibbs-v1";
    doc["stations"] = stations;
    doc["temperature"] = temperature;
    doc["iterations"] = result.iterations;
    doc["seed"] = seed;
    doc["tolerance"] = tolerance;
    doc["total_variation"] = result.total_variation;
    doc["pass"] = pass;
    doc["states"] = json::array();
    for (const GibbsCheckState& st : result.states) {
      json row;
      row["activation"] = activation_string(st.code, stations);
      row["objective"] = st.objective;
      row["expected"] = st.expected;
      row["empirical"] = st.empirical;
      doc["states"].push_back(row);
    }
    const fs::path path = dir / "gibbs.json";
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path.string());
    file << doc.dump(2) << "\n";
    out << "wrote " << path.string() << "\n";
  }
  return pass ? kExitOk : 1;
}

int cmd_verify_bounds(const CommonFlags& flags, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const RunSpec spec = make_run_spec(cfg);
  std::vector<std::uint64_t> seeds;
  if (!flags.seeds.empty()) {
    seeds = parse_seed_range(flags.seeds);
  } else {
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  }

  const BoundsReport report = verify_theorem1(spec, seeds);
  out << "verify-bounds V=" << format_number(report.v_weight)
      << " Q=" << format_number(report.budget) << " seeds=" << report.seeds << "\n";
  out << "delay: mean=" << format_number(report.mean_delay_cost)
      << " bound=" << format_number(report.delay_bound)
      << " margin=" << format_number(report.delay_bound - report.mean_delay_cost)
      << " => " << (report.delay_ok ? "PASS" : "FAIL") << "\n";
  if (report.power_bound_applicable) {
    out << "power: mean=" << format_number(report.mean_power)
        << " bound=" << format_number(report.power_bound)
        << " margin=" << format_number(report.power_bound - report.mean_power) << " => "
        << (report.power_ok ? "PASS" : "FAIL") << "\n";
  } else {
    out << "power: bound inapplicable (budget <= power-only baseline "
        << format_number(report.p_star_estimate) << ")\n";
  }
  out << "queue telescoping: " << (report.telescoping_ok ? "PASS" : "FAIL") << "\n";

  if (!flags.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(flags.out_dir);
    write_bounds(report, (dir / "bounds.json").string());
    out << "wrote " << (dir / "bounds.json").string() << "\n";
  }
  const bool ok = report.delay_ok && report.telescoping_ok &&
                  (!report.power_bound_applicable || report.power_ok);
  return ok ? kExitOk : 1;
}

int cmd_min_cover(const CommonFlags& flags, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const RunSpec spec = make_run_spec(cfg);
  out << minimum_cover_size(spec.topology) << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"edgesim: base-station activation and offload control simulator"};
  app.name("edgesim");

  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults,
               "print the fully resolved config and exit");
  std::string top_config;
  app.add_option("--config", top_config, "JSON config file resolved by --print-defaults");

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one policy and write trace + summary");
  CommonFlags run_flags;
  run_flags.attach(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "re-run across parameter values");
  CommonFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string sweep_param;
  std::string sweep_values;
  sweep_cmd->add_option("--param", sweep_param, "one of Q, V, tau, traffic_mean, q_pin")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

  CLI::App* gibbs_cmd = app.add_subcommand(
      "gibbs-check", "compare chain visit frequencies with the stationary law");
  int gibbs_bs = 2;
  double gibbs_tau = 0.1;
  long gibbs_iters = 100000;
  std::uint64_t gibbs_seed = 1;
  double gibbs_tol = 0.05;
  std::string gibbs_out;
  gibbs_cmd->add_option("--bs", gibbs_bs, "stations sharing the region (2-4)")
      ->check(CLI::Range(2, 4));
  gibbs_cmd->add_option("--tau", gibbs_tau, "search temperature")
      ->check(CLI::PositiveNumber);
  gibbs_cmd->add_option("--iters", gibbs_iters, "chain iterations")
      ->check(CLI::PositiveNumber);
  gibbs_cmd->add_option("--seed", gibbs_seed, "RNG seed");
  gibbs_cmd->add_option("--tol", gibbs_tol, "total-variation pass threshold");
  gibbs_cmd->add_option("--out", gibbs_out, "directory for gibbs.json");

  CLI::App* bounds_cmd = app.add_subcommand(
      "verify-bounds", "check the guaranteed delay/power ceilings over seeds");
  CommonFlags bounds_flags;
  bounds_flags.attach(bounds_cmd);

  CLI::App* cover_cmd =
      app.add_subcommand("min-cover", "print the smallest activation count that covers");
  CommonFlags cover_flags;
  cover_flags.attach(cover_cmd, /*with_out=*/false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (print_defaults) {
      out << emit_config(load_config(top_config));
      return kExitOk;
    }
    if (app.got_subcommand(run_cmd)) return cmd_run(run_flags, out);
    if (app.got_subcommand(sweep_cmd)) {
      return cmd_sweep(sweep_flags, sweep_param, sweep_values, out);
    }
    if (app.got_subcommand(gibbs_cmd)) {
      return cmd_gibbs_check(gibbs_bs, gibbs_tau, gibbs_iters, gibbs_seed, gibbs_tol,
                             gibbs_out, out);
    }
    if (app.got_subcommand(bounds_cmd)) return cmd_verify_bounds(bounds_flags, out);
    if (app.got_subcommand(cover_cmd)) return cmd_min_cover(cover_flags, out);
    out << app.help();
    report_error(err, "usage", "a subcommand is required");
    return kExitUsage;
  } catch (const ConfigError& e) {
    report_error(err, "config", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    report_error(err, "io", e.what());
    return kExitIo;
  } catch (const InfeasibleInstanceError& e) {
    report_error(err, "infeasible", e.what());
    return kExitInfeasible;
  } catch (const CoverageError& e) {
    report_error(err, "infeasible", e.what());
    return kExitInfeasible;
  } catch (const OverloadError& e) {
    report_error(err, "infeasible", e.what());
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    report_error(err, "config", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace edgesim

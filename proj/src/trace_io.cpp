#include "edgesim/trace_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edgesim/errors.hpp"
#include "json.hpp"

namespace edgesim {

namespace {

using nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

void append_columns(std::string& header, const char* prefix, int n) {
  for (int i = 1; i <= n; ++i) {
    header += ',';
    header += prefix;
    header += '_';
    header += std::to_string(i);
  }
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_trace(const RunResult& result, const std::string& path) {
  if (result.rows.empty()) throw IoError("refusing to write an empty trace");
  const int n = static_cast<int>(result.rows.front().decision.activation.size());

  std::string out;
  out += "# ";
  out += kTraceFormat;
  out += '\n';
  std::string header = "t,q,P_total,c_total";
  append_columns(header, "a", n);
  append_columns(header, "b", n);
  append_columns(header, "mu", n);
  append_columns(header, "P_op", n);
  append_columns(header, "P_tx", n);
  append_columns(header, "P_com", n);
  append_columns(header, "c_lo", n);
  append_columns(header, "c_rem", n);
  out += header;
  out += '\n';

  for (const TraceRow& row : result.rows) {
    out += std::to_string(row.t);
    out += ',';
    out += format_number(row.deficit_queue);
    out += ',';
    out += format_number(row.power_total);
    out += ',';
    out += format_number(row.delay_total);
    for (int s = 0; s < n; ++s) {
      out += row.decision.activation[s] ? ",1" : ",0";
    }
    auto append_values = [&](const std::vector<double>& xs) {
      for (int s = 0; s < n; ++s) {
        out += ',';
        out += format_number(xs[s]);
      }
    };
    append_values(row.decision.local_fraction);
    append_values(row.metrics.arrivals);
    append_values(row.metrics.power_op);
    append_values(row.metrics.power_tx);
    append_values(row.metrics.power_com);
    append_values(row.metrics.delay_local);
    append_values(row.metrics.delay_remote);
    out += '\n';
  }
  write_file(path, out);
}

std::string summary_to_json(const RunResult& result) {
  ordered_json doc;
  doc["format"] = kSummaryFormat;
  doc["policy"] = policy_name(result.policy);
  doc["seed"] = result.seed;
  doc["slots"] = result.rows.size();
  doc["mean_delay_cost"] = result.mean_delay_cost;
  doc["mean_power"] = result.mean_power;
  doc["final_deficit_queue"] = result.final_queue;
  doc["mean_sleeping"] = result.mean_sleeping;
  doc["mean_local_fraction"] = result.mean_local_fraction;
  doc["sleep_histogram"] = result.sleep_histogram;
  doc["messages"] = result.messages;
  doc["flagged_slots"] = result.flagged_slots;
  if (result.policy == PolicyKind::Engine || result.policy == PolicyKind::Oracle) {
    // Queue identity available per run: q(T)/T bounds mean power - Q.
    const double slots = static_cast<double>(result.rows.size());
    const double lhs = result.final_queue / slots;
    const double rhs = result.mean_power - result.power_budget;
    ordered_json check;
    check["queue_over_horizon"] = lhs;
    check["mean_power_minus_budget"] = rhs;
    check["telescoping_ok"] = lhs >= rhs - 1e-9 * std::max(1.0, std::abs(rhs));
    doc["bound_check"] = check;
  } else {
    doc["bound_check"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

void write_summary(const RunResult& result, const std::string& path) {
  write_file(path, summary_to_json(result));
}

std::string bounds_to_json(const BoundsReport& report) {
  ordered_json doc;
  doc["format"] = kBoundsFormat;
  doc["V"] = report.v_weight;
  doc["Q"] = report.budget;
  doc["sum_power_caps"] = report.sum_power_caps;
  doc["seeds"] = report.seeds;
  doc["c_star_estimate"] = report.c_star_estimate;
  doc["p_star_estimate"] = report.p_star_estimate;
  doc["estimators"] = {{"c_star", "PCU mean delay cost"}, {"p_star", "DCU mean power"}};
  doc["mean_delay_cost"] = report.mean_delay_cost;
  doc["stderr_delay_cost"] = report.stderr_delay_cost;
  doc["delay_bound"] = report.delay_bound;
  doc["delay_ok"] = report.delay_ok;
  doc["mean_power"] = report.mean_power;
  doc["stderr_power"] = report.stderr_power;
  doc["power_bound_applicable"] = report.power_bound_applicable;
  if (report.power_bound_applicable) {
    doc["power_bound"] = report.power_bound;
    doc["power_ok"] = report.power_ok;
  } else {
    doc["power_bound"] = nullptr;
    doc["power_ok"] = nullptr;
  }
  doc["telescoping_ok"] = report.telescoping_ok;
  return doc.dump(2) + "\n";
}

void write_bounds(const BoundsReport& report, const std::string& path) {
  write_file(path, bounds_to_json(report));
}

std::string sweep_to_json(const SweepResult& result) {
  ordered_json doc;
  doc["format"] = kSweepFormat;
  doc["parameter"] = result.parameter;
  doc["points"] = ordered_json::array();
  for (const SweepPoint& p : result.points) {
    doc["points"].push_back({{"value", p.value},
                             {"mean_delay_cost", p.mean_delay_cost},
                             {"mean_power", p.mean_power},
                             {"mean_sleeping", p.mean_sleeping},
                             {"mean_local_fraction", p.mean_local_fraction},
                             {"stderr_delay_cost", p.stderr_delay_cost},
                             {"stderr_power", p.stderr_power}});
  }
  doc["trend"] = result.trend;
  return doc.dump(2) + "\n";
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::string out = "# edgesim-sweep-v1\n";
  out += "value,mean_delay_cost,mean_power,mean_sleeping,mean_local_fraction,"
         "stderr_delay_cost,stderr_power\n";
  for (const SweepPoint& p : result.points) {
    out += format_number(p.value);
    out += ',';
    out += format_number(p.mean_delay_cost);
    out += ',';
    out += format_number(p.mean_power);
    out += ',';
    out += format_number(p.mean_sleeping);
    out += ',';
    out += format_number(p.mean_local_fraction);
    out += ',';
    out += format_number(p.stderr_delay_cost);
    out += ',';
    out += format_number(p.stderr_power);
    out += '\n';
  }
  write_file(path, out);
}

void write_sweep_json(const SweepResult& result, const std::string& path) {
  write_file(path, sweep_to_json(result));
}

void write_rejo_trace(const RejoTrace& trace, const std::string& path) {
  std::string out = "# edgesim-rejo-trace-v1\n";
  out += "iteration,station,proposed_mode,objective,acceptance,accepted\n";
  for (const RejoTraceRow& row : trace.rows) {
    out += std::to_string(row.iteration);
    out += ',';
    out += std::to_string(row.station);
    out += ',';
    out += std::to_string(row.proposed_mode);
    out += ',';
    out += format_number(row.objective);
    out += ',';
    out += format_number(row.acceptance);
    out += row.accepted ? ",1\n" : ",0\n";
  }
  write_file(path, out);
}

}  // namespace edgesim

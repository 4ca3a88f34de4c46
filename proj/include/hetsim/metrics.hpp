#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsim/engine.hpp"
#include "hetsim/error.hpp"
#include "hetsim/scenario.hpp"

namespace hetsim {

struct LatencyStats {
  std::int64_t samples = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
};

struct TaskMetrics {
  std::int64_t released = 0;
  std::int64_t completed = 0;
  std::int64_t truncated = 0;
  std::int64_t dropped = 0;
  std::int64_t deadline_miss = 0;  // among completed instances
  double throughput_per_s = 0.0;   // completions per second
  LatencyStats latency;            // release-to-finish, completed instances
  double energy_mj = 0.0;          // includes partial energy of truncated work
};

struct UnitMetrics {
  std::string kind;
  std::int64_t instances = 0;
  double busy_ms = 0.0;  // union of busy intervals, reconfiguration included
  double utilization = 0.0;
  double energy_mj = 0.0;
};

struct Totals {
  double duration_s = 0.0;
  std::int64_t released = 0;
  std::int64_t completed = 0;
  double dynamic_energy_mj = 0.0;
  double static_energy_mj = 0.0;
  double total_energy_mj = 0.0;
  double average_power_w = 0.0;
};

struct MetricsReport {
  std::string scenario;
  std::string policy;
  std::map<std::string, TaskMetrics> tasks;
  std::map<std::string, UnitMetrics> units;
  Totals totals;
};

namespace detail {

// Nearest-rank percentile over an already sorted sample vector.
inline double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(sorted.size())));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

inline double merged_length_ms(std::vector<std::pair<TimeUs, TimeUs>>& ivs) {
  std::sort(ivs.begin(), ivs.end());
  TimeUs total = 0, cur_lo = 0, cur_hi = -1;
  bool open = false;
  for (const auto& [lo, hi] : ivs) {
    if (!open || lo > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return us_to_ms(total);
}

}  // namespace detail

// Fraction of the horizon a unit spent busy (execution plus reconfiguration),
// from the trace alone.
inline double utilization(const Trace& tr, std::uint32_t unit, TimeUs duration) {
  if (duration <= 0) throw ValidationError("non-positive duration");
  std::vector<std::pair<TimeUs, TimeUs>> ivs;
  for (const auto& r : tr.records) {
    if (r.unit != unit) continue;
    ivs.emplace_back(r.start - r.reconfig_us, r.finish);
  }
  return detail::merged_length_ms(ivs) / us_to_ms(duration);
}

// Static power plus dynamic energy spread over the horizon.
inline double average_power(const Trace& tr, const Scenario& sc) {
  if (tr.horizon <= 0) throw ValidationError("non-positive duration");
  EnergyUj dynamic_uj = 0;
  for (const auto& r : tr.records) dynamic_uj += r.energy_uj;
  return sc.platform.static_power_w +
         static_cast<double>(dynamic_uj) / static_cast<double>(tr.horizon);
}

inline MetricsReport summarize(const Trace& tr, const Scenario& sc) {
  MetricsReport rep;
  rep.scenario = sc.name;
  rep.policy = to_string(sc.policy);
  double duration_s = us_to_ms(tr.horizon) / 1000.0;

  std::map<std::string, std::vector<double>> lat;
  std::map<std::string, EnergyUj> task_energy;
  std::map<std::uint32_t, EnergyUj> unit_energy;
  std::map<std::uint32_t, std::int64_t> unit_instances;
  std::map<std::uint32_t, std::vector<std::pair<TimeUs, TimeUs>>> unit_ivs;

  for (std::size_t ti = 0; ti < tr.task_names.size(); ++ti) {
    TaskMetrics tm;
    tm.released = tr.released[ti];
    tm.completed = tr.completed[ti];
    tm.truncated = tr.truncated_count[ti];
    tm.dropped = tr.dropped[ti];
    tm.throughput_per_s = duration_s > 0.0 ? static_cast<double>(tm.completed) / duration_s : 0.0;
    rep.tasks[tr.task_names[ti]] = tm;
  }

  for (const auto& r : tr.records) {
    task_energy[r.task_name] += r.energy_uj;
    unit_energy[r.unit] += r.energy_uj;
    unit_instances[r.unit]++;
    unit_ivs[r.unit].emplace_back(r.start - r.reconfig_us, r.finish);
    if (!r.truncated) {
      lat[r.task_name].push_back(us_to_ms(r.finish - r.release));
      if (!r.deadline_met) rep.tasks[r.task_name].deadline_miss++;
    }
  }

  for (auto& [name, tm] : rep.tasks) {
    tm.energy_mj = uj_to_mj(task_energy[name]);
    auto& samples = lat[name];
    std::sort(samples.begin(), samples.end());
    tm.latency.samples = static_cast<std::int64_t>(samples.size());
    if (!samples.empty()) {
      double sum = 0.0;
      for (double v : samples) sum += v;
      tm.latency.mean_ms = sum / static_cast<double>(samples.size());
      tm.latency.p50_ms = detail::percentile(samples, 0.50);
      tm.latency.p95_ms = detail::percentile(samples, 0.95);
      tm.latency.p99_ms = detail::percentile(samples, 0.99);
      tm.latency.max_ms = samples.back();
    }
  }

  EnergyUj dynamic_uj = 0;
  for (std::uint32_t ui = 0; ui < sc.platform.units.size(); ++ui) {
    UnitMetrics um;
    um.kind = to_string(sc.platform.units[ui].kind);
    um.instances = unit_instances[ui];
    um.busy_ms = detail::merged_length_ms(unit_ivs[ui]);
    um.utilization = tr.horizon > 0 ? um.busy_ms / us_to_ms(tr.horizon) : 0.0;
    um.energy_mj = uj_to_mj(unit_energy[ui]);
    dynamic_uj += unit_energy[ui];
    rep.units[sc.platform.units[ui].id] = um;
  }

  rep.totals.duration_s = duration_s;
  for (std::size_t ti = 0; ti < tr.task_names.size(); ++ti) {
    rep.totals.released += tr.released[ti];
    rep.totals.completed += tr.completed[ti];
  }
  rep.totals.dynamic_energy_mj = uj_to_mj(dynamic_uj);
  rep.totals.static_energy_mj = sc.platform.static_power_w * duration_s * 1000.0;
  rep.totals.total_energy_mj = rep.totals.dynamic_energy_mj + rep.totals.static_energy_mj;
  rep.totals.average_power_w = average_power(tr, sc);
  return rep;
}

struct MetricDelta {
  double baseline = 0.0;
  double candidate = 0.0;
  double abs_delta = 0.0;
  double rel_delta = 0.0;  // against |baseline|, 0 when baseline is 0
};

struct CompareReport {
  std::string baseline;
  std::string candidate;
  std::map<std::string, std::map<std::string, MetricDelta>> tasks;
  std::map<std::string, MetricDelta> totals;
};

namespace detail {

inline MetricDelta delta(double base, double cand) {
  MetricDelta d;
  d.baseline = base;
  d.candidate = cand;
  d.abs_delta = cand - base;
  d.rel_delta = base != 0.0 ? (cand - base) / std::fabs(base) : 0.0;
  return d;
}

}  // namespace detail

inline CompareReport compare(const MetricsReport& a, const MetricsReport& b) {
  std::vector<std::string> only_a, only_b;
  for (const auto& [name, tm] : a.tasks)
    if (!b.tasks.count(name)) only_a.push_back(name);
  for (const auto& [name, tm] : b.tasks)
    if (!a.tasks.count(name)) only_b.push_back(name);
  if (!only_a.empty() || !only_b.empty()) {
    std::string msg = "task sets differ:";
    for (const auto& n : only_a) msg += " -" + n;
    for (const auto& n : only_b) msg += " +" + n;
    throw ValidationError(msg);
  }

  CompareReport cr;
  cr.baseline = a.scenario + "/" + a.policy;
  cr.candidate = b.scenario + "/" + b.policy;
  for (const auto& [name, base] : a.tasks) {
    const TaskMetrics& cand = b.tasks.at(name);
    auto& row = cr.tasks[name];
    row["throughput_per_s"] = detail::delta(base.throughput_per_s, cand.throughput_per_s);
    row["p95_ms"] = detail::delta(base.latency.p95_ms, cand.latency.p95_ms);
    row["energy_mj"] = detail::delta(base.energy_mj, cand.energy_mj);
  }
  cr.totals["total_energy_mj"] = detail::delta(a.totals.total_energy_mj, b.totals.total_energy_mj);
  cr.totals["average_power_w"] = detail::delta(a.totals.average_power_w, b.totals.average_power_w);
  cr.totals["completed"] = detail::delta(static_cast<double>(a.totals.completed),
                                         static_cast<double>(b.totals.completed));
  return cr;
}

inline nlohmann::json report_to_json(const MetricsReport& rep) {
  nlohmann::json j;
  j["scenario"] = rep.scenario;
  j["policy"] = rep.policy;
  j["tasks"] = nlohmann::json::object();
  for (const auto& [name, tm] : rep.tasks) {
    nlohmann::json jt;
    jt["released"] = tm.released;
    jt["completed"] = tm.completed;
    jt["truncated"] = tm.truncated;
    jt["dropped"] = tm.dropped;
    jt["deadline_miss"] = tm.deadline_miss;
    jt["throughput_per_s"] = tm.throughput_per_s;
    jt["latency"] = {{"samples", tm.latency.samples}, {"mean_ms", tm.latency.mean_ms},
                     {"p50_ms", tm.latency.p50_ms},   {"p95_ms", tm.latency.p95_ms},
                     {"p99_ms", tm.latency.p99_ms},   {"max_ms", tm.latency.max_ms}};
    jt["energy_mj"] = tm.energy_mj;
    j["tasks"][name] = std::move(jt);
  }
  j["units"] = nlohmann::json::object();
  for (const auto& [id, um] : rep.units) {
    j["units"][id] = {{"kind", um.kind},
                      {"instances", um.instances},
                      {"busy_ms", um.busy_ms},
                      {"utilization", um.utilization},
                      {"energy_mj", um.energy_mj}};
  }
  j["totals"] = {{"duration_s", rep.totals.duration_s},
                 {"released", rep.totals.released},
                 {"completed", rep.totals.completed},
                 {"dynamic_energy_mj", rep.totals.dynamic_energy_mj},
                 {"static_energy_mj", rep.totals.static_energy_mj},
                 {"total_energy_mj", rep.totals.total_energy_mj},
                 {"average_power_w", rep.totals.average_power_w}};
  return j;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport rep;
  rep.scenario = j.value("scenario", "");
  rep.policy = j.value("policy", "");
  for (const auto& [name, jt] : j.at("tasks").items()) {
    TaskMetrics tm;
    tm.released = jt.at("released").get<std::int64_t>();
    tm.completed = jt.at("completed").get<std::int64_t>();
    tm.truncated = jt.at("truncated").get<std::int64_t>();
    tm.dropped = jt.at("dropped").get<std::int64_t>();
    tm.deadline_miss = jt.at("deadline_miss").get<std::int64_t>();
    tm.throughput_per_s = jt.at("throughput_per_s").get<double>();
    const auto& jl = jt.at("latency");
    tm.latency.samples = jl.at("samples").get<std::int64_t>();
    tm.latency.mean_ms = jl.at("mean_ms").get<double>();
    tm.latency.p50_ms = jl.at("p50_ms").get<double>();
    tm.latency.p95_ms = jl.at("p95_ms").get<double>();
    tm.latency.p99_ms = jl.at("p99_ms").get<double>();
    tm.latency.max_ms = jl.at("max_ms").get<double>();
    tm.energy_mj = jt.at("energy_mj").get<double>();
    rep.tasks[name] = tm;
  }
  for (const auto& [id, ju] : j.at("units").items()) {
    UnitMetrics um;
    um.kind = ju.at("kind").get<std::string>();
    um.instances = ju.at("instances").get<std::int64_t>();
    um.busy_ms = ju.at("busy_ms").get<double>();
    um.utilization = ju.at("utilization").get<double>();
    um.energy_mj = ju.at("energy_mj").get<double>();
    rep.units[id] = um;
  }
  const auto& jt = j.at("totals");
  rep.totals.duration_s = jt.at("duration_s").get<double>();
  rep.totals.released = jt.at("released").get<std::int64_t>();
  rep.totals.completed = jt.at("completed").get<std::int64_t>();
  rep.totals.dynamic_energy_mj = jt.at("dynamic_energy_mj").get<double>();
  rep.totals.static_energy_mj = jt.at("static_energy_mj").get<double>();
  rep.totals.total_energy_mj = jt.at("total_energy_mj").get<double>();
  rep.totals.average_power_w = jt.at("average_power_w").get<double>();
  return rep;
}

inline nlohmann::json compare_to_json(const CompareReport& cr) {
  auto delta_json = [](const MetricDelta& d) {
    return nlohmann::json{{"baseline", d.baseline},
                          {"candidate", d.candidate},
                          {"abs_delta", d.abs_delta},
                          {"rel_delta", d.rel_delta}};
  };
  nlohmann::json j;
  j["baseline"] = cr.baseline;
  j["candidate"] = cr.candidate;
  j["tasks"] = nlohmann::json::object();
  for (const auto& [name, row] : cr.tasks) {
    for (const auto& [metric, d] : row) j["tasks"][name][metric] = delta_json(d);
  }
  j["totals"] = nlohmann::json::object();
  for (const auto& [metric, d] : cr.totals) j["totals"][metric] = delta_json(d);
  return j;
}

// Flat rows: section,name,metric,value. Values use JSON number formatting so
// a re-export of the same report is byte-identical.
inline void report_to_csv(const MetricsReport& rep, std::ostream& out) {
  auto num = [](double v) { return nlohmann::json(v).dump(); };
  out << "section,name,metric,value\n";
  for (const auto& [name, tm] : rep.tasks) {
    out << "task," << name << ",released," << tm.released << "\n";
    out << "task," << name << ",completed," << tm.completed << "\n";
    out << "task," << name << ",truncated," << tm.truncated << "\n";
    out << "task," << name << ",dropped," << tm.dropped << "\n";
    out << "task," << name << ",deadline_miss," << tm.deadline_miss << "\n";
    out << "task," << name << ",throughput_per_s," << num(tm.throughput_per_s) << "\n";
    out << "task," << name << ",mean_ms," << num(tm.latency.mean_ms) << "\n";
    out << "task," << name << ",p50_ms," << num(tm.latency.p50_ms) << "\n";
    out << "task," << name << ",p95_ms," << num(tm.latency.p95_ms) << "\n";
    out << "task," << name << ",p99_ms," << num(tm.latency.p99_ms) << "\n";
    out << "task," << name << ",max_ms," << num(tm.latency.max_ms) << "\n";
    out << "task," << name << ",energy_mj," << num(tm.energy_mj) << "\n";
  }
  for (const auto& [id, um] : rep.units) {
    out << "unit," << id << ",kind," << um.kind << "\n";
    out << "unit," << id << ",instances," << um.instances << "\n";
    out << "unit," << id << ",busy_ms," << num(um.busy_ms) << "\n";
    out << "unit," << id << ",utilization," << num(um.utilization) << "\n";
    out << "unit," << id << ",energy_mj," << num(um.energy_mj) << "\n";
  }
  out << "totals,,duration_s," << num(rep.totals.duration_s) << "\n";
  out << "totals,,released," << rep.totals.released << "\n";
  out << "totals,,completed," << rep.totals.completed << "\n";
  out << "totals,,dynamic_energy_mj," << num(rep.totals.dynamic_energy_mj) << "\n";
  out << "totals,,static_energy_mj," << num(rep.totals.static_energy_mj) << "\n";
  out << "totals,,total_energy_mj," << num(rep.totals.total_energy_mj) << "\n";
  out << "totals,,average_power_w," << num(rep.totals.average_power_w) << "\n";
}

}  // namespace hetsim

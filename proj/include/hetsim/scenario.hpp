#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsim/cost_model.hpp"
#include "hetsim/error.hpp"
#include "hetsim/platform.hpp"
#include "hetsim/scheduler.hpp"
#include "hetsim/workload.hpp"

namespace hetsim {

// A complete simulation input: hardware, workload, measured costs, policy.
struct Scenario {
  std::string name;
  PlatformSpec platform;
  TaskGraph graph;
  CostTable table;
  Policy policy = Policy::affinity_best;
  double duration_s = 10.0;
  std::uint64_t seed = 1;

  TimeUs duration_us() const { return ms_to_us(duration_s * 1000.0); }
};

namespace detail {

inline Trigger load_trigger(const nlohmann::json& j, const std::string& task) {
  if (!j.contains("type")) throw ValidationError("task '" + task + "': trigger missing type");
  std::string type = j["type"].get<std::string>();
  if (type == "periodic") {
    if (!j.contains("rate_hz")) throw ValidationError("task '" + task + "': periodic trigger missing rate_hz");
    return Periodic{j["rate_hz"].get<double>()};
  }
  if (type == "on_sensor") {
    if (!j.contains("sensor")) throw ValidationError("task '" + task + "': on_sensor trigger missing sensor");
    return OnSensor{j["sensor"].get<std::string>()};
  }
  if (type == "on_completion") {
    if (!j.contains("parent")) throw ValidationError("task '" + task + "': on_completion trigger missing parent");
    return OnCompletion{j["parent"].get<std::string>(), j.value("probability", 1.0)};
  }
  if (type == "batch_threshold") {
    if (!j.contains("stream")) throw ValidationError("task '" + task + "': batch_threshold trigger missing stream");
    if (!j.contains("threshold_bytes")) {
      throw ValidationError("task '" + task + "': batch_threshold trigger missing threshold_bytes");
    }
    return BatchThreshold{j["stream"].get<std::string>(), j["threshold_bytes"].get<double>()};
  }
  if (type == "safety_override") {
    if (!j.contains("sensor")) throw ValidationError("task '" + task + "': safety_override trigger missing sensor");
    return SafetyOverride{j["sensor"].get<std::string>()};
  }
  throw ValidationError("task '" + task + "': unknown trigger type '" + type + "'");
}

inline nlohmann::json trigger_to_json(const Trigger& t) {
  nlohmann::json j;
  if (const auto* p = std::get_if<Periodic>(&t)) {
    j["type"] = "periodic";
    j["rate_hz"] = p->rate_hz;
  } else if (const auto* os = std::get_if<OnSensor>(&t)) {
    j["type"] = "on_sensor";
    j["sensor"] = os->sensor;
  } else if (const auto* oc = std::get_if<OnCompletion>(&t)) {
    j["type"] = "on_completion";
    j["parent"] = oc->parent;
    j["probability"] = oc->probability;
  } else if (const auto* bt = std::get_if<BatchThreshold>(&t)) {
    j["type"] = "batch_threshold";
    j["stream"] = bt->stream;
    j["threshold_bytes"] = bt->threshold_bytes;
  } else if (const auto* so = std::get_if<SafetyOverride>(&t)) {
    j["type"] = "safety_override";
    j["sensor"] = so->sensor;
  }
  return j;
}

}  // namespace detail

inline Scenario load_scenario(const nlohmann::json& j) {
  Scenario sc;
  sc.name = j.value("name", "scenario");

  if (!j.contains("platform")) throw ValidationError("scenario: missing platform");
  sc.platform = load_platform(j["platform"]);

  if (!j.contains("cost_table") || !j["cost_table"].is_array() || j["cost_table"].empty()) {
    throw ValidationError("scenario: missing cost_table");
  }
  for (const auto& je : j["cost_table"]) {
    for (const char* field : {"task", "unit", "latency_ms", "energy_mj"}) {
      if (!je.contains(field)) throw ValidationError(std::string("cost_table entry missing ") + field);
    }
    sc.table.set_cost(je["task"].get<std::string>(), parse_unit_kind(je["unit"].get<std::string>()),
                      je["latency_ms"].get<double>(), je["energy_mj"].get<double>());
  }

  std::vector<SensorSpec> sensors;
  for (const auto& js : j.value("sensors", nlohmann::json::array())) {
    SensorSpec s;
    if (!js.contains("name")) throw ValidationError("sensor missing name");
    s.name = js["name"].get<std::string>();
    if (!js.contains("rate_hz")) throw ValidationError("sensor '" + s.name + "' missing rate_hz");
    s.rate_hz = js["rate_hz"].get<double>();
    s.bytes_per_event = js.value("bytes_per_event", 0.0);
    s.count = js.value("count", 1);
    sensors.push_back(std::move(s));
  }

  std::vector<TaskSpec> tasks;
  if (!j.contains("tasks") || !j["tasks"].is_array() || j["tasks"].empty()) {
    throw ValidationError("scenario: missing tasks");
  }
  for (const auto& jt : j["tasks"]) {
    TaskSpec t;
    if (!jt.contains("name")) throw ValidationError("task missing name");
    t.name = jt["name"].get<std::string>();
    t.stage = parse_stage(jt.value("stage", "other"));
    if (!jt.contains("trigger")) throw ValidationError("task '" + t.name + "': missing trigger");
    t.trigger = detail::load_trigger(jt["trigger"], t.name);
    if (jt.contains("deadline_ms")) t.deadline_ms = jt["deadline_ms"].get<double>();
    t.preferred_unit = parse_unit_kind(jt.value("preferred_unit", "cpu_core"));
    if (jt.contains("fpga_persona")) t.fpga_persona = jt["fpga_persona"].get<std::string>();
    t.output_bytes = jt.value("output_bytes", 0.0);
    t.output_stream = jt.value("output_stream", "");
    t.replicas = jt.value("replicas", 1);
    tasks.push_back(std::move(t));
  }

  sc.graph = build_task_graph(std::move(tasks), std::move(sensors));

  // Every task needs a measured cost somewhere, and on its preferred kind.
  for (const auto& t : sc.graph.tasks) {
    if (!sc.table.has_task(t.name)) {
      throw ValidationError("task '" + t.name + "': no cost_table entry");
    }
    if (!sc.table.find_cost(t.name, t.preferred_unit)) {
      throw ValidationError("task '" + t.name + "': no cost on preferred unit " + to_string(t.preferred_unit));
    }
  }

  sc.duration_s = j.value("duration_s", 10.0);
  if (sc.duration_s <= 0.0) throw ValidationError("scenario: non-positive duration_s");
  sc.policy = parse_policy(j.value("policy", "affinity"));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()) {
      throw ValidationError("scenario: seed must be an integer");
    }
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid JSON in '" + path + "': " + e.what());
  }
  return load_scenario(j);
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["name"] = sc.name;
  j["platform"] = platform_to_json(sc.platform);
  j["cost_table"] = nlohmann::json::array();
  for (const auto& [key, e] : sc.table.entries()) {
    nlohmann::json je;
    je["task"] = key.first;
    je["unit"] = to_string(key.second);
    je["latency_ms"] = e.latency_ms;
    je["energy_mj"] = e.energy_mj;
    j["cost_table"].push_back(std::move(je));
  }
  j["sensors"] = nlohmann::json::array();
  for (const auto& s : sc.graph.sensors) {
    nlohmann::json js;
    js["name"] = s.name;
    js["rate_hz"] = s.rate_hz;
    js["bytes_per_event"] = s.bytes_per_event;
    js["count"] = s.count;
    j["sensors"].push_back(std::move(js));
  }
  j["tasks"] = nlohmann::json::array();
  for (const auto& t : sc.graph.tasks) {
    nlohmann::json jt;
    jt["name"] = t.name;
    jt["stage"] = to_string(t.stage);
    jt["trigger"] = detail::trigger_to_json(t.trigger);
    if (t.deadline_ms) jt["deadline_ms"] = *t.deadline_ms;
    jt["preferred_unit"] = to_string(t.preferred_unit);
    if (t.fpga_persona) jt["fpga_persona"] = *t.fpga_persona;
    if (t.output_bytes > 0.0) jt["output_bytes"] = t.output_bytes;
    if (t.output_stream != t.name) jt["output_stream"] = t.output_stream;
    if (t.replicas != 1) jt["replicas"] = t.replicas;
    j["tasks"].push_back(std::move(jt));
  }
  j["duration_s"] = sc.duration_s;
  j["policy"] = to_string(sc.policy);
  j["seed"] = sc.seed;
  return j;
}

}  // namespace hetsim

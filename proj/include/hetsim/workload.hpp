#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hetsim/error.hpp"
#include "hetsim/types.hpp"

namespace hetsim {

struct SensorSpec {
  std::string name;
  double rate_hz = 0.0;
  double bytes_per_event = 0.0;
  int count = 1;
};

// Release rules. A task fires on a fixed period, on each event of a sensor,
// when a parent instance completes (with probability), when a byte stream
// accumulates past a threshold, or as a safety override on a sensor event.
struct Periodic { double rate_hz = 0.0; };
struct OnSensor { std::string sensor; };
struct OnCompletion { std::string parent; double probability = 1.0; };
struct BatchThreshold { std::string stream; double threshold_bytes = 0.0; };
struct SafetyOverride { std::string sensor; };

using Trigger = std::variant<Periodic, OnSensor, OnCompletion, BatchThreshold, SafetyOverride>;

enum class Stage { sensing, perception, decision, other };

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::sensing: return "sensing";
    case Stage::perception: return "perception";
    case Stage::decision: return "decision";
    case Stage::other: return "other";
  }
  return "?";
}

inline Stage parse_stage(const std::string& s) {
  if (s == "sensing") return Stage::sensing;
  if (s == "perception") return Stage::perception;
  if (s == "decision") return Stage::decision;
  if (s == "other") return Stage::other;
  throw ValidationError("unknown stage '" + s + "'");
}

struct TaskSpec {
  std::string name;
  Stage stage = Stage::other;
  Trigger trigger;
  std::optional<double> deadline_ms;
  UnitKind preferred_unit = UnitKind::cpu_core;
  std::optional<std::string> fpga_persona;
  double output_bytes = 0.0;
  std::string output_stream;  // defaults to the task name
  int replicas = 1;           // dedicated threads under static placement
};

struct TaskGraph {
  std::vector<TaskSpec> tasks;
  std::vector<SensorSpec> sensors;

  const TaskSpec* find_task(const std::string& name) const {
    for (const auto& t : tasks)
      if (t.name == name) return &t;
    return nullptr;
  }
  const SensorSpec* find_sensor(const std::string& name) const {
    for (const auto& s : sensors)
      if (s.name == name) return &s;
    return nullptr;
  }
};

namespace detail {

inline void check_completion_cycles(const TaskGraph& g) {
  // Only OnCompletion edges can form cycles; walk parent chains.
  std::map<std::string, std::string> parent_of;
  for (const auto& t : g.tasks) {
    if (const auto* oc = std::get_if<OnCompletion>(&t.trigger)) {
      parent_of[t.name] = oc->parent;
    }
  }
  for (const auto& t : g.tasks) {
    std::vector<std::string> chain{t.name};
    std::set<std::string> seen{t.name};
    std::string cur = t.name;
    while (true) {
      auto it = parent_of.find(cur);
      if (it == parent_of.end()) break;
      cur = it->second;
      chain.push_back(cur);
      if (!seen.insert(cur).second) {
        // Trim the chain to the cycle itself.
        auto start = std::find(chain.begin(), chain.end(), cur);
        std::string msg = "cycle ";
        for (auto p = start; p != chain.end(); ++p) {
          if (p != start) msg += " -> ";
          msg += *p;
        }
        throw ValidationError(msg);
      }
    }
  }
}

}  // namespace detail

// Validates name uniqueness, trigger references and override constraints.
inline TaskGraph build_task_graph(std::vector<TaskSpec> tasks, std::vector<SensorSpec> sensors) {
  TaskGraph g;
  g.tasks = std::move(tasks);
  g.sensors = std::move(sensors);

  std::set<std::string> sensor_names;
  for (const auto& s : g.sensors) {
    if (s.name.empty()) throw ValidationError("sensor with empty name");
    if (!sensor_names.insert(s.name).second) {
      throw ValidationError("duplicate sensor '" + s.name + "'");
    }
    if (s.rate_hz <= 0.0) throw ValidationError("sensor '" + s.name + "': non-positive rate");
    if (s.bytes_per_event < 0.0) throw ValidationError("sensor '" + s.name + "': negative payload");
    if (s.count < 1) throw ValidationError("sensor '" + s.name + "': count < 1");
  }

  std::set<std::string> task_names;
  for (auto& t : g.tasks) {
    if (t.name.empty()) throw ValidationError("task with empty name");
    if (!task_names.insert(t.name).second) {
      throw ValidationError("duplicate task '" + t.name + "'");
    }
    if (t.output_stream.empty()) t.output_stream = t.name;
    if (t.output_bytes < 0.0) throw ValidationError("task '" + t.name + "': negative output_bytes");
    if (t.replicas < 1) throw ValidationError("task '" + t.name + "': replicas < 1");
    if (t.deadline_ms && *t.deadline_ms <= 0.0) {
      throw ValidationError("task '" + t.name + "': non-positive deadline");
    }
  }

  std::set<std::string> streams;
  for (const auto& t : g.tasks) streams.insert(t.output_stream);

  for (const auto& t : g.tasks) {
    if (const auto* p = std::get_if<Periodic>(&t.trigger)) {
      if (p->rate_hz <= 0.0) throw ValidationError("task '" + t.name + "': non-positive rate");
    } else if (const auto* os = std::get_if<OnSensor>(&t.trigger)) {
      if (!sensor_names.count(os->sensor)) {
        throw ValidationError("unknown trigger source: task '" + t.name + "' on sensor '" + os->sensor + "'");
      }
    } else if (const auto* oc = std::get_if<OnCompletion>(&t.trigger)) {
      if (!task_names.count(oc->parent)) {
        throw ValidationError("unknown trigger source: task '" + t.name + "' on completion of '" + oc->parent + "'");
      }
      if (oc->parent == t.name) throw ValidationError("cycle " + t.name + " -> " + t.name);
      if (oc->probability < 0.0 || oc->probability > 1.0) {
        throw ValidationError("task '" + t.name + "': probability outside [0, 1]");
      }
    } else if (const auto* bt = std::get_if<BatchThreshold>(&t.trigger)) {
      if (!streams.count(bt->stream)) {
        throw ValidationError("unknown trigger source: task '" + t.name + "' on stream '" + bt->stream + "'");
      }
      if (bt->threshold_bytes <= 0.0) {
        throw ValidationError("task '" + t.name + "': non-positive batch threshold");
      }
    } else if (const auto* so = std::get_if<SafetyOverride>(&t.trigger)) {
      if (!sensor_names.count(so->sensor)) {
        throw ValidationError("unknown trigger source: task '" + t.name + "' on sensor '" + so->sensor + "'");
      }
      if (t.preferred_unit != UnitKind::cpu_core) {
        throw ValidationError("task '" + t.name + "': safety override must target cpu_core");
      }
    }
  }

  detail::check_completion_cycles(g);
  return g;
}

// Merged, time-sorted stream of sensor firings over [0, duration). Each
// sensor with count N contributes N simultaneous events per tick. Ties sort
// by (time, sensor name). Event k of a sensor lands at round(k / rate).
inline std::vector<std::pair<TimeUs, std::string>> sensor_event_stream(
    const std::vector<SensorSpec>& sensors, double duration_s) {
  if (duration_s < 0.0) throw ValidationError("negative duration");
  TimeUs horizon = ms_to_us(duration_s * 1000.0);
  std::vector<std::pair<TimeUs, std::string>> events;
  for (const auto& s : sensors) {
    if (s.rate_hz <= 0.0) throw ValidationError("sensor '" + s.name + "': non-positive rate");
    for (std::int64_t k = 0;; ++k) {
      TimeUs t = static_cast<TimeUs>(std::llround(static_cast<double>(k) * 1e6 / s.rate_hz));
      if (t >= horizon) break;
      for (int c = 0; c < s.count; ++c) events.emplace_back(t, s.name);
    }
  }
  std::stable_sort(events.begin(), events.end());
  return events;
}

// Aggregate bytes/second a sensor array produces.
inline double data_rate(const SensorSpec& s) {
  return s.rate_hz * s.bytes_per_event * s.count;
}

// Worst-case position drift between consecutive fix updates at a given speed.
// speed in m/s, update rate in Hz; result in meters.
inline double localization_error_bound(double speed_mps, double update_rate_hz) {
  if (update_rate_hz <= 0.0) throw ValidationError("non-positive update rate");
  return speed_mps / update_rate_hz;
}

}  // namespace hetsim

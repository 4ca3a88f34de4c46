#pragma once

#include <json.hpp>

#include "hetsim/calibration.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/presets.hpp"

namespace hetsim {

struct Calibration {
  double duration_s = 60.0;
  double localization_latency_ms = 0.0;
  double recognition_latency_ms = 0.0;
  double dynamic_power_w = 0.0;
  double static_power_w = 0.0;
  double target_power_w = 11.0;
  double localization_throughput_per_s = 0.0;
  double recognition_throughput_per_s = 0.0;
  double average_power_w = 0.0;  // with the fitted static power applied
};

// Fits the mobile SoC's residual power: simulate the pipeline with zero
// static draw, measure dynamic consumption, take the residual against the
// 11 W platform measurement.
inline Calibration run_mobile_soc_calibration(double duration_s = 60.0) {
  if (duration_s <= 0.0) throw ValidationError("non-positive duration");
  Calibration cal;
  cal.duration_s = duration_s;
  cal.localization_latency_ms = calibrate_stage_latency(25.0, 2);
  cal.recognition_latency_ms = calibrate_stage_latency(2.5, 1);

  Scenario sc = preset_mobile_soc();
  sc.duration_s = duration_s;
  sc.platform.static_power_w = 0.0;
  Trace tr = run(sc);
  MetricsReport rep = summarize(tr, sc);

  cal.dynamic_power_w = rep.totals.average_power_w;
  cal.static_power_w = calibrate_static_power(cal.target_power_w, cal.dynamic_power_w);
  cal.localization_throughput_per_s = rep.tasks.at("localization_solve").throughput_per_s;
  cal.recognition_throughput_per_s = rep.tasks.at("recognition").throughput_per_s;
  cal.average_power_w = cal.static_power_w + cal.dynamic_power_w;
  return cal;
}

inline nlohmann::json calibration_to_json(const Calibration& c) {
  nlohmann::json j;
  j["duration_s"] = c.duration_s;
  j["localization_latency_ms"] = c.localization_latency_ms;
  j["recognition_latency_ms"] = c.recognition_latency_ms;
  j["dynamic_power_w"] = c.dynamic_power_w;
  j["static_power_w"] = c.static_power_w;
  j["target_power_w"] = c.target_power_w;
  j["localization_throughput_per_s"] = c.localization_throughput_per_s;
  j["recognition_throughput_per_s"] = c.recognition_throughput_per_s;
  j["average_power_w"] = c.average_power_w;
  return j;
}

}  // namespace hetsim

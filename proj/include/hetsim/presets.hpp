#pragma once

#include <string>
#include <vector>

#include "hetsim/calibration.hpp"
#include "hetsim/error.hpp"
#include "hetsim/scenario.hpp"

namespace hetsim {

// Residual (non-task) power of the mobile SoC platform, fitted so the
// pipeline's simulated average draw lands on the 11 W measurement. Derived by
// run_mobile_soc_calibration(); pinned here so presets are self-contained.
inline constexpr double kMobileSocStaticPowerW = 3.1920472166666665;

inline CostTable mobile_soc_cost_table() {
  CostTable t = canonical_cost_table();
  double loc_lat = calibrate_stage_latency(25.0, 2);   // two pinned threads, 25 fixes/s
  double rec_lat = calibrate_stage_latency(2.5, 1);    // saturated engine, 2.5 objects/s
  t.set_cost("localization_solve", UnitKind::cpu_core, loc_lat,
             derive_task_energy(loc_lat, UnitKind::cpu_core, canonical_cost_table()));
  t.set_cost("recognition", UnitKind::gpu, rec_lat,
             derive_task_energy(rec_lat, UnitKind::gpu, canonical_cost_table()));
  t.set_cost("planning", UnitKind::cpu_core, 4.0, 10.0);
  t.set_cost("obstacle_avoidance", UnitKind::cpu_core, 2.0, 5.0);
  t.set_cost("radar_override", UnitKind::cpu_core, 1.0, 2.5);
  t.set_cost("tracking", UnitKind::fpga, 15.0, 30.0);
  t.set_cost("traffic_prediction", UnitKind::fpga, 20.0, 40.0);
  t.set_cost("upload", UnitKind::fpga, 10.0, 20.0);
  return t;
}

namespace detail {

inline PlatformSpec mobile_soc_platform() {
  PlatformSpec p;
  p.name = "mobile-soc";
  for (int i = 0; i < 4; ++i) {
    p.units.push_back({"cpu" + std::to_string(i), UnitKind::cpu_core, 2.5, {}, {}});
  }
  p.units.push_back({"gpu0", UnitKind::gpu, 2.25, {}, {}});
  p.units.push_back({"dsp0", UnitKind::dsp, 1.5, {}, {}});
  p.units.push_back({"fpga0", UnitKind::fpga, 2.0, {}, 3.0});
  p.static_power_w = kMobileSocStaticPowerW;
  p.uplink_bytes_per_s = 1.25e8;
  return p;
}

inline std::vector<TaskSpec> vision_pipeline_tasks() {
  std::vector<TaskSpec> tasks;
  TaskSpec fe;
  fe.name = "feature_extraction";
  fe.stage = Stage::sensing;
  fe.trigger = OnSensor{"camera"};
  fe.preferred_unit = UnitKind::dsp;
  fe.output_bytes = 100000.0;
  fe.output_stream = "cloud";
  tasks.push_back(fe);

  TaskSpec loc;
  loc.name = "localization_solve";
  loc.stage = Stage::perception;
  loc.trigger = OnCompletion{"feature_extraction", 1.0};
  loc.preferred_unit = UnitKind::cpu_core;
  loc.replicas = 2;
  tasks.push_back(loc);

  TaskSpec rec;
  rec.name = "recognition";
  rec.stage = Stage::perception;
  rec.trigger = OnSensor{"camera"};
  rec.preferred_unit = UnitKind::gpu;
  tasks.push_back(rec);

  TaskSpec track;
  track.name = "tracking";
  track.stage = Stage::perception;
  track.trigger = OnCompletion{"recognition", 1.0};
  track.preferred_unit = UnitKind::fpga;
  track.fpga_persona = "tracking";
  tasks.push_back(track);

  TaskSpec pred;
  pred.name = "traffic_prediction";
  pred.stage = Stage::decision;
  pred.trigger = OnCompletion{"tracking", 1.0};
  pred.preferred_unit = UnitKind::fpga;
  pred.fpga_persona = "traffic-prediction";
  tasks.push_back(pred);

  TaskSpec plan;
  plan.name = "planning";
  plan.stage = Stage::decision;
  plan.trigger = Periodic{10.0};
  plan.preferred_unit = UnitKind::cpu_core;
  plan.deadline_ms = 6.0;
  tasks.push_back(plan);

  TaskSpec avoid;
  avoid.name = "obstacle_avoidance";
  avoid.stage = Stage::decision;
  avoid.trigger = Periodic{10.0};
  avoid.preferred_unit = UnitKind::cpu_core;
  tasks.push_back(avoid);

  TaskSpec radar;
  radar.name = "radar_override";
  radar.stage = Stage::other;
  radar.trigger = SafetyOverride{"radar"};
  radar.preferred_unit = UnitKind::cpu_core;
  radar.deadline_ms = 2.0;
  tasks.push_back(radar);

  TaskSpec up;
  up.name = "upload";
  up.stage = Stage::other;
  up.trigger = BatchThreshold{"cloud", 3e6};
  up.preferred_unit = UnitKind::fpga;
  up.fpga_persona = "compression-upload";
  tasks.push_back(up);
  return tasks;
}

}  // namespace detail

// Smartphone-class SoC (quad CPU + GPU + DSP + FPGA fabric) running the full
// camera-to-control pipeline with a safety override on radar.
inline Scenario preset_mobile_soc() {
  Scenario sc;
  sc.name = "mobile-soc";
  sc.platform = detail::mobile_soc_platform();
  sc.table = mobile_soc_cost_table();
  std::vector<SensorSpec> sensors{
      {"camera", 30.0, 1e6, 1},
      {"gps", 10.0, 128.0, 1},
      {"imu", 200.0, 64.0, 1},
      {"radar", 10.0, 64.0, 1},
  };
  sc.graph = build_task_graph(detail::vision_pipeline_tasks(), std::move(sensors));
  sc.policy = Policy::affinity_best;
  sc.duration_s = 10.0;
  sc.seed = 1;
  return sc;
}

// Server box: dual-socket class CPU split into 12 cores plus 8 discrete
// accelerator cards. Heavy periodic vision load, throughput policy.
inline Scenario preset_datacenter() {
  Scenario sc;
  sc.name = "datacenter-box";
  PlatformSpec p;
  p.name = "datacenter-box";
  for (int i = 0; i < 12; ++i) {
    p.units.push_back({"xeon" + std::to_string(i), UnitKind::cpu_core, 400.0 / 12.0, 0.4 / 12.0, {}});
  }
  for (int i = 0; i < 8; ++i) {
    p.units.push_back({"k80_" + std::to_string(i), UnitKind::gpu, 300.0, 8.0, {}});
  }
  p.static_power_w = 0.0;
  p.uplink_bytes_per_s = 1e9;
  sc.platform = std::move(p);

  sc.table = canonical_cost_table();
  sc.table.set_cost("planning", UnitKind::cpu_core, 4.0, 10.0);

  std::vector<SensorSpec> sensors{
      {"camera", 60.0, 3.75e6, 12},
      {"lidar", 10.0, 520000.0, 1},
  };
  std::vector<TaskSpec> tasks;
  TaskSpec conv;
  conv.name = "convolution";
  conv.stage = Stage::perception;
  conv.trigger = Periodic{200.0};
  conv.preferred_unit = UnitKind::gpu;
  tasks.push_back(conv);
  TaskSpec fe;
  fe.name = "feature_extraction";
  fe.stage = Stage::sensing;
  fe.trigger = Periodic{100.0};
  fe.preferred_unit = UnitKind::gpu;
  tasks.push_back(fe);
  TaskSpec plan;
  plan.name = "planning";
  plan.stage = Stage::decision;
  plan.trigger = Periodic{100.0};
  plan.preferred_unit = UnitKind::cpu_core;
  plan.deadline_ms = 6.0;
  tasks.push_back(plan);
  sc.graph = build_task_graph(std::move(tasks), std::move(sensors));

  sc.policy = Policy::max_throughput;
  sc.duration_s = 10.0;
  sc.seed = 1;
  return sc;
}

// Production sensor rig: eight 60 Hz cameras (1.8 GB/s aggregate) plus lidar,
// gps, imu and radar feeding the mobile SoC pipeline.
inline Scenario preset_production_cameras() {
  Scenario sc = preset_mobile_soc();
  sc.name = "production-cameras";
  std::vector<SensorSpec> sensors{
      {"camera", 60.0, 3.75e6, 8},
      {"lidar", 10.0, 520000.0, 1},
      {"gps", 10.0, 128.0, 1},
      {"imu", 200.0, 64.0, 1},
      {"radar", 10.0, 64.0, 1},
  };
  sc.graph = build_task_graph(detail::vision_pipeline_tasks(), std::move(sensors));
  return sc;
}

inline std::vector<std::string> preset_names() {
  return {"mobile-soc", "datacenter-box", "production-cameras"};
}

inline std::string preset_description(const std::string& name) {
  if (name == "mobile-soc") {
    return "quad-core CPU + GPU + DSP + FPGA smartphone SoC running the full driving pipeline";
  }
  if (name == "datacenter-box") {
    return "12-core server CPU with 8 accelerator cards under saturating periodic vision load";
  }
  if (name == "production-cameras") {
    return "mobile SoC pipeline fed by a production rig: 8 cameras at 60 Hz plus lidar/gps/imu/radar";
  }
  throw ValidationError("unknown preset '" + name + "'");
}

inline Scenario make_preset(const std::string& name) {
  if (name == "mobile-soc") return preset_mobile_soc();
  if (name == "datacenter-box") return preset_datacenter();
  if (name == "production-cameras") return preset_production_cameras();
  throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace hetsim

#pragma once

#include "hetsim/cost_model.hpp"
#include "hetsim/error.hpp"
#include "hetsim/types.hpp"

namespace hetsim {

// Per-instance latency (ms) that makes `replicas` parallel workers sustain
// the target stage throughput.
inline double calibrate_stage_latency(double target_per_s, int replicas) {
  if (target_per_s <= 0.0) throw ValidationError("non-positive target throughput");
  if (replicas < 1) throw ValidationError("replicas < 1");
  return 1000.0 * static_cast<double>(replicas) / target_per_s;
}

// Residual platform power once dynamic consumption is accounted for.
inline double calibrate_static_power(double target_average_w, double dynamic_average_w) {
  if (target_average_w < 0.0 || dynamic_average_w < 0.0) {
    throw ValidationError("negative power");
  }
  if (dynamic_average_w > target_average_w) {
    throw ValidationError("infeasible calibration: dynamic power exceeds target");
  }
  return target_average_w - dynamic_average_w;
}

// Energy (mJ) a task of the given latency costs on a unit kind, using the
// power rate the cost table implies for that kind.
inline double derive_task_energy(double latency_ms, UnitKind kind, const CostTable& table) {
  if (latency_ms <= 0.0) throw ValidationError("non-positive latency");
  return latency_ms * active_power(table, kind);
}

}  // namespace hetsim

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsim/error.hpp"
#include "hetsim/types.hpp"

namespace hetsim {

struct ComputeUnit {
  std::string id;
  UnitKind kind = UnitKind::cpu_core;
  double active_power_w = 0.0;
  std::optional<double> peak_tops;
  // Only meaningful for FPGA units: latency of swapping the loaded soft core.
  std::optional<double> fpga_reconfig_ms;

  double reconfig_ms() const { return fpga_reconfig_ms.value_or(3.0); }
  TimeUs reconfig_us() const { return ms_to_us(reconfig_ms()); }
};

struct PlatformSpec {
  std::string name;
  std::vector<ComputeUnit> units;
  double static_power_w = 0.0;
  double uplink_bytes_per_s = 0.0;
};

inline void validate_platform(const PlatformSpec& p) {
  if (p.units.empty()) throw ValidationError("platform: no compute units");
  if (p.static_power_w < 0.0) throw ValidationError("platform: negative static power");
  if (p.uplink_bytes_per_s < 0.0) throw ValidationError("platform: negative uplink rate");
  std::set<std::string> ids;
  for (const auto& u : p.units) {
    if (u.id.empty()) throw ValidationError("platform: unit with empty id");
    if (!ids.insert(u.id).second) throw ValidationError("platform: duplicate unit id '" + u.id + "'");
    if (u.active_power_w <= 0.0) {
      throw ValidationError("platform: non-positive power for unit '" + u.id + "'");
    }
    if (u.peak_tops && *u.peak_tops <= 0.0) {
      throw ValidationError("platform: non-positive peak_tops for unit '" + u.id + "'");
    }
    if (u.fpga_reconfig_ms) {
      if (u.kind != UnitKind::fpga) {
        throw ValidationError("platform: fpga_reconfig_ms on non-FPGA unit '" + u.id + "'");
      }
      if (*u.fpga_reconfig_ms < 0.0) {
        throw ValidationError("platform: negative fpga_reconfig_ms for unit '" + u.id + "'");
      }
    }
  }
}

inline PlatformSpec load_platform(const nlohmann::json& j) {
  PlatformSpec p;
  p.name = j.value("name", "");
  if (!j.contains("units") || !j["units"].is_array()) {
    throw ValidationError("platform: missing units array");
  }
  for (const auto& ju : j["units"]) {
    ComputeUnit u;
    if (!ju.contains("id")) throw ValidationError("platform: unit missing id");
    u.id = ju["id"].get<std::string>();
    if (!ju.contains("kind")) throw ValidationError("platform: unit '" + u.id + "' missing kind");
    u.kind = parse_unit_kind(ju["kind"].get<std::string>());
    if (!ju.contains("active_power_w")) {
      throw ValidationError("platform: unit '" + u.id + "' missing active_power_w");
    }
    u.active_power_w = ju["active_power_w"].get<double>();
    if (ju.contains("peak_tops")) u.peak_tops = ju["peak_tops"].get<double>();
    if (ju.contains("fpga_reconfig_ms")) u.fpga_reconfig_ms = ju["fpga_reconfig_ms"].get<double>();
    p.units.push_back(std::move(u));
  }
  p.static_power_w = j.value("static_power_w", 0.0);
  p.uplink_bytes_per_s = j.value("uplink_bytes_per_s", 0.0);
  validate_platform(p);
  return p;
}

inline nlohmann::json platform_to_json(const PlatformSpec& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["units"] = nlohmann::json::array();
  for (const auto& u : p.units) {
    nlohmann::json ju;
    ju["id"] = u.id;
    ju["kind"] = to_string(u.kind);
    ju["active_power_w"] = u.active_power_w;
    if (u.peak_tops) ju["peak_tops"] = *u.peak_tops;
    if (u.fpga_reconfig_ms) ju["fpga_reconfig_ms"] = *u.fpga_reconfig_ms;
    j["units"].push_back(std::move(ju));
  }
  j["static_power_w"] = p.static_power_w;
  j["uplink_bytes_per_s"] = p.uplink_bytes_per_s;
  return j;
}

struct Capability {
  double tops = 0.0;
  double watts = 0.0;
};

// Sum of peak compute and worst-case power across all units. Every unit must
// declare peak_tops for the compute sum to mean anything.
inline Capability aggregate_capability(const PlatformSpec& p) {
  Capability c;
  for (const auto& u : p.units) {
    if (!u.peak_tops) {
      throw ValidationError("capability unknown: unit '" + u.id + "' has no peak_tops");
    }
    c.tops += *u.peak_tops;
    c.watts += u.active_power_w;
  }
  c.watts += p.static_power_w;
  return c;
}

}  // namespace hetsim

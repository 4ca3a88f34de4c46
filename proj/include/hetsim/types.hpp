#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "hetsim/error.hpp"

namespace hetsim {

// All simulation time is kept in integer microseconds and all energy in
// integer microjoules. Schema-facing values stay in ms / mJ doubles and are
// converted exactly once at the boundary, so replays are bit-exact.
using TimeUs = std::int64_t;
using EnergyUj = std::int64_t;

enum class UnitKind { cpu_core, gpu, dsp, fpga };

inline std::string to_string(UnitKind k) {
  switch (k) {
    case UnitKind::cpu_core: return "cpu_core";
    case UnitKind::gpu: return "gpu";
    case UnitKind::dsp: return "dsp";
    case UnitKind::fpga: return "fpga";
  }
  return "?";
}

inline UnitKind parse_unit_kind(std::string_view s) {
  if (s == "cpu_core" || s == "cpu") return UnitKind::cpu_core;
  if (s == "gpu") return UnitKind::gpu;
  if (s == "dsp") return UnitKind::dsp;
  if (s == "fpga") return UnitKind::fpga;
  throw ValidationError("unknown unit kind '" + std::string(s) + "'");
}

inline TimeUs ms_to_us(double ms) { return static_cast<TimeUs>(std::llround(ms * 1000.0)); }
inline double us_to_ms(TimeUs us) { return static_cast<double>(us) / 1000.0; }

inline EnergyUj mj_to_uj(double mj) { return static_cast<EnergyUj>(std::llround(mj * 1000.0)); }
inline double uj_to_mj(EnergyUj uj) { return static_cast<double>(uj) / 1000.0; }

}  // namespace hetsim

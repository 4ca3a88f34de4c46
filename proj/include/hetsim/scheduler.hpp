#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hetsim/cost_model.hpp"
#include "hetsim/error.hpp"
#include "hetsim/platform.hpp"
#include "hetsim/types.hpp"

namespace hetsim {

enum class Policy { affinity_best, max_throughput, min_latency, min_energy };

inline std::string to_string(Policy p) {
  switch (p) {
    case Policy::affinity_best: return "affinity";
    case Policy::max_throughput: return "throughput";
    case Policy::min_latency: return "latency";
    case Policy::min_energy: return "energy";
  }
  return "?";
}

inline Policy parse_policy(const std::string& s) {
  if (s == "affinity" || s == "affinity_best") return Policy::affinity_best;
  if (s == "throughput" || s == "max_throughput") return Policy::max_throughput;
  if (s == "latency" || s == "min_latency") return Policy::min_latency;
  if (s == "energy" || s == "min_energy") return Policy::min_energy;
  throw ValidationError("unknown policy '" + s + "'");
}

// Scheduler-facing view of one execution slot. For CPUs a unit may expose
// several of these (one per pinned thread); for GPU/DSP/FPGA exactly one.
struct UnitState {
  std::uint32_t unit = 0;  // index into PlatformSpec::units
  UnitKind kind = UnitKind::cpu_core;
  TimeUs busy_until = 0;
  std::string loaded_persona;  // FPGA only; empty = nothing loaded
  int thread_load = 1;         // CPU time-sharing multiplier
};

struct Assignment {
  std::size_t slot = 0;   // index into the candidate UnitState span
  TimeUs start = 0;       // when execution begins (after any reconfiguration)
  TimeUs finish = 0;
  EnergyUj energy = 0;    // task energy; excludes reconfiguration
  TimeUs reconfig = 0;    // reconfiguration latency paid, 0 if none
};

// Static time-sharing: a core running `threads` pinned threads stretches each
// by that factor.
inline TimeUs cpu_multiplex_latency(double base_ms, int threads) {
  if (threads < 1) throw ValidationError("thread count < 1");
  return ms_to_us(base_ms) * threads;
}

struct FpgaAdmit {
  TimeUs start = 0;     // when the task itself can begin
  TimeUs reconfig = 0;  // swap latency charged before it, 0 if persona matches
};

// FPGA persona time-sharing: a matching loaded persona runs immediately once
// the fabric is free; anything else pays one reconfiguration first.
inline FpgaAdmit fpga_admit(const std::string& persona, const UnitState& state,
                            TimeUs now, TimeUs reconfig_us) {
  FpgaAdmit a;
  TimeUs free_at = std::max(now, state.busy_until);
  if (state.loaded_persona == persona) {
    a.start = free_at;
    a.reconfig = 0;
  } else {
    a.start = free_at + reconfig_us;
    a.reconfig = reconfig_us;
  }
  return a;
}

// Candidate slots a task may run on: every slot whose kind has a cost entry.
// Indices into `slots`; throws if the task can run nowhere on this platform.
inline std::vector<std::size_t> feasible_units(const std::string& task, const CostTable& table,
                                               const std::vector<UnitState>& slots) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (table.find_cost(task, slots[i].kind)) out.push_back(i);
  }
  if (out.empty()) {
    throw ValidationError("unschedulable task '" + task + "': no feasible unit");
  }
  return out;
}

// Picks a slot among `candidates` under `policy`. `persona` is empty for
// non-FPGA placements. Ties always break toward the lower platform unit
// index, then lower slot index, so decisions replay identically.
inline Assignment assign(const std::string& task, const std::string& persona,
                         const std::vector<UnitState>& slots,
                         const std::vector<std::size_t>& candidates, Policy policy,
                         const CostTable& table, const PlatformSpec& platform, TimeUs now) {
  if (candidates.empty()) {
    throw ValidationError("unschedulable task '" + task + "': no feasible unit");
  }

  struct Scored {
    Assignment a;
    TimeUs completion;
    EnergyUj energy_key;
    std::uint32_t unit;
    std::size_t slot;
  };

  std::optional<Scored> best;
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    std::size_t si = candidates[ci];
    const UnitState& st = slots[si];
    const CostEntry& cost = table.unit_cost(task, st.kind);
    const ComputeUnit& cu = platform.units[st.unit];

    Scored s;
    s.a.slot = si;
    s.unit = st.unit;
    s.slot = si;

    if (st.kind == UnitKind::fpga) {
      FpgaAdmit adm = fpga_admit(persona, st, now, cu.reconfig_us());
      s.a.start = adm.start;
      s.a.reconfig = adm.reconfig;
      s.a.finish = adm.start + cost.latency_us();
    } else {
      TimeUs eff = cost.latency_us();
      if (st.kind == UnitKind::cpu_core) eff = cpu_multiplex_latency(cost.latency_ms, st.thread_load);
      s.a.start = std::max(now, st.busy_until);
      s.a.reconfig = 0;
      s.a.finish = s.a.start + eff;
    }
    s.a.energy = cost.energy_uj();
    s.completion = s.a.finish;

    s.energy_key = cost.energy_uj();
    if (s.a.reconfig > 0) {
      // A persona swap burns fabric power for the whole swap.
      s.energy_key += static_cast<EnergyUj>(std::llround(
          static_cast<double>(s.a.reconfig) * cu.active_power_w));
    }

    bool better = false;
    if (!best) {
      better = true;
    } else {
      switch (policy) {
        case Policy::affinity_best: {
          TimeUs b0 = std::max(now, slots[best->slot].busy_until);
          TimeUs c0 = std::max(now, st.busy_until);
          better = c0 < b0 || (c0 == b0 && (s.unit < best->unit || (s.unit == best->unit && s.slot < best->slot)));
          break;
        }
        case Policy::max_throughput:
        case Policy::min_latency:
          better = s.completion < best->completion ||
                   (s.completion == best->completion &&
                    (s.unit < best->unit || (s.unit == best->unit && s.slot < best->slot)));
          break;
        case Policy::min_energy:
          better = s.energy_key < best->energy_key ||
                   (s.energy_key == best->energy_key &&
                    (s.completion < best->completion ||
                     (s.completion == best->completion &&
                      (s.unit < best->unit || (s.unit == best->unit && s.slot < best->slot)))));
          break;
      }
    }
    if (better) best = s;
  }
  return best->a;
}

}  // namespace hetsim

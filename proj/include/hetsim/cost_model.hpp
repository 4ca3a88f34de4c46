#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hetsim/error.hpp"
#include "hetsim/types.hpp"

namespace hetsim {

// One (task, unit-kind) measurement: how long the task runs on that kind of
// unit and how much dynamic energy one execution costs.
struct CostEntry {
  double latency_ms = 0.0;
  double energy_mj = 0.0;

  TimeUs latency_us() const { return ms_to_us(latency_ms); }
  EnergyUj energy_uj() const { return mj_to_uj(energy_mj); }
};

class CostTable {
public:
  void set_cost(const std::string& task, UnitKind kind, double latency_ms, double energy_mj) {
    if (latency_ms <= 0.0) {
      throw ValidationError("cost_table: non-positive latency for task '" + task + "' on " + to_string(kind));
    }
    if (energy_mj <= 0.0) {
      throw ValidationError("cost_table: non-positive energy for task '" + task + "' on " + to_string(kind));
    }
    entries_[{task, kind}] = CostEntry{latency_ms, energy_mj};
  }

  // Throws if the task has no cost on this unit kind (i.e. cannot run there).
  const CostEntry& unit_cost(const std::string& task, UnitKind kind) const {
    auto it = entries_.find({task, kind});
    if (it == entries_.end()) {
      throw ValidationError("no affinity: task '" + task + "' has no cost on " + to_string(kind));
    }
    return it->second;
  }

  const CostEntry* find_cost(const std::string& task, UnitKind kind) const {
    auto it = entries_.find({task, kind});
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool has_task(const std::string& task) const {
    for (const auto& [key, entry] : entries_) {
      if (key.first == task) return true;
    }
    return false;
  }

  // Unit kinds the task can run on, in kind order.
  std::vector<UnitKind> affinity_kinds(const std::string& task) const {
    std::vector<UnitKind> kinds;
    for (const auto& [key, entry] : entries_) {
      if (key.first == task) kinds.push_back(key.second);
    }
    return kinds;
  }

  const std::map<std::pair<std::string, UnitKind>, CostEntry>& entries() const { return entries_; }

private:
  std::map<std::pair<std::string, UnitKind>, CostEntry> entries_;
};

// Mean dynamic power implied by the table for one unit kind, in watts
// (mJ / ms == W). The table is only self-consistent if every task burns
// power at the same rate on a given kind; more than 1% spread between the
// implied ratios is rejected.
inline double active_power(const CostTable& table, UnitKind kind) {
  double sum = 0.0, lo = 0.0, hi = 0.0;
  int n = 0;
  for (const auto& [key, entry] : table.entries()) {
    if (key.second != kind) continue;
    double w = entry.energy_mj / entry.latency_ms;
    if (n == 0) { lo = hi = w; } else { lo = std::min(lo, w); hi = std::max(hi, w); }
    sum += w;
    ++n;
  }
  if (n == 0) {
    throw ValidationError("cost_table: no entries for " + to_string(kind));
  }
  if (hi - lo > 0.01 * lo) {
    throw ValidationError("inconsistent power model for " + to_string(kind));
  }
  return sum / n;
}

// The measured per-unit costs for the two benchmark tasks.
inline CostTable canonical_cost_table() {
  CostTable t;
  t.set_cost("convolution", UnitKind::cpu_core, 8.0, 20.0);
  t.set_cost("convolution", UnitKind::dsp, 5.0, 7.5);
  t.set_cost("convolution", UnitKind::gpu, 2.0, 4.5);
  t.set_cost("feature_extraction", UnitKind::cpu_core, 20.0, 50.0);
  t.set_cost("feature_extraction", UnitKind::gpu, 10.0, 22.5);
  t.set_cost("feature_extraction", UnitKind::dsp, 4.0, 6.0);
  return t;
}

}  // namespace hetsim

#pragma once

// Structural invariants every trace must satisfy, checked from the trace and
// scenario alone. Returns human-readable violations; empty means clean.

#include <algorithm>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hetsim/engine.hpp"
#include "hetsim/scenario.hpp"

namespace checks {

inline void merge_intervals(std::vector<std::pair<hetsim::TimeUs, hetsim::TimeUs>>& ivs) {
  std::sort(ivs.begin(), ivs.end());
  std::size_t out = 0;
  for (const auto& iv : ivs) {
    if (out > 0 && iv.first <= ivs[out - 1].second) {
      ivs[out - 1].second = std::max(ivs[out - 1].second, iv.second);
    } else {
      ivs[out++] = iv;
    }
  }
  ivs.resize(out);
}

inline bool covered(const std::vector<std::pair<hetsim::TimeUs, hetsim::TimeUs>>& merged,
                    hetsim::TimeUs lo, hetsim::TimeUs hi) {
  for (const auto& [a, b] : merged) {
    if (a <= lo && hi <= b) return true;
  }
  return false;
}

inline std::vector<std::string> check_trace(const hetsim::Trace& tr, const hetsim::Scenario& sc) {
  std::vector<std::string> bad;
  auto complain = [&](const std::string& s) {
    if (bad.size() < 20) bad.push_back(s);
  };

  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    const auto& a = tr.records[i - 1];
    const auto& b = tr.records[i];
    if (std::tie(a.finish, a.instance) > std::tie(b.finish, b.instance)) {
      complain("records not sorted at index " + std::to_string(i));
    }
  }

  for (const auto& r : tr.records) {
    if (r.release < 0 || r.start - r.reconfig_us < r.release || r.finish < r.start ||
        r.finish > tr.horizon) {
      complain("instance " + std::to_string(r.instance) + " has inconsistent timestamps");
    }
    if (r.energy_uj < 0) {
      complain("instance " + std::to_string(r.instance) + " has negative energy");
    }
    if (!r.truncated && r.finish == tr.horizon && r.start == r.finish) {
      complain("instance " + std::to_string(r.instance) + " zero-length yet not truncated");
    }
  }

  std::vector<std::int64_t> recorded(tr.task_names.size(), 0);
  for (const auto& r : tr.records) recorded[r.task]++;
  for (std::size_t ti = 0; ti < tr.task_names.size(); ++ti) {
    if (tr.released[ti] != tr.completed[ti] + tr.truncated_count[ti] + tr.dropped[ti]) {
      complain("task " + tr.task_names[ti] + ": released != completed+truncated+dropped");
    }
    if (recorded[ti] != tr.completed[ti] + tr.truncated_count[ti]) {
      complain("task " + tr.task_names[ti] + ": record count mismatch");
    }
  }

  bool has_override = false;
  for (const auto& t : sc.graph.tasks) {
    if (std::holds_alternative<hetsim::SafetyOverride>(t.trigger)) has_override = true;
  }

  std::map<std::uint32_t, std::vector<const hetsim::TraceRecord*>> by_unit;
  for (const auto& r : tr.records) by_unit[r.unit].push_back(&r);

  for (auto& [unit, recs] : by_unit) {
    bool cpu = sc.platform.units[unit].kind == hetsim::UnitKind::cpu_core;
    bool exclusive = !cpu || (sc.policy != hetsim::Policy::affinity_best && !has_override);
    if (exclusive) {
      std::vector<const hetsim::TraceRecord*> sorted = recs;
      std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
        return a->start - a->reconfig_us < b->start - b->reconfig_us;
      });
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->start - sorted[i]->reconfig_us < sorted[i - 1]->finish) {
          complain("unit " + sc.platform.units[unit].id + ": instances " +
                   std::to_string(sorted[i - 1]->instance) + " and " +
                   std::to_string(sorted[i]->instance) + " overlap");
        }
      }
    }

    // No inserted idleness: while an instance waits, its unit is busy.
    std::vector<std::pair<hetsim::TimeUs, hetsim::TimeUs>> ivs;
    for (auto* r : recs) ivs.emplace_back(r->start - r->reconfig_us, r->finish);
    merge_intervals(ivs);
    for (auto* r : recs) {
      hetsim::TimeUs wait_from = r->release;
      hetsim::TimeUs wait_to = r->start - r->reconfig_us;
      if (wait_to > wait_from && !covered(ivs, wait_from, wait_to)) {
        complain("instance " + std::to_string(r->instance) + " waited on idle unit " +
                 sc.platform.units[unit].id);
      }
    }
  }

  // Completion-triggered releases coincide with a parent completion.
  std::map<std::string, std::vector<hetsim::TimeUs>> finishes;
  for (const auto& r : tr.records) {
    if (!r.truncated) finishes[r.task_name].push_back(r.finish);
  }
  for (const auto& r : tr.records) {
    const auto& t = sc.graph.tasks[r.task];
    if (const auto* oc = std::get_if<hetsim::OnCompletion>(&t.trigger)) {
      const auto& fs = finishes[oc->parent];
      if (std::find(fs.begin(), fs.end(), r.release) == fs.end()) {
        complain("instance " + std::to_string(r.instance) +
                 " released without a parent completion at its release time");
      }
    }
  }

  return bad;
}

}  // namespace checks

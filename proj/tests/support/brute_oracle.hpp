#pragma once

// Independent reference simulator for small scenarios: linear event scan over
// a flat vector, immediate arithmetic for start/finish times, policies
// re-derived from their definitions. No heap, no server state machine, no
// epochs. Scope: cpu/gpu/dsp units, periodic and always-firing completion
// triggers, one replica per task.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <variant>
#include <vector>

#include "hetsim/scenario.hpp"

namespace oracle {

using hetsim::EnergyUj;
using hetsim::TimeUs;

struct Rec {
  std::int64_t id = 0;
  std::size_t task = 0;
  TimeUs release = 0;
  TimeUs start = 0;
  TimeUs finish = 0;
  std::uint32_t unit = 0;
  EnergyUj energy = 0;
  bool truncated = false;
};

struct Result {
  std::vector<Rec> records;
  std::vector<std::int64_t> released, completed, truncated_n, dropped;
  bool ambiguous = false;  // two internal completions share a timestamp
};

namespace detail {

struct Slot {
  std::uint32_t unit = 0;
  hetsim::UnitKind kind = hetsim::UnitKind::cpu_core;
  int mult = 1;
  TimeUs free_at = 0;
};

struct Ev {
  TimeUs time = 0;
  int cls = 1;  // 0 completion, 1 release
  std::uint64_t seq = 0;
  std::size_t task = 0;
  std::int64_t inst = -1;
  bool used = false;
};

struct Pending {
  std::size_t task = 0;
  TimeUs release = 0;
  TimeUs start = 0;
  TimeUs finish = 0;
  std::uint32_t unit = 0;
  EnergyUj energy = 0;
  TimeUs work = 0;
  bool completed = false;
};

}  // namespace detail

inline Result simulate(const hetsim::Scenario& sc) {
  using namespace detail;
  const auto& tasks = sc.graph.tasks;
  const TimeUs horizon = sc.duration_us();

  // Slot layout.
  std::vector<Slot> slots;
  std::vector<std::vector<std::size_t>> cand(tasks.size());
  if (sc.policy == hetsim::Policy::affinity_best) {
    std::vector<std::uint32_t> cpu_units;
    for (std::uint32_t u = 0; u < sc.platform.units.size(); ++u) {
      if (sc.platform.units[u].kind == hetsim::UnitKind::cpu_core) cpu_units.push_back(u);
    }
    std::vector<int> pins(cpu_units.size(), 0);
    std::vector<std::vector<std::size_t>> threads_on(cpu_units.size());
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
      if (tasks[ti].preferred_unit != hetsim::UnitKind::cpu_core) continue;
      std::size_t best = 0;
      for (std::size_t c = 1; c < cpu_units.size(); ++c) {
        if (pins[c] < pins[best]) best = c;
      }
      cand[ti].push_back(slots.size());
      threads_on[best].push_back(slots.size());
      slots.push_back({cpu_units[best], hetsim::UnitKind::cpu_core, 1, 0});
      pins[best]++;
    }
    for (std::size_t c = 0; c < cpu_units.size(); ++c) {
      for (std::size_t si : threads_on[c]) slots[si].mult = pins[c];
    }
    for (std::uint32_t u = 0; u < sc.platform.units.size(); ++u) {
      if (sc.platform.units[u].kind == hetsim::UnitKind::cpu_core) continue;
      for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        if (tasks[ti].preferred_unit == sc.platform.units[u].kind) {
          cand[ti].push_back(slots.size());
        }
      }
      slots.push_back({u, sc.platform.units[u].kind, 1, 0});
    }
  } else {
    for (std::uint32_t u = 0; u < sc.platform.units.size(); ++u) {
      for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        if (sc.table.find_cost(tasks[ti].name, sc.platform.units[u].kind)) {
          cand[ti].push_back(slots.size());
        }
      }
      slots.push_back({u, sc.platform.units[u].kind, 1, 0});
    }
  }

  std::vector<Ev> evs;
  std::uint64_t seq = 0;
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    if (const auto* p = std::get_if<hetsim::Periodic>(&tasks[ti].trigger)) {
      for (std::int64_t k = 0;; ++k) {
        TimeUs t = static_cast<TimeUs>(std::llround(static_cast<double>(k) * 1e6 / p->rate_hz));
        if (t >= horizon) break;
        evs.push_back({t, 1, ++seq, ti, -1, false});
      }
    }
  }

  std::vector<Pending> insts;
  std::multiset<TimeUs> finish_times;
  Result res;
  res.released.assign(tasks.size(), 0);
  res.completed.assign(tasks.size(), 0);
  res.truncated_n.assign(tasks.size(), 0);
  res.dropped.assign(tasks.size(), 0);

  while (true) {
    std::size_t pick = evs.size();
    for (std::size_t i = 0; i < evs.size(); ++i) {
      if (evs[i].used) continue;
      if (pick == evs.size() ||
          std::tie(evs[i].time, evs[i].cls, evs[i].seq) <
              std::tie(evs[pick].time, evs[pick].cls, evs[pick].seq)) {
        pick = i;
      }
    }
    if (pick == evs.size() || evs[pick].time >= horizon) break;
    Ev ev = evs[pick];
    evs[pick].used = true;

    if (ev.cls == 1) {
      std::size_t ti = ev.task;
      res.released[ti]++;
      const auto& t = tasks[ti];

      std::size_t best = cand[ti].size();
      TimeUs best_key1 = 0;
      EnergyUj best_e = 0;
      for (std::size_t c = 0; c < cand[ti].size(); ++c) {
        const Slot& s = slots[cand[ti][c]];
        const auto& cost = sc.table.unit_cost(t.name, s.kind);
        TimeUs base = cost.latency_us();
        TimeUs eff = s.kind == hetsim::UnitKind::cpu_core ? base * s.mult : base;
        TimeUs avail = std::max(ev.time, s.free_at);
        TimeUs key1 = 0;
        EnergyUj ekey = 0;
        switch (sc.policy) {
          case hetsim::Policy::affinity_best: key1 = avail; break;
          case hetsim::Policy::max_throughput:
          case hetsim::Policy::min_latency: key1 = avail + eff; break;
          case hetsim::Policy::min_energy:
            ekey = cost.energy_uj();
            key1 = avail + eff;
            break;
        }
        bool better;
        if (best == cand[ti].size()) {
          better = true;
        } else if (sc.policy == hetsim::Policy::min_energy) {
          auto lhs = std::tuple(ekey, key1, slots[cand[ti][c]].unit, cand[ti][c]);
          auto rhs = std::tuple(best_e, best_key1, slots[cand[ti][best]].unit, cand[ti][best]);
          better = lhs < rhs;
        } else {
          auto lhs = std::tuple(key1, slots[cand[ti][c]].unit, cand[ti][c]);
          auto rhs = std::tuple(best_key1, slots[cand[ti][best]].unit, cand[ti][best]);
          better = lhs < rhs;
        }
        if (better) {
          best = c;
          best_key1 = key1;
          best_e = ekey;
        }
      }
      Slot& s = slots[cand[ti][best]];
      const auto& cost = sc.table.unit_cost(t.name, s.kind);
      TimeUs base = cost.latency_us();
      TimeUs eff = s.kind == hetsim::UnitKind::cpu_core ? base * s.mult : base;

      Pending p;
      p.task = ti;
      p.release = ev.time;
      p.start = std::max(ev.time, s.free_at);
      p.finish = p.start + eff;
      p.unit = s.unit;
      p.energy = cost.energy_uj();
      p.work = eff;
      s.free_at = p.finish;
      insts.push_back(p);
      std::int64_t id = static_cast<std::int64_t>(insts.size());

      if (p.finish < horizon && finish_times.count(p.finish)) res.ambiguous = true;
      finish_times.insert(p.finish);
      evs.push_back({p.finish, 0, ++seq, ti, id, false});
    } else {
      Pending& p = insts[ev.inst - 1];
      p.completed = true;
      res.completed[p.task]++;
      for (std::size_t ci = 0; ci < tasks.size(); ++ci) {
        if (const auto* oc = std::get_if<hetsim::OnCompletion>(&tasks[ci].trigger)) {
          if (oc->parent == tasks[p.task].name && oc->probability >= 1.0) {
            evs.push_back({ev.time, 1, ++seq, ci, -1, false});
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < insts.size(); ++i) {
    const Pending& p = insts[i];
    Rec r;
    r.id = static_cast<std::int64_t>(i) + 1;
    r.task = p.task;
    r.release = p.release;
    r.unit = p.unit;
    if (p.completed) {
      r.start = p.start;
      r.finish = p.finish;
      r.energy = p.energy;
    } else if (p.start >= horizon) {
      res.dropped[p.task]++;
      continue;
    } else {
      r.start = p.start;
      r.finish = horizon;
      TimeUs elapsed = horizon - p.start;
      r.energy = elapsed >= p.work
                     ? p.energy
                     : static_cast<EnergyUj>(static_cast<__int128>(p.energy) * elapsed / p.work);
      r.truncated = true;
      res.truncated_n[p.task]++;
    }
    res.records.push_back(r);
  }
  std::stable_sort(res.records.begin(), res.records.end(), [](const Rec& a, const Rec& b) {
    return std::tie(a.finish, a.id) < std::tie(b.finish, b.id);
  });
  return res;
}

}  // namespace oracle

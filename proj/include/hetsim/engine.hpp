#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hetsim/error.hpp"
#include "hetsim/scenario.hpp"
#include "hetsim/scheduler.hpp"

namespace hetsim {

enum class EventKind {
  sensor_fire,
  instance_release,
  instance_start,
  instance_finish,
  reconfig_start,
  reconfig_done,
  batch_fire,
  override_preempt,
};

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::sensor_fire: return "sensor_fire";
    case EventKind::instance_release: return "instance_release";
    case EventKind::instance_start: return "instance_start";
    case EventKind::instance_finish: return "instance_finish";
    case EventKind::reconfig_start: return "reconfig_start";
    case EventKind::reconfig_done: return "reconfig_done";
    case EventKind::batch_fire: return "batch_fire";
    case EventKind::override_preempt: return "override_preempt";
  }
  return "?";
}

// Same-instant ordering: completions first so freed capacity is visible to
// releases at the same timestamp, then releases, then dispatches.
inline int event_class(EventKind k) {
  switch (k) {
    case EventKind::instance_finish:
    case EventKind::reconfig_done:
      return 0;
    case EventKind::sensor_fire:
    case EventKind::instance_release:
    case EventKind::batch_fire:
    case EventKind::override_preempt:
      return 1;
    case EventKind::instance_start:
    case EventKind::reconfig_start:
      return 2;
  }
  return 1;
}

struct SimEvent {
  TimeUs time = 0;
  EventKind kind = EventKind::sensor_fire;
  std::string subject;          // sensor name or task name
  std::int64_t instance = -1;
  std::int32_t server = -1;     // -1 for external and override events
  std::uint64_t epoch = 0;
  std::uint64_t seq = 0;
};

struct TraceRecord {
  std::int64_t instance = 0;
  std::size_t task = 0;
  std::string task_name;
  TimeUs release = 0;
  TimeUs start = 0;
  TimeUs finish = 0;
  std::uint32_t unit = 0;       // index into PlatformSpec::units
  EnergyUj energy_uj = 0;       // execution energy plus any reconfiguration charge
  TimeUs reconfig_us = 0;       // reconfiguration latency paid before start
  bool deadline_met = true;
  bool truncated = false;
};

struct Trace {
  std::string scenario;
  TimeUs horizon = 0;
  std::vector<TraceRecord> records;  // sorted by (finish, instance)
  std::vector<std::string> task_names;
  std::vector<std::int64_t> released;
  std::vector<std::int64_t> completed;
  std::vector<std::int64_t> truncated_count;
  std::vector<std::int64_t> dropped;  // released but never started
  std::vector<std::string> diagnostics;
};

namespace detail {

inline EnergyUj prorata_energy(EnergyUj total, TimeUs elapsed, TimeUs work) {
  if (work <= 0 || elapsed <= 0) return 0;
  if (elapsed >= work) return total;
  return static_cast<EnergyUj>(static_cast<__int128>(total) * elapsed / work);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

class Engine {
public:
  explicit Engine(const Scenario& sc) : sc_(sc) {
    horizon_ = sc_.duration_us();
    rng_.seed(sc_.seed);
    build_servers();
    resolve_candidates();
    seed_events();
    std::size_t n = sc_.graph.tasks.size();
    released_.assign(n, 0);
    completed_.assign(n, 0);
    truncated_.assign(n, 0);
    dropped_.assign(n, 0);
  }

  TimeUs now() const { return now_; }

  bool done() const { return collected_ || heap_.empty() || heap_.front().time >= horizon_; }

  SimEvent step() {
    if (done()) throw SimError("no runnable event");
    SimEvent ev = pop_event();
    now_ = ev.time;
    dispatch(ev);
    return ev;
  }

  // External stimulus. Only sensor and release-class events can be injected;
  // dispatch and completion events are owned by the engine.
  void inject(SimEvent ev) {
    if (collected_) throw SimError("simulation already complete");
    if (ev.time < now_) {
      throw SimError("causality violation: event at " + std::to_string(ev.time) +
                     "us is before now " + std::to_string(now_) + "us");
    }
    switch (ev.kind) {
      case EventKind::sensor_fire:
        if (!sc_.graph.find_sensor(ev.subject)) {
          throw ValidationError("unknown sensor '" + ev.subject + "'");
        }
        break;
      case EventKind::instance_release: {
        const TaskSpec* t = sc_.graph.find_task(ev.subject);
        if (!t) throw ValidationError("unknown task '" + ev.subject + "'");
        if (std::holds_alternative<SafetyOverride>(t->trigger)) {
          throw ValidationError("task '" + ev.subject + "' releases via override_preempt");
        }
        break;
      }
      case EventKind::batch_fire: {
        const TaskSpec* t = sc_.graph.find_task(ev.subject);
        if (!t) throw ValidationError("unknown task '" + ev.subject + "'");
        const auto* bt = std::get_if<BatchThreshold>(&t->trigger);
        if (!bt) throw ValidationError("task '" + ev.subject + "' is not batch-triggered");
        double& acc = batch_acc_[ev.subject];
        if (acc < bt->threshold_bytes) {
          throw SimError("threshold not reached for task '" + ev.subject + "'");
        }
        acc -= bt->threshold_bytes;
        break;
      }
      case EventKind::override_preempt: {
        const TaskSpec* t = sc_.graph.find_task(ev.subject);
        if (!t) throw ValidationError("unknown task '" + ev.subject + "'");
        if (!std::holds_alternative<SafetyOverride>(t->trigger)) {
          throw ValidationError("task '" + ev.subject + "' is not an override task");
        }
        break;
      }
      default:
        throw SimError("cannot inject engine-internal event " + to_string(ev.kind));
    }
    ev.instance = -1;
    ev.server = -1;
    ev.epoch = 0;
    push_event(ev);
  }

  std::vector<SimEvent> pending_events() const {
    std::vector<SimEvent> evs = heap_;
    std::sort(evs.begin(), evs.end(), [](const SimEvent& a, const SimEvent& b) {
      return order_key(a) < order_key(b);
    });
    return evs;
  }

  // Bytes accumulated toward a batch task's next firing.
  double stream_level(const std::string& batch_task) const {
    const TaskSpec* t = sc_.graph.find_task(batch_task);
    if (!t || !std::holds_alternative<BatchThreshold>(t->trigger)) {
      throw ValidationError("no batch task '" + batch_task + "'");
    }
    auto it = batch_acc_.find(batch_task);
    return it == batch_acc_.end() ? 0.0 : it->second;
  }

  Trace run_to_horizon() {
    if (collected_) throw SimError("simulation already complete");
    while (!done()) step();
    now_ = horizon_;
    truncate_at_horizon();
    collected_ = true;

    Trace tr;
    tr.scenario = sc_.name;
    tr.horizon = horizon_;
    std::stable_sort(records_.begin(), records_.end(), [](const TraceRecord& a, const TraceRecord& b) {
      return std::tie(a.finish, a.instance) < std::tie(b.finish, b.instance);
    });
    tr.records = std::move(records_);
    for (const auto& t : sc_.graph.tasks) tr.task_names.push_back(t.name);
    tr.released = released_;
    tr.completed = completed_;
    tr.truncated_count = truncated_;
    tr.dropped = dropped_;
    for (std::size_t i = 0; i < sc_.graph.tasks.size(); ++i) {
      if (dropped_[i] > 0) {
        tr.diagnostics.push_back("task '" + sc_.graph.tasks[i].name + "': " +
                                 std::to_string(dropped_[i]) + " instances unstarted at horizon");
      }
    }
    return tr;
  }

private:
  struct Instance {
    std::int64_t id = 0;
    std::size_t task = 0;
    TimeUs release = 0;
    TimeUs start = -1;
    TimeUs work_us = 0;
    TimeUs done_us = 0;
    TimeUs segment_start = -1;
    EnergyUj energy = 0;  // full execution energy
    EnergyUj reconfig_energy = 0;
    TimeUs reconfig_us = 0;
    std::int32_t server = -1;
    std::uint32_t unit = 0;
    std::string persona;
  };

  enum class Phase { idle, start_pending, reconf_pending, reconfiguring, running, suspended };

  struct Server {
    std::uint32_t unit = 0;
    UnitKind kind = UnitKind::cpu_core;
    int multiplier = 1;
    int core = -1;  // index into cores_, CPU servers only
    std::deque<std::int64_t> fifo;
    Phase phase = Phase::idle;
    std::int64_t active = -1;
    TimeUs reconfig_started = 0;
    std::string loaded_persona;
    std::uint64_t epoch = 0;
  };

  struct Core {
    std::uint32_t unit = 0;
    std::vector<std::size_t> servers;
    TimeUs override_end = 0;
    std::deque<std::int64_t> pending_overrides;
  };

  static std::tuple<TimeUs, int, std::uint64_t> order_key(const SimEvent& e) {
    return {e.time, event_class(e.kind), e.seq};
  }

  struct HeapCmp {
    bool operator()(const SimEvent& a, const SimEvent& b) const { return order_key(a) > order_key(b); }
  };

  void push_event(SimEvent ev) {
    ev.seq = ++seq_;
    heap_.push_back(std::move(ev));
    std::push_heap(heap_.begin(), heap_.end(), HeapCmp{});
  }

  SimEvent pop_event() {
    std::pop_heap(heap_.begin(), heap_.end(), HeapCmp{});
    SimEvent ev = std::move(heap_.back());
    heap_.pop_back();
    return ev;
  }

  void build_servers() {
    const auto& units = sc_.platform.units;

    // One scheduling core per CPU unit, lowest unit index first.
    for (std::uint32_t ui = 0; ui < units.size(); ++ui) {
      if (units[ui].kind == UnitKind::cpu_core) {
        core_of_unit_[ui] = static_cast<int>(cores_.size());
        cores_.push_back(Core{ui, {}, 0, {}});
      }
    }

    bool has_override_task = false;
    for (const auto& t : sc_.graph.tasks) {
      if (std::holds_alternative<SafetyOverride>(t.trigger)) has_override_task = true;
    }
    if (has_override_task && cores_.empty()) {
      throw ValidationError("unschedulable task: safety override requires a cpu_core unit");
    }

    if (sc_.policy == Policy::affinity_best) {
      // Static placement: CPU tasks get dedicated threads spread over the
      // least-occupied cores; other kinds keep one slot per unit.
      std::vector<int> pins(cores_.size(), 0);
      std::vector<std::vector<std::size_t>> core_threads(cores_.size());
      for (std::size_t ti = 0; ti < sc_.graph.tasks.size(); ++ti) {
        const TaskSpec& t = sc_.graph.tasks[ti];
        if (std::holds_alternative<SafetyOverride>(t.trigger)) continue;
        if (t.preferred_unit != UnitKind::cpu_core) continue;
        if (cores_.empty()) {
          throw ValidationError("unschedulable task '" + t.name + "': no cpu_core unit");
        }
        for (int r = 0; r < t.replicas; ++r) {
          std::size_t best = 0;
          for (std::size_t c = 1; c < cores_.size(); ++c) {
            if (pins[c] < pins[best]) best = c;
          }
          Server s;
          s.unit = cores_[best].unit;
          s.kind = UnitKind::cpu_core;
          s.core = static_cast<int>(best);
          task_servers_[t.name].push_back(servers_.size());
          core_threads[best].push_back(servers_.size());
          servers_.push_back(std::move(s));
          pins[best]++;
        }
      }
      for (std::size_t c = 0; c < cores_.size(); ++c) {
        for (std::size_t si : core_threads[c]) {
          servers_[si].multiplier = std::max(1, pins[c]);
          cores_[c].servers.push_back(si);
        }
      }
      for (std::uint32_t ui = 0; ui < units.size(); ++ui) {
        if (units[ui].kind == UnitKind::cpu_core) continue;
        Server s;
        s.unit = ui;
        s.kind = units[ui].kind;
        kind_servers_[units[ui].kind].push_back(servers_.size());
        servers_.push_back(std::move(s));
      }
    } else {
      for (std::uint32_t ui = 0; ui < units.size(); ++ui) {
        Server s;
        s.unit = ui;
        s.kind = units[ui].kind;
        if (s.kind == UnitKind::cpu_core) {
          s.core = core_of_unit_[ui];
          cores_[s.core].servers.push_back(servers_.size());
        }
        kind_servers_[s.kind].push_back(servers_.size());
        servers_.push_back(std::move(s));
      }
    }

    slots_.resize(servers_.size());
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      slots_[i].unit = servers_[i].unit;
      slots_[i].kind = servers_[i].kind;
      slots_[i].busy_until = 0;
      slots_[i].thread_load = servers_[i].multiplier;
    }
  }

  void resolve_candidates() {
    candidates_.resize(sc_.graph.tasks.size());
    for (std::size_t ti = 0; ti < sc_.graph.tasks.size(); ++ti) {
      const TaskSpec& t = sc_.graph.tasks[ti];
      if (std::holds_alternative<SafetyOverride>(t.trigger)) continue;  // routed to the override core
      if (sc_.policy == Policy::affinity_best) {
        if (t.preferred_unit == UnitKind::cpu_core) {
          candidates_[ti] = task_servers_.at(t.name);
        } else {
          auto it = kind_servers_.find(t.preferred_unit);
          if (it == kind_servers_.end() || it->second.empty()) {
            throw ValidationError("unschedulable task '" + t.name + "': no " +
                                  to_string(t.preferred_unit) + " unit");
          }
          candidates_[ti] = it->second;
        }
      } else {
        candidates_[ti] = feasible_units(t.name, sc_.table, slots_);
      }
    }
  }

  void seed_events() {
    for (const auto& [time, sensor] : sensor_event_stream(sc_.graph.sensors, sc_.duration_s)) {
      push_event(SimEvent{time, EventKind::sensor_fire, sensor});
    }
    for (const auto& t : sc_.graph.tasks) {
      if (const auto* p = std::get_if<Periodic>(&t.trigger)) {
        for (std::int64_t k = 0;; ++k) {
          TimeUs tk = static_cast<TimeUs>(std::llround(static_cast<double>(k) * 1e6 / p->rate_hz));
          if (tk >= horizon_) break;
          push_event(SimEvent{tk, EventKind::instance_release, t.name});
        }
      }
    }
  }

  std::size_t task_index(const std::string& name) const {
    for (std::size_t i = 0; i < sc_.graph.tasks.size(); ++i) {
      if (sc_.graph.tasks[i].name == name) return i;
    }
    throw SimError("unknown task '" + name + "'");
  }

  Instance& make_instance(std::size_t ti) {
    Instance inst;
    inst.id = static_cast<std::int64_t>(instances_.size()) + 1;
    inst.task = ti;
    inst.release = now_;
    instances_.push_back(std::move(inst));
    released_[ti]++;
    return instances_.back();
  }

  void dispatch(const SimEvent& ev) {
    switch (ev.kind) {
      case EventKind::sensor_fire: on_sensor_fire(ev); break;
      case EventKind::instance_release: on_release(ev); break;
      case EventKind::batch_fire: on_release(ev); break;
      case EventKind::override_preempt: on_override(ev); break;
      case EventKind::instance_start: on_start(ev); break;
      case EventKind::instance_finish: on_finish(ev); break;
      case EventKind::reconfig_start: on_reconfig_start(ev); break;
      case EventKind::reconfig_done: on_reconfig_done(ev); break;
    }
  }

  void on_sensor_fire(const SimEvent& ev) {
    for (const auto& t : sc_.graph.tasks) {
      if (const auto* os = std::get_if<OnSensor>(&t.trigger)) {
        if (os->sensor == ev.subject) {
          push_event(SimEvent{now_, EventKind::instance_release, t.name});
        }
      } else if (const auto* so = std::get_if<SafetyOverride>(&t.trigger)) {
        if (so->sensor == ev.subject) {
          push_event(SimEvent{now_, EventKind::override_preempt, t.name});
        }
      }
    }
  }

  void on_release(const SimEvent& ev) {
    std::size_t ti = task_index(ev.subject);
    Instance& inst = make_instance(ti);
    const TaskSpec& t = sc_.graph.tasks[ti];

    std::string persona = t.fpga_persona.value_or(t.name);
    Assignment a = assign(t.name, persona, slots_, candidates_[ti], sc_.policy, sc_.table,
                          sc_.platform, now_);
    UnitState& slot = slots_[a.slot];
    inst.server = static_cast<std::int32_t>(a.slot);
    inst.unit = slot.unit;
    inst.work_us = a.finish - a.start;
    inst.energy = sc_.table.unit_cost(t.name, slot.kind).energy_uj();
    inst.persona = slot.kind == UnitKind::fpga ? persona : std::string();
    slot.busy_until = a.finish;
    if (slot.kind == UnitKind::fpga) slot.loaded_persona = persona;

    servers_[a.slot].fifo.push_back(inst.id);
    pump(a.slot);
  }

  void on_override(const SimEvent& ev) {
    std::size_t ti = task_index(ev.subject);
    Instance& inst = make_instance(ti);
    Core& core = cores_.front();

    const CostEntry& cost = sc_.table.unit_cost(ev.subject, UnitKind::cpu_core);
    TimeUs work = cost.latency_us();
    TimeUs o_start = std::max(now_, core.override_end);
    bool preempt_now = core.override_end <= now_;
    core.override_end = o_start + work;

    inst.server = -1;
    inst.unit = core.unit;
    inst.work_us = work;
    inst.energy = cost.energy_uj();
    core.pending_overrides.push_back(inst.id);

    for (std::size_t si : core.servers) {
      Server& s = servers_[si];
      if (s.phase == Phase::start_pending || s.phase == Phase::reconf_pending) {
        s.epoch++;
        s.phase = Phase::idle;
      } else if (preempt_now && s.phase == Phase::running) {
        s.epoch++;
        Instance& run = instances_[s.active - 1];
        run.done_us += now_ - run.segment_start;
        run.segment_start = -1;
        s.phase = Phase::suspended;
      }
      slots_[si].busy_until = std::max(slots_[si].busy_until, o_start) + work;
    }

    push_event(SimEvent{o_start, EventKind::instance_start, ev.subject, inst.id, -1});
    push_event(SimEvent{o_start + work, EventKind::instance_finish, ev.subject, inst.id, -1});
  }

  void pump(std::size_t si) {
    Server& s = servers_[si];
    if (s.phase != Phase::idle || s.fifo.empty()) return;
    TimeUs t0 = now_;
    if (s.core >= 0 && cores_[s.core].override_end > t0) t0 = cores_[s.core].override_end;
    const Instance& front = instances_[s.fifo.front() - 1];
    const std::string& tname = sc_.graph.tasks[front.task].name;
    if (s.kind == UnitKind::fpga && s.loaded_persona != front.persona) {
      s.phase = Phase::reconf_pending;
      push_event(SimEvent{t0, EventKind::reconfig_start, tname, front.id,
                          static_cast<std::int32_t>(si), s.epoch});
    } else {
      s.phase = Phase::start_pending;
      push_event(SimEvent{t0, EventKind::instance_start, tname, front.id,
                          static_cast<std::int32_t>(si), s.epoch});
    }
  }

  void on_reconfig_start(const SimEvent& ev) {
    Server& s = servers_[ev.server];
    if (ev.epoch != s.epoch) return;
    s.phase = Phase::reconfiguring;
    s.reconfig_started = now_;
    push_event(SimEvent{now_ + sc_.platform.units[s.unit].reconfig_us(), EventKind::reconfig_done,
                        ev.subject, ev.instance, ev.server, s.epoch});
  }

  void on_reconfig_done(const SimEvent& ev) {
    Server& s = servers_[ev.server];
    if (ev.epoch != s.epoch) return;
    Instance& front = instances_[s.fifo.front() - 1];
    TimeUs r = now_ - s.reconfig_started;
    front.reconfig_us += r;
    front.reconfig_energy += static_cast<EnergyUj>(
        std::llround(static_cast<double>(r) * sc_.platform.units[s.unit].active_power_w));
    s.loaded_persona = front.persona;
    s.phase = Phase::start_pending;
    push_event(SimEvent{now_, EventKind::instance_start, ev.subject, front.id, ev.server, s.epoch});
  }

  void on_start(const SimEvent& ev) {
    if (ev.server < 0) {
      Instance& inst = instances_[ev.instance - 1];
      inst.start = now_;
      inst.segment_start = now_;
      return;
    }
    Server& s = servers_[ev.server];
    if (ev.epoch != s.epoch) return;
    s.active = s.fifo.front();
    s.fifo.pop_front();
    s.phase = Phase::running;
    Instance& inst = instances_[s.active - 1];
    inst.start = now_;
    inst.segment_start = now_;
    push_event(SimEvent{now_ + inst.work_us, EventKind::instance_finish,
                        sc_.graph.tasks[inst.task].name, inst.id, ev.server, s.epoch});
  }

  void on_finish(const SimEvent& ev) {
    if (ev.server < 0) {
      Core& core = cores_.front();
      core.pending_overrides.pop_front();
      Instance& inst = instances_[ev.instance - 1];
      inst.done_us = inst.work_us;
      complete(inst);
      if (core.override_end == now_) resume_core(core);
      return;
    }
    Server& s = servers_[ev.server];
    if (ev.epoch != s.epoch) return;
    Instance& inst = instances_[s.active - 1];
    inst.done_us += now_ - inst.segment_start;
    inst.segment_start = -1;
    s.active = -1;
    s.phase = Phase::idle;
    complete(inst);
    pump(static_cast<std::size_t>(ev.server));
  }

  void resume_core(Core& core) {
    for (std::size_t si : core.servers) {
      Server& s = servers_[si];
      if (s.phase == Phase::suspended) {
        Instance& run = instances_[s.active - 1];
        run.segment_start = now_;
        s.phase = Phase::running;
        push_event(SimEvent{now_ + (run.work_us - run.done_us), EventKind::instance_finish,
                            sc_.graph.tasks[run.task].name, run.id,
                            static_cast<std::int32_t>(si), s.epoch});
      } else if (s.phase == Phase::idle && !s.fifo.empty()) {
        pump(si);
      }
    }
  }

  void complete(Instance& inst) {
    const TaskSpec& t = sc_.graph.tasks[inst.task];
    TraceRecord rec;
    rec.instance = inst.id;
    rec.task = inst.task;
    rec.task_name = t.name;
    rec.release = inst.release;
    rec.start = inst.start;
    rec.finish = now_;
    rec.unit = inst.unit;
    rec.energy_uj = inst.energy + inst.reconfig_energy;
    rec.reconfig_us = inst.reconfig_us;
    rec.deadline_met = !t.deadline_ms || (now_ - inst.release) <= ms_to_us(*t.deadline_ms);
    records_.push_back(std::move(rec));
    completed_[inst.task]++;

    // Downstream releases, in task declaration order.
    for (const auto& child : sc_.graph.tasks) {
      if (const auto* oc = std::get_if<OnCompletion>(&child.trigger)) {
        if (oc->parent != t.name) continue;
        bool fire = true;
        if (oc->probability <= 0.0) {
          fire = false;
        } else if (oc->probability < 1.0) {
          fire = detail::uniform01(rng_) < oc->probability;
        }
        if (fire) push_event(SimEvent{now_, EventKind::instance_release, child.name});
      }
    }

    if (t.output_bytes > 0.0) {
      for (const auto& batch : sc_.graph.tasks) {
        const auto* bt = std::get_if<BatchThreshold>(&batch.trigger);
        if (!bt || bt->stream != t.output_stream) continue;
        double& acc = batch_acc_[batch.name];
        acc += t.output_bytes;
        while (acc >= bt->threshold_bytes) {
          acc -= bt->threshold_bytes;
          push_event(SimEvent{now_, EventKind::batch_fire, batch.name});
        }
      }
    }
  }

  void truncate_at_horizon() {
    for (std::size_t si = 0; si < servers_.size(); ++si) {
      Server& s = servers_[si];
      if (s.phase == Phase::running || s.phase == Phase::suspended) {
        Instance& run = instances_[s.active - 1];
        TimeUs elapsed = run.done_us;
        if (s.phase == Phase::running) elapsed += horizon_ - run.segment_start;
        TraceRecord rec;
        rec.instance = run.id;
        rec.task = run.task;
        rec.task_name = sc_.graph.tasks[run.task].name;
        rec.release = run.release;
        rec.start = run.start;
        rec.finish = horizon_;
        rec.unit = run.unit;
        rec.energy_uj = detail::prorata_energy(run.energy, elapsed, run.work_us) + run.reconfig_energy;
        rec.reconfig_us = run.reconfig_us;
        rec.deadline_met = false;
        rec.truncated = true;
        records_.push_back(std::move(rec));
        truncated_[run.task]++;
      } else if (s.phase == Phase::reconfiguring) {
        Instance& front = instances_[s.fifo.front() - 1];
        s.fifo.pop_front();
        TimeUs partial = horizon_ - s.reconfig_started;
        TraceRecord rec;
        rec.instance = front.id;
        rec.task = front.task;
        rec.task_name = sc_.graph.tasks[front.task].name;
        rec.release = front.release;
        rec.start = horizon_;
        rec.finish = horizon_;
        rec.unit = front.unit;
        rec.energy_uj = static_cast<EnergyUj>(std::llround(
            static_cast<double>(partial) * sc_.platform.units[front.unit].active_power_w));
        rec.reconfig_us = partial;
        rec.deadline_met = false;
        rec.truncated = true;
        records_.push_back(std::move(rec));
        truncated_[front.task]++;
      }
      for (std::int64_t id : s.fifo) dropped_[instances_[id - 1].task]++;
      s.fifo.clear();
    }
    for (Core& core : cores_) {
      for (std::int64_t id : core.pending_overrides) {
        Instance& inst = instances_[id - 1];
        if (inst.segment_start < 0) {
          dropped_[inst.task]++;
          continue;
        }
        TimeUs elapsed = horizon_ - inst.segment_start;
        TraceRecord rec;
        rec.instance = inst.id;
        rec.task = inst.task;
        rec.task_name = sc_.graph.tasks[inst.task].name;
        rec.release = inst.release;
        rec.start = inst.start;
        rec.finish = horizon_;
        rec.unit = inst.unit;
        rec.energy_uj = detail::prorata_energy(inst.energy, elapsed, inst.work_us);
        rec.reconfig_us = 0;
        rec.deadline_met = false;
        rec.truncated = true;
        records_.push_back(std::move(rec));
        truncated_[inst.task]++;
      }
      core.pending_overrides.clear();
    }
  }

  Scenario sc_;
  TimeUs horizon_ = 0;
  TimeUs now_ = 0;
  bool collected_ = false;
  std::uint64_t seq_ = 0;
  std::mt19937_64 rng_;

  std::vector<SimEvent> heap_;
  std::vector<Server> servers_;
  std::vector<Core> cores_;
  std::map<std::uint32_t, int> core_of_unit_;
  std::vector<UnitState> slots_;
  std::map<std::string, std::vector<std::size_t>> task_servers_;
  std::map<UnitKind, std::vector<std::size_t>> kind_servers_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<Instance> instances_;
  std::map<std::string, double> batch_acc_;

  std::vector<TraceRecord> records_;
  std::vector<std::int64_t> released_, completed_, truncated_, dropped_;
};

inline Trace run(const Scenario& sc) {
  Engine e(sc);
  return e.run_to_horizon();
}

inline void trace_to_jsonl(const Trace& tr, const Scenario& sc, std::ostream& out) {
  for (const auto& r : tr.records) {
    nlohmann::json j;
    j["instance"] = r.instance;
    j["task"] = r.task_name;
    j["unit"] = sc.platform.units[r.unit].id;
    j["release_ms"] = us_to_ms(r.release);
    j["start_ms"] = us_to_ms(r.start);
    j["finish_ms"] = us_to_ms(r.finish);
    j["energy_mj"] = uj_to_mj(r.energy_uj);
    j["reconfig_ms"] = us_to_ms(r.reconfig_us);
    j["deadline_met"] = r.deadline_met;
    j["truncated"] = r.truncated;
    out << j.dump() << "\n";
  }
}

}  // namespace hetsim

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "hetsim/engine.hpp"
#include "hetsim/metrics.hpp"
#include "support/random_scenarios.hpp"

using namespace hetsim;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("percentiles use the nearest-rank rule") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(static_cast<double>(i));
  REQUIRE(detail::percentile(v, 0.50) == 50.0);
  REQUIRE(detail::percentile(v, 0.95) == 95.0);
  REQUIRE(detail::percentile(v, 0.99) == 99.0);
  REQUIRE(detail::percentile(v, 1.00) == 100.0);

  std::vector<double> w{1.0, 2.0, 3.0, 4.0};
  REQUIRE(detail::percentile(w, 0.50) == 2.0);
  REQUIRE(detail::percentile(w, 0.95) == 4.0);
  REQUIRE(detail::percentile({}, 0.95) == 0.0);
}

namespace {

Scenario small_cpu_scenario() {
  PlatformSpec p;
  p.name = "m";
  p.units = {{"cpu0", UnitKind::cpu_core, 2.5, {}, {}}};
  p.static_power_w = 1.0;
  CostTable t;
  t.set_cost("work", UnitKind::cpu_core, 100.0, 250.0);
  TaskSpec w;
  w.name = "work";
  w.stage = Stage::other;
  w.trigger = Periodic{5.0};
  w.preferred_unit = UnitKind::cpu_core;
  w.deadline_ms = 150.0;
  Scenario sc;
  sc.name = "metrics-small";
  sc.platform = p;
  sc.graph = build_task_graph({w}, {});
  sc.table = t;
  sc.policy = Policy::affinity_best;
  sc.duration_s = 1.0;
  return sc;
}

}  // namespace

TEST_CASE("summarize reduces a trace to per-task and per-unit numbers") {
  Scenario sc = small_cpu_scenario();
  // releases every 200ms, each takes 100ms: five complete, utilization 0.5
  Trace tr = run(sc);
  MetricsReport rep = summarize(tr, sc);

  REQUIRE(rep.scenario == "metrics-small");
  REQUIRE(rep.policy == "affinity");
  const TaskMetrics& tm = rep.tasks.at("work");
  REQUIRE(tm.released == 5);
  REQUIRE(tm.completed == 5);
  REQUIRE(tm.dropped == 0);
  REQUIRE(tm.deadline_miss == 0);
  REQUIRE(tm.throughput_per_s == Approx(5.0));
  REQUIRE(tm.latency.samples == 5);
  REQUIRE(tm.latency.mean_ms == Approx(100.0));
  REQUIRE(tm.latency.p50_ms == Approx(100.0));
  REQUIRE(tm.latency.max_ms == Approx(100.0));
  REQUIRE(tm.energy_mj == Approx(1250.0));

  const UnitMetrics& um = rep.units.at("cpu0");
  REQUIRE(um.kind == "cpu_core");
  REQUIRE(um.instances == 5);
  REQUIRE(um.busy_ms == Approx(500.0));
  REQUIRE(um.utilization == Approx(0.5));
  REQUIRE(um.energy_mj == Approx(1250.0));

  REQUIRE(rep.totals.duration_s == Approx(1.0));
  REQUIRE(rep.totals.released == 5);
  REQUIRE(rep.totals.completed == 5);
  REQUIRE(rep.totals.dynamic_energy_mj == Approx(1250.0));
  REQUIRE(rep.totals.static_energy_mj == Approx(1000.0));
  REQUIRE(rep.totals.total_energy_mj == Approx(2250.0));
  REQUIRE(rep.totals.average_power_w == Approx(2.25));
  REQUIRE(rep.totals.average_power_w == Approx(average_power(tr, sc)));
}

TEST_CASE("deadline misses count completed instances past their budget") {
  Scenario sc = small_cpu_scenario();
  sc.graph.tasks[0].deadline_ms = 50.0;  // every 100ms run misses
  Trace tr = run(sc);
  MetricsReport rep = summarize(tr, sc);
  REQUIRE(rep.tasks.at("work").deadline_miss == 5);
  for (const auto& r : tr.records) REQUIRE_FALSE(r.deadline_met);
}

TEST_CASE("unit busy time merges overlapping thread intervals") {
  // two cpu threads sharing one core: concurrent stretched runs overlap
  PlatformSpec p;
  p.units = {{"cpu0", UnitKind::cpu_core, 2.5, {}, {}}};
  p.static_power_w = 0.0;
  CostTable t;
  t.set_cost("a", UnitKind::cpu_core, 100.0, 250.0);
  t.set_cost("b", UnitKind::cpu_core, 100.0, 250.0);
  TaskSpec ta, tb;
  ta.name = "a";
  ta.trigger = Periodic{1.0};
  tb.name = "b";
  tb.trigger = Periodic{1.0};
  Scenario sc;
  sc.name = "shared-core";
  sc.platform = p;
  sc.graph = build_task_graph({ta, tb}, {});
  sc.table = t;
  sc.policy = Policy::affinity_best;
  sc.duration_s = 1.0;

  Trace tr = run(sc);
  // both pinned to cpu0, multiplier 2: each runs [0, 200ms]
  REQUIRE(tr.records.size() == 2);
  REQUIRE(tr.records[0].finish == 200'000);
  REQUIRE(tr.records[1].finish == 200'000);
  MetricsReport rep = summarize(tr, sc);
  REQUIRE(rep.units.at("cpu0").busy_ms == Approx(200.0));
  REQUIRE(rep.units.at("cpu0").utilization == Approx(0.2));
  REQUIRE(utilization(tr, 0, tr.horizon) == Approx(0.2));
}

TEST_CASE("power helpers validate their inputs") {
  Scenario sc = small_cpu_scenario();
  Trace empty;
  empty.horizon = 0;
  REQUIRE_THROWS_AS(average_power(empty, sc), ValidationError);
  REQUIRE_THROWS_AS(utilization(empty, 0, 0), ValidationError);
}

TEST_CASE("energy is conserved across task, unit and total views") {
  std::mt19937_64 rng(555);
  for (int i = 0; i < 20; ++i) {
    Scenario sc = gen::gen_medium(rng);
    Trace tr = run(sc);
    MetricsReport rep = summarize(tr, sc);
    double task_sum = 0.0, unit_sum = 0.0;
    for (const auto& [k, v] : rep.tasks) task_sum += v.energy_mj;
    for (const auto& [k, v] : rep.units) unit_sum += v.energy_mj;
    REQUIRE(task_sum == Approx(unit_sum).margin(1e-9));
    REQUIRE(rep.totals.dynamic_energy_mj == Approx(task_sum).margin(1e-9));
    REQUIRE(rep.totals.total_energy_mj ==
            Approx(rep.totals.dynamic_energy_mj + rep.totals.static_energy_mj).margin(1e-9));

    std::int64_t completed = 0;
    for (auto c : tr.completed) completed += c;
    REQUIRE(rep.totals.completed == completed);
  }
}

TEST_CASE("policy comparison reports per-metric deltas against the baseline") {
  std::mt19937_64 rng(77);
  Scenario sc = gen::gen_medium(rng);
  sc.policy = Policy::affinity_best;
  MetricsReport base = summarize(run(sc), sc);
  sc.policy = Policy::min_energy;
  MetricsReport cand = summarize(run(sc), sc);

  CompareReport cr = compare(base, cand);
  REQUIRE_THAT(cr.baseline, ContainsSubstring("affinity"));
  REQUIRE_THAT(cr.candidate, ContainsSubstring("energy"));
  REQUIRE(cr.totals.count("total_energy_mj") == 1);
  REQUIRE(cr.totals.count("average_power_w") == 1);
  REQUIRE(cr.totals.count("completed") == 1);
  const MetricDelta& d = cr.totals.at("total_energy_mj");
  REQUIRE(d.baseline == Approx(base.totals.total_energy_mj));
  REQUIRE(d.candidate == Approx(cand.totals.total_energy_mj));
  REQUIRE(d.abs_delta == Approx(d.candidate - d.baseline));
  for (const auto& [task, metrics] : cr.tasks) {
    REQUIRE(base.tasks.count(task) == 1);
    REQUIRE(metrics.count("throughput_per_s") == 1);
    REQUIRE(metrics.count("p95_ms") == 1);
    REQUIRE(metrics.count("energy_mj") == 1);
  }
}

TEST_CASE("comparison refuses reports over different task sets") {
  Scenario sc = small_cpu_scenario();
  Trace tr = run(sc);
  MetricsReport a = summarize(tr, sc);
  MetricsReport b = a;
  b.tasks.erase("work");
  TaskMetrics tm;
  b.tasks["other"] = tm;
  REQUIRE_THROWS_WITH(compare(a, b), ContainsSubstring("task sets differ"));
}

TEST_CASE("relative deltas guard against a zero baseline") {
  MetricDelta d = detail::delta(0.0, 5.0);
  REQUIRE(d.rel_delta == 0.0);
  REQUIRE(d.abs_delta == 5.0);
  MetricDelta e = detail::delta(10.0, 5.0);
  REQUIRE(e.rel_delta == Approx(-0.5));
}

TEST_CASE("report json round trips without loss") {
  std::mt19937_64 rng(31);
  Scenario sc = gen::gen_medium(rng);
  Trace tr = run(sc);
  MetricsReport rep = summarize(tr, sc);

  nlohmann::json j = report_to_json(rep);
  MetricsReport back = report_from_json(j);
  REQUIRE(report_to_json(back).dump(2) == j.dump(2));

  REQUIRE(j["scenario"] == sc.name);
  REQUIRE(j["policy"] == std::string(to_string(sc.policy)));
  REQUIRE(j.contains("tasks"));
  REQUIRE(j.contains("units"));
  REQUIRE(j["totals"].contains("average_power_w"));
}

TEST_CASE("csv export is a flat section,name,metric,value table") {
  Scenario sc = small_cpu_scenario();
  Trace tr = run(sc);
  MetricsReport rep = summarize(tr, sc);
  std::ostringstream out;
  report_to_csv(rep, out);
  std::string csv = out.str();

  REQUIRE_THAT(csv, ContainsSubstring("section,name,metric,value\n"));
  REQUIRE_THAT(csv, ContainsSubstring("task,work,completed,5\n"));
  REQUIRE_THAT(csv, ContainsSubstring("unit,cpu0,utilization,0.5\n"));
  REQUIRE_THAT(csv, ContainsSubstring("totals,,average_power_w,2.25\n"));

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "section,name,metric,value");
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    REQUIRE(std::count(line.begin(), line.end(), ',') == 3);
  }
  REQUIRE(rows > 10);
}

TEST_CASE("compare json lists every changed metric") {
  Scenario sc = small_cpu_scenario();
  MetricsReport a = summarize(run(sc), sc);
  sc.policy = Policy::min_latency;
  MetricsReport b = summarize(run(sc), sc);
  nlohmann::json j = compare_to_json(compare(a, b));
  REQUIRE(j["baseline"] == a.scenario + "/affinity");
  REQUIRE(j["candidate"] == b.scenario + "/latency");
  REQUIRE(j["totals"]["completed"].contains("baseline"));
  REQUIRE(j["totals"]["completed"].contains("rel_delta"));
}

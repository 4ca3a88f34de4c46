#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetsim/calibration_run.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/presets.hpp"
#include "hetsim/scenario.hpp"

namespace hetsim {
namespace cli_detail {

struct ScenarioArgs {
  std::string preset;
  std::string config;
  std::string policy;
  double duration = 0.0;
  std::int64_t seed = 0;
  CLI::Option* duration_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

inline void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
  auto* p = cmd->add_option("--preset", a.preset, "built-in scenario name");
  auto* c = cmd->add_option("--config", a.config, "scenario JSON file");
  p->excludes(c);
  c->excludes(p);
  cmd->add_option("--policy", a.policy, "affinity|throughput|latency|energy");
  a.duration_opt = cmd->add_option("--duration", a.duration, "simulated seconds");
  a.seed_opt = cmd->add_option("--seed", a.seed, "rng seed");
}

inline Scenario resolve_scenario(const ScenarioArgs& a) {
  if (a.preset.empty() && a.config.empty()) {
    throw CLI::RequiredError("one of --preset or --config");
  }
  Scenario sc = a.preset.empty() ? load_scenario_file(a.config) : make_preset(a.preset);
  if (!a.policy.empty()) sc.policy = parse_policy(a.policy);
  if (a.duration_opt != nullptr && a.duration_opt->count() > 0) {
    if (a.duration <= 0.0) throw ValidationError("non-positive duration");
    sc.duration_s = a.duration;
  }
  if (a.seed_opt != nullptr && a.seed_opt->count() > 0) {
    if (a.seed < 0) throw ValidationError("negative seed");
    sc.seed = static_cast<std::uint64_t>(a.seed);
  }
  return sc;
}

inline void write_report_file(const MetricsReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw SimError("cannot write '" + path + "'");
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    report_to_csv(rep, f);
  } else {
    f << report_to_json(rep).dump(2) << "\n";
  }
}

inline void print_report(const MetricsReport& rep, std::ostream& out) {
  out << "scenario: " << rep.scenario << "  policy: " << rep.policy << "  duration: "
      << rep.totals.duration_s << " s\n\n";
  out << std::left << std::setw(22) << "task" << std::right << std::setw(9) << "released"
      << std::setw(10) << "completed" << std::setw(8) << "dropped" << std::setw(10) << "thru/s"
      << std::setw(10) << "p95 ms" << std::setw(7) << "miss" << std::setw(12) << "energy mJ"
      << "\n";
  for (const auto& [name, tm] : rep.tasks) {
    out << std::left << std::setw(22) << name << std::right << std::setw(9) << tm.released
        << std::setw(10) << tm.completed << std::setw(8) << tm.dropped << std::setw(10)
        << std::fixed << std::setprecision(2) << tm.throughput_per_s << std::setw(10)
        << tm.latency.p95_ms << std::setw(7) << tm.deadline_miss << std::setw(12)
        << std::setprecision(1) << tm.energy_mj << "\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  out << "\n" << std::left << std::setw(10) << "unit" << std::right << std::setw(10) << "kind"
      << std::setw(11) << "util %" << std::setw(12) << "energy mJ" << "\n";
  for (const auto& [id, um] : rep.units) {
    out << std::left << std::setw(10) << id << std::right << std::setw(10) << um.kind
        << std::setw(11) << std::fixed << std::setprecision(1) << 100.0 * um.utilization
        << std::setw(12) << um.energy_mj << "\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  out << "\ntotal energy: " << rep.totals.total_energy_mj << " mJ  average power: "
      << rep.totals.average_power_w << " W\n";
}

inline void print_compare(const CompareReport& cr, std::ostream& out) {
  out << "baseline: " << cr.baseline << "\ncandidate: " << cr.candidate << "\n\n";
  out << std::left << std::setw(22) << "task" << std::setw(18) << "metric" << std::right
      << std::setw(12) << "baseline" << std::setw(12) << "candidate" << std::setw(11) << "delta %"
      << "\n";
  for (const auto& [name, row] : cr.tasks) {
    for (const auto& [metric, d] : row) {
      out << std::left << std::setw(22) << name << std::setw(18) << metric << std::right
          << std::setw(12) << std::fixed << std::setprecision(3) << d.baseline << std::setw(12)
          << d.candidate << std::setw(11) << std::setprecision(1) << 100.0 * d.rel_delta << "\n";
      out.unsetf(std::ios::fixed);
      out << std::setprecision(6);
    }
  }
  out << "\n";
  for (const auto& [metric, d] : cr.totals) {
    out << std::left << std::setw(22) << "totals" << std::setw(18) << metric << std::right
        << std::setw(12) << std::fixed << std::setprecision(3) << d.baseline << std::setw(12)
        << d.candidate << "\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
}

}  // namespace cli_detail

// Parses and executes one CLI invocation. Returns the process exit code:
// 0 success, 2 usage error, 3 invalid input, 4 runtime failure. Failures
// print exactly one diagnostic line to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"heterogeneous driving-platform simulator"};
  app.require_subcommand(1);

  cli_detail::ScenarioArgs run_args;
  std::string run_output, run_trace;
  bool run_json = false;
  auto* cmd_run = app.add_subcommand("run", "simulate one scenario and report metrics");
  cli_detail::add_scenario_options(cmd_run, run_args);
  cmd_run->add_option("--output", run_output, "write report to file (.csv or .json)");
  cmd_run->add_option("--trace", run_trace, "write per-instance trace (jsonl)");
  cmd_run->add_flag("--json", run_json, "print the report as JSON");

  cli_detail::ScenarioArgs cmp_args;
  std::string cmp_output;
  bool cmp_json = false;
  std::vector<std::string> cmp_policies;
  auto* cmd_compare = app.add_subcommand("compare", "run several policies on one scenario");
  cli_detail::add_scenario_options(cmd_compare, cmp_args);
  cmd_compare->add_option("--policies", cmp_policies, "policies to compare (default: all four)")
      ->delimiter(',');
  cmd_compare->add_option("--output", cmp_output, "write comparison JSON to file");
  cmd_compare->add_flag("--json", cmp_json, "print the comparison as JSON");

  double cal_duration = 60.0;
  std::string cal_output;
  bool cal_json = false;
  auto* cmd_calibrate = app.add_subcommand("calibrate", "fit mobile SoC latencies and residual power");
  cmd_calibrate->add_option("--duration", cal_duration, "simulated seconds (default 60)");
  cmd_calibrate->add_option("--output", cal_output, "write calibration JSON to file");
  cmd_calibrate->add_flag("--json", cal_json, "print the calibration as JSON");

  auto* cmd_presets = app.add_subcommand("presets", "list built-in scenarios");

  std::vector<const char*> argv;
  argv.push_back("hetsim");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (cmd_run->parsed()) {
      Scenario sc = cli_detail::resolve_scenario(run_args);
      Trace tr = run(sc);
      MetricsReport rep = summarize(tr, sc);
      if (!run_trace.empty()) {
        std::ofstream f(run_trace);
        if (!f) throw SimError("cannot write '" + run_trace + "'");
        trace_to_jsonl(tr, sc, f);
      }
      if (!run_output.empty()) cli_detail::write_report_file(rep, run_output);
      if (run_json) {
        out << report_to_json(rep).dump(2) << "\n";
      } else {
        cli_detail::print_report(rep, out);
      }
      return 0;
    }

    if (cmd_compare->parsed()) {
      if (cmp_policies.empty()) {
        cmp_policies = {"affinity", "throughput", "latency", "energy"};
      }
      std::sort(cmp_policies.begin(), cmp_policies.end());
      cmp_policies.erase(std::unique(cmp_policies.begin(), cmp_policies.end()),
                         cmp_policies.end());
      if (cmp_policies.size() < 2) {
        throw ValidationError("compare needs at least two distinct policies");
      }
      Scenario base_sc = cli_detail::resolve_scenario(cmp_args);
      std::vector<MetricsReport> reports;
      for (const auto& pol : cmp_policies) {
        Scenario sc = base_sc;
        sc.policy = parse_policy(pol);
        reports.push_back(summarize(run(sc), sc));
      }
      nlohmann::json jout;
      jout["scenario"] = base_sc.name;
      jout["baseline"] = cmp_policies.front();
      jout["comparisons"] = nlohmann::json::array();
      for (std::size_t i = 1; i < reports.size(); ++i) {
        CompareReport cr = compare(reports.front(), reports[i]);
        jout["comparisons"].push_back(compare_to_json(cr));
        if (!cmp_json) {
          cli_detail::print_compare(cr, out);
          out << "\n";
        }
      }
      if (cmp_json) out << jout.dump(2) << "\n";
      if (!cmp_output.empty()) {
        std::ofstream f(cmp_output);
        if (!f) throw SimError("cannot write '" + cmp_output + "'");
        f << jout.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_calibrate->parsed()) {
      Calibration cal = run_mobile_soc_calibration(cal_duration);
      nlohmann::json j = calibration_to_json(cal);
      if (!cal_output.empty()) {
        std::ofstream f(cal_output);
        if (!f) throw SimError("cannot write '" + cal_output + "'");
        f << j.dump(2) << "\n";
      }
      if (cal_json || cal_output.empty()) {
        out << j.dump(2) << "\n";
      } else {
        out << "static power: " << cal.static_power_w << " W (dynamic " << cal.dynamic_power_w
            << " W against " << cal.target_power_w << " W target)\n";
      }
      return 0;
    }

    if (cmd_presets->parsed()) {
      for (const auto& name : preset_names()) {
        out << name << " - " << preset_description(name) << "\n";
      }
      return 0;
    }

    err << "error: no command given\n";
    return 2;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace hetsim

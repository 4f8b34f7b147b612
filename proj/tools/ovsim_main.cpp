/*
 * Copyright 2026 The ovsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// ovsim: command-line front end.
//
//   ovsim simulate      --setup A --strategy customized --reload 20ms [--trace-csv t.csv]
//   ovsim analyze       --setup A --strategy overlay
//   ovsim sweep-reload  --setup D --overheads 20ms,4ms,1ms,0.2ms,0ms [--out r.md]
//   ovsim sweep-overlay --setup all --scales 1,1.5,2,wide --baseline-reload 0.2ms
//   ovsim gantt         --setup A --strategy customized --out a.svg [--from 0ms --to 200ms]
//   ovsim calibrate     [--out table.json]
//   ovsim validate      --workload w.json
//
// Exit status: 0 ok, 1 usage or input error, 2 Divergent with --fail-on-divergent.
// Relative output paths are resolved against $OVSIM_OUT_DIR when it is set.

#include "ovsim/ovsim.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ovsim;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDivergent = 2;

struct UsageError : Error {
  using Error::Error;
};

struct SourceOptions {
  std::string setup;
  std::string workload_path;
  std::string latency_table_path;
  std::vector<std::string> strategies;
  std::string reload;
  std::string overlay_scale;
  std::int64_t horizon = 0;
  std::int64_t warmup = -1;
};

struct Options {
  SourceOptions src;
  std::string out;
  std::string trace_csv;
  std::string format = "md";
  std::string overheads = "20ms,4ms,1ms,0.2ms,0ms";
  std::string scales = "1,1.5,2,wide";
  std::string baseline_reload = "0.2ms";
  std::string from = "0ms";
  std::string to;
  unsigned threads = 0;
  bool fail_on_divergent = false;
  bool stamp = false;
};

void report_error(const char* what) {
  std::string line(what);
  for (char& c : line)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "ovsim: error: " << line << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("OVSIM_OUT_DIR"); dir != nullptr && *dir != '\0') p = std::filesystem::path(dir) / p;
  }
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p = output_path(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + p.string() + "'");
}

std::string stamp_line() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("generated: ") + buf + "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

TimeSpan duration_flag(const std::string& value, const char* flag) {
  try {
    return parse_duration(value);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

StrategyConfig strategy_from_flags(const std::string& name, const SourceOptions& o) {
  if (name == "customized") {
    const TimeSpan r = o.reload.empty() ? milliseconds(20) : duration_flag(o.reload, "--reload");
    if (r.is_negative()) throw UsageError("--reload: must be non-negative");
    return StrategyConfig::customized(r);
  }
  if (name == "wide" || name == "wide-spectrum") return StrategyConfig::wide_spectrum_overlay();
  if (name == "overlay") {
    Rational scale(1);
    if (!o.overlay_scale.empty()) {
      try {
        scale = Rational::parse(o.overlay_scale);
      } catch (const Error& e) {
        throw UsageError(std::string("--overlay-scale: ") + e.what());
      }
    }
    if (scale < Rational(1)) throw UsageError("--overlay-scale: must be >= 1");
    return StrategyConfig::overlay(scale);
  }
  throw UsageError("--strategy: unknown strategy '" + name + "' (expected overlay, customized or wide)");
}

/// Every workload selected by the source flags, one per (setup, strategy).
std::vector<WorkloadConfig> workloads(const SourceOptions& o) {
  if (o.setup.empty() == o.workload_path.empty()) throw UsageError("give exactly one of --setup or --workload");
  auto requested = [&](const char* name) { return std::find(o.strategies.begin(), o.strategies.end(), name) != o.strategies.end(); };
  if (!o.reload.empty() && !requested("customized")) throw UsageError("--reload only applies to --strategy customized");
  if (!o.overlay_scale.empty() && !requested("overlay")) throw UsageError("--overlay-scale only applies to --strategy overlay");

  std::vector<WorkloadConfig> base;
  if (!o.workload_path.empty()) {
    if (!o.latency_table_path.empty()) throw UsageError("--latency-table only applies to --setup");
    base.push_back(load_workload(read_file(o.workload_path)));
  } else {
    const LatencyTable table =
        o.latency_table_path.empty() ? shipped_latency_table() : load_latency_table(read_file(o.latency_table_path));
    std::vector<SetupId> ids;
    if (o.setup == "all" || o.setup == "ALL") {
      ids.assign(std::begin(kAllSetups), std::end(kAllSetups));
    } else {
      try {
        ids.push_back(parse_setup(o.setup));
      } catch (const Error& e) {
        throw UsageError(std::string("--setup: ") + e.what());
      }
    }
    for (SetupId id : ids) base.push_back(builtin_setup(id, StrategyConfig::overlay(), table));
  }

  std::vector<WorkloadConfig> out;
  for (const WorkloadConfig& w : base) {
    std::vector<StrategyConfig> strategies;
    for (const std::string& s : o.strategies) strategies.push_back(strategy_from_flags(s, o));
    if (strategies.empty()) strategies.push_back(w.strategy);
    for (const StrategyConfig& s : strategies) {
      WorkloadConfig v = w;
      v.strategy = s;
      if (o.horizon > 0) v.horizon_hyperperiods = o.horizon;
      if (o.warmup >= 0) v.warmup_hyperperiods = o.warmup;
      validate_workload(v);
      out.push_back(std::move(v));
    }
  }
  return out;
}

void add_source_flags(CLI::App* cmd, SourceOptions& o, bool multi_strategy) {
  cmd->add_option("--setup", o.setup, "Reference setup A, B, C, D (or 'all')");
  cmd->add_option("--workload", o.workload_path, "Workload JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--latency-table", o.latency_table_path, "Latency table JSON overriding the shipped one")
      ->check(CLI::ExistingFile);
  if (multi_strategy) {
    cmd->add_option("--strategy", o.strategies, "overlay | customized | wide (repeatable)");
  } else {
    cmd->add_option("--strategy", o.strategies, "overlay | customized | wide")->expected(1);
  }
  cmd->add_option("--reload", o.reload, "Reload overhead for customized, e.g. 20ms");
  cmd->add_option("--overlay-scale", o.overlay_scale, "Overlay throughput multiplier (>= 1)");
  cmd->add_option("--horizon", o.horizon, "Horizon in hyperperiods")->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", o.warmup, "Warmup hyperperiods excluded from metrics")->check(CLI::NonNegativeNumber);
}

void emit(const Options& opt, const std::string& text) {
  const std::string payload = opt.stamp ? text + stamp_line() : text;
  if (opt.out.empty()) {
    std::cout << payload;
  } else {
    write_file(opt.out, payload);
    std::cout << "wrote " << output_path(opt.out).string() << '\n';
  }
}

int cmd_simulate(const Options& opt) {
  const std::vector<WorkloadConfig> ws = workloads(opt.src);
  std::vector<SimResult> results = run_grid(ws, opt.threads);
  bool divergent = false;
  for (const SimResult& r : results) divergent |= !r.sustainable();

  if (ws.size() == 1) {
    std::cout << "workload: " << ws[0].name << " (" << ws[0].strategy.label() << ")\n" << describe(results[0]);
    if (!opt.trace_csv.empty()) {
      write_file(opt.trace_csv, trace_csv(results[0].trace));
      std::cout << "wrote " << output_path(opt.trace_csv).string() << '\n';
    }
    if (opt.stamp) std::cout << stamp_line();
  } else {
    if (!opt.trace_csv.empty()) throw UsageError("--trace-csv needs a single workload and strategy");
    std::vector<SummaryEntry> entries;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      // Builtin setups become rows "A".."D".
      std::string row = ws[i].name;
      if (row.starts_with("setup-")) row.erase(0, 6);
      entries.push_back({row, ws[i].strategy.label(), &results[i]});
    }
    emit(opt, summary_md(entries));
  }
  return divergent && opt.fail_on_divergent ? kExitDivergent : kExitOk;
}

int cmd_analyze(const Options& opt) {
  std::ostringstream o;
  for (const WorkloadConfig& w : workloads(opt.src)) {
    const UtilizationBounds b = utilization_bounds(w);
    o << "workload: " << w.name << " (" << w.strategy.label() << ")\n";
    o << "lower: " << format_ratio(b.lower) << " (" << b.lower.to_string() << ")\n";
    o << "upper: " << format_ratio(b.upper) << " (" << b.upper.to_string() << ")\n";
    o << "blocking: " << format_ratio(b.blocking) << '\n';
    o << "verdict: " << to_string(b.verdict) << '\n';
  }
  emit(opt, o.str());
  return kExitOk;
}

std::string render(const Options& opt, const std::vector<SweepReport>& reports) {
  if (opt.format == "csv") return sweep_csv(reports);
  return sweep_md(reports);
}

bool any_divergent(const std::vector<SweepReport>& reports) {
  for (const SweepReport& r : reports)
    for (const SweepPoint& p : r.points)
      if (!p.result.sustainable()) return true;
  return false;
}

int cmd_sweep_reload(const Options& opt) {
  SourceOptions src = opt.src;
  if (src.strategies.empty()) src.strategies = {"customized"};
  std::vector<TimeSpan> overheads;
  for (const std::string& s : split_list(opt.overheads)) {
    const TimeSpan r = duration_flag(s, "--overheads");
    if (r.is_negative()) throw UsageError("--overheads: negative overhead " + s);
    overheads.push_back(r);
  }
  std::vector<SweepReport> reports;
  for (const WorkloadConfig& w : workloads(src)) {
    if (w.strategy.mode != StrategyMode::Customized) throw UsageError("sweep-reload needs --strategy customized");
    reports.push_back(sweep_reload(w, overheads, opt.threads));
  }
  emit(opt, render(opt, reports));
  return any_divergent(reports) && opt.fail_on_divergent ? kExitDivergent : kExitOk;
}

int cmd_sweep_overlay(const Options& opt) {
  std::vector<OverlayPoint> scales;
  for (const std::string& s : split_list(opt.scales)) {
    if (s == "wide" || s == "wide-spectrum") {
      scales.emplace_back(WideSpectrum{});
      continue;
    }
    try {
      const Rational r = Rational::parse(s);
      if (r < Rational(1)) throw Error("scale must be >= 1");
      scales.emplace_back(r);
    } catch (const Error& e) {
      throw UsageError(std::string("--scales: '") + s + "': " + e.what());
    }
  }
  const TimeSpan baseline = duration_flag(opt.baseline_reload, "--baseline-reload");
  if (baseline.is_negative()) throw UsageError("--baseline-reload: must be non-negative");
  std::vector<SweepReport> reports;
  for (const WorkloadConfig& w : workloads(opt.src)) reports.push_back(sweep_overlay(w, scales, baseline, opt.threads));
  emit(opt, render(opt, reports));
  return any_divergent(reports) && opt.fail_on_divergent ? kExitDivergent : kExitOk;
}

int cmd_gantt(const Options& opt) {
  const std::vector<WorkloadConfig> ws = workloads(opt.src);
  if (ws.size() != 1) throw UsageError("gantt needs a single workload and strategy");
  if (opt.out.empty()) throw UsageError("gantt needs --out");
  const SimResult r = simulate(ws[0]);
  GanttStyle style;
  const TimeStamp from = duration_flag(opt.from, "--from");
  const TimeStamp to = opt.to.empty() ? from + ws[0].hyperperiod() : duration_flag(opt.to, "--to");
  if (!(from < to)) throw UsageError("--from must be before --to");
  style.window = Window{from, to};
  write_file(opt.out, gantt_svg(r.trace, style));
  std::cout << "wrote " << output_path(opt.out).string() << '\n';
  return kExitOk;
}

int cmd_calibrate(const Options& opt) {
  const std::vector<CalibrationTarget> targets = reference_targets();
  const CalibrationResult res = calibrate_workload(targets);
  std::ostringstream table;
  table << "| target | relation | goal | achieved | residual |\n|---|---|---|---|---|\n";
  for (const TargetResidual& r : res.residuals) {
    table << "| " << r.label << (r.hard ? " (hard)" : "") << " | " << to_string(r.relation) << " | " << r.target << " | "
          << r.achieved << " | " << (r.hard ? (r.satisfied ? "ok" : "VIOLATED") : std::to_string(r.residual)) << " |\n";
  }
  table << "\nobjective: " << res.objective << '\n';
  for (const auto& [model, m] : res.table)
    table << model << ": overlay " << format_duration(m.overlay_exec) << ", customized " << format_duration(m.customized_exec)
          << '\n';
  std::cout << table.str();
  if (!opt.out.empty()) {
    write_file(opt.out, calibration_json(res));
    std::cout << "wrote " << output_path(opt.out).string() << '\n';
  }
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  if (opt.src.workload_path.empty()) throw UsageError("validate needs --workload");
  const WorkloadConfig w = load_workload(read_file(opt.src.workload_path));
  std::cout << "ok: " << w.name << " (" << w.tasks.size() << " tasks, " << w.strategy.label() << ", hyperperiod "
            << format_duration(w.hyperperiod()) << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlay vs customized accelerator deployment simulator"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--stamp", opt.stamp, "Append a generation timestamp to outputs");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Simulate one or more workloads");
  add_source_flags(simulate_cmd, opt.src, true);
  simulate_cmd->add_option("--trace-csv", opt.trace_csv, "Write the trace as CSV");
  simulate_cmd->add_option("--out", opt.out, "Write the summary table here (multi-workload runs)");
  simulate_cmd->add_flag("--fail-on-divergent", opt.fail_on_divergent, "Exit 2 when any run is Divergent");
  simulate_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Utilization bounds and quick verdict");
  add_source_flags(analyze_cmd, opt.src, true);
  analyze_cmd->add_option("--out", opt.out, "Output file");

  CLI::App* sweep_reload_cmd = app.add_subcommand("sweep-reload", "Customized busy ratio vs reload overhead");
  add_source_flags(sweep_reload_cmd, opt.src, false);
  sweep_reload_cmd->add_option("--overheads", opt.overheads, "Comma-separated overheads");
  sweep_reload_cmd->add_option("--out", opt.out, "Output file");
  sweep_reload_cmd->add_option("--format", opt.format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  sweep_reload_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  sweep_reload_cmd->add_flag("--fail-on-divergent", opt.fail_on_divergent, "Exit 2 when any point is Divergent");

  CLI::App* sweep_overlay_cmd = app.add_subcommand("sweep-overlay", "Overlay busy ratio vs throughput improvement");
  add_source_flags(sweep_overlay_cmd, opt.src, false);
  sweep_overlay_cmd->add_option("--scales", opt.scales, "Comma-separated scales, 'wide' for wide-spectrum");
  sweep_overlay_cmd->add_option("--baseline-reload", opt.baseline_reload, "Reload of the customized baseline");
  sweep_overlay_cmd->add_option("--out", opt.out, "Output file");
  sweep_overlay_cmd->add_option("--format", opt.format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  sweep_overlay_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  sweep_overlay_cmd->add_flag("--fail-on-divergent", opt.fail_on_divergent, "Exit 2 when any point is Divergent");

  CLI::App* gantt_cmd = app.add_subcommand("gantt", "Render a timeline as SVG");
  add_source_flags(gantt_cmd, opt.src, false);
  gantt_cmd->add_option("--out", opt.out, "SVG output file");
  gantt_cmd->add_option("--from", opt.from, "Window start, e.g. 0ms");
  gantt_cmd->add_option("--to", opt.to, "Window end (default: one hyperperiod after --from)");

  CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "Fit the reference latency table");
  calibrate_cmd->add_option("--out", opt.out, "Write latency table JSON with residuals");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a workload document");
  validate_cmd->add_option("--workload", opt.src.workload_path, "Workload JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(e.what());
    return kExitError;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(opt);
    if (*analyze_cmd) return cmd_analyze(opt);
    if (*sweep_reload_cmd) return cmd_sweep_reload(opt);
    if (*sweep_overlay_cmd) return cmd_sweep_overlay(opt);
    if (*gantt_cmd) return cmd_gantt(opt);
    if (*calibrate_cmd) return cmd_calibrate(opt);
    if (*validate_cmd) return cmd_validate(opt);
  } catch (const std::exception& e) {
    report_error(e.what());
    return kExitError;
  }
  return kExitError;
}

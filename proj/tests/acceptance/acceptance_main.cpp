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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "ovsim/ovsim.hpp"
#include "support/cli_runner.hpp"
#include "support/random_workload.hpp"
#include "support/reference_scheduler.hpp"
#include "support/svg_checks.hpp"
#include "support/trace_checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ovsim;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure notes of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (++notes_ <= 3) detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { info_ += (info_.empty() ? "" : ", ") + s; }
  Outcome outcome() const {
    std::string d = detail_;
    if (notes_ > 3) d += "; ... " + std::to_string(notes_ - 3) + " more";
    if (!info_.empty()) d = d.empty() ? info_ : info_ + "; " + d;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  int notes_ = 0;
  std::string detail_;
  std::string info_;
};

std::string fmt(double v, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

struct Run {
  WorkloadConfig workload;
  SimResult result;
};

// Criterion 1 runs feed criteria 3, 9 and 10.
std::vector<Run> g_runs;

Outcome oracle_equivalence() {
  Check c;
  std::mt19937_64 rng(20240601);
  int customized = 0, overlay = 0;
  for (int i = 0; i < 200; ++i) {
    WorkloadConfig w = testing::random_workload(rng);
    // Horizon 1 s: the generator picks 1000 ms / H hyperperiods.
    c.expect(w.horizon() == Rational(1), "horizon is not 1 s");
    const Trace tr = run_schedule(w);
    const bool same = testing::to_ticks(tr) == testing::reference_schedule(w);
    c.expect(same, "workload " + std::to_string(i) + " differs from the reference");
    (w.strategy.mode == StrategyMode::Customized ? customized : overlay)++;
    MetricsOptions opt{w.warmup_hyperperiods, 5};
    g_runs.push_back({w, compute_metrics(tr, opt)});
  }
  c.expect(customized > 0 && overlay > 0, "both strategies must be exercised");
  c.note("200 workloads, " + std::to_string(overlay) + " overlay / " + std::to_string(customized) + " customized");
  return c.outcome();
}

Outcome determinism() {
  Check c;
  for (SetupId id : kAllSetups) {
    const WorkloadConfig w = builtin_setup(id, StrategyConfig::customized(milliseconds(4)));
    const SimResult a = simulate(w), b = simulate(w);
    c.expect(trace_csv(a.trace) == trace_csv(b.trace), "trace csv differs");
    c.expect(gantt_svg(a.trace) == gantt_svg(b.trace), "svg differs");
    c.expect(describe(a) == describe(b), "summary differs");
    const std::vector<TimeSpan> grid{milliseconds(20), milliseconds(1), Rational(0)};
    c.expect(sweep_md({sweep_reload(w, grid, 1)}) == sweep_md({sweep_reload(w, grid, 3)}), "sweep report differs");
  }
  testing::ScratchDir one, two;
  const char* files[] = {"trace.csv", "sweep.md", "a.svg", "summary.md"};
  for (const testing::ScratchDir* d : {&one, &two}) {
    const std::string env = "OVSIM_OUT_DIR='" + d->path().string() + "'";
    int rc = 0;
    rc |= testing::run_cli("simulate --setup A --strategy customized --reload 1ms --trace-csv trace.csv", env).status;
    rc |= testing::run_cli("sweep-reload --setup all --out sweep.md", env).status;
    rc |= testing::run_cli("gantt --setup A --strategy customized --reload 20ms --out a.svg", env).status;
    rc |= testing::run_cli("simulate --setup all --strategy overlay --strategy customized --out summary.md", env).status;
    c.expect(rc == 0, "cli invocation failed");
  }
  for (const char* f : files) {
    const std::string a = testing::slurp(one.path() / f);
    c.expect(!a.empty() && a == testing::slurp(two.path() / f), std::string("cli output ") + f + " differs");
  }
  c.note("library and cli outputs compared");
  return c.outcome();
}

Outcome bounds_bracketing() {
  Check c;
  int sustainable = 0;
  for (const Run& r : g_runs) {
    if (!r.result.sustainable()) continue;
    ++sustainable;
    const UtilizationBounds b = utilization_bounds(r.workload);
    const TimeSpan reload = r.workload.strategy.mode == StrategyMode::Customized ? r.workload.strategy.reload_overhead : TimeSpan{};
    const Rational eps = reload / (r.result.window.end - r.result.window.start);
    c.expect(r.result.busy_ratio >= b.lower - eps && r.result.busy_ratio <= b.upper + eps,
             "busy " + fmt(r.result.busy_ratio.to_double(), 4) + " outside [" + fmt(b.lower.to_double(), 4) + ", " +
                 fmt(b.upper.to_double(), 4) + "]");
  }
  c.expect(sustainable > 0, "no sustainable runs to check");
  c.note(std::to_string(sustainable) + " sustainable runs");
  return c.outcome();
}

Outcome hyperperiod_exactness() {
  Check c;
  const std::vector<TimeSpan> p{period_of(Rational(20)), period_of(Rational(15)), period_of(Rational(10))};
  const TimeSpan h = hyperperiod(p);
  c.expect(h == rational(1, 5) && h.num() == 1 && h.den() == 5, "got " + h.to_string());
  c.note("H = " + h.to_fraction_string() + " s");
  return c.outcome();
}

Outcome setup_busy_ratios() {
  Check c;
  const SimResult a = simulate(builtin_setup(SetupId::A, StrategyConfig::customized(milliseconds(20))));
  c.expect(a.verdict == Verdict::Divergent, "setup A customized@20ms is Sustainable");
  double max_busy = 0;
  std::string busy;
  for (SetupId id : kAllSetups) {
    const SimResult r = simulate(builtin_setup(id, StrategyConfig::overlay()));
    c.expect(r.sustainable(), std::string("overlay ") + setup_letter(id) + " Divergent");
    max_busy = std::max(max_busy, r.busy_ratio.to_double());
    busy += (busy.empty() ? "" : "/") + fmt(r.busy_ratio.to_double());
  }
  c.expect(max_busy >= 0.50 && max_busy <= 0.60, "max overlay busy " + fmt(max_busy));
  c.note("overlay busy A-D " + busy);
  return c.outcome();
}

const std::vector<TimeSpan> kOverheads{milliseconds(20), milliseconds(4), milliseconds(1), microseconds(200), Rational(0)};

Outcome reload_sweep() {
  Check c;
  const double expected[] = {0.96, 0.85, 0.79, 0.42};
  std::string got;
  for (SetupId id : kAllSetups) {
    const SweepReport r = sweep_reload(builtin_setup(id, StrategyConfig::customized(milliseconds(20))), kOverheads, 1);
    const std::string s(1, setup_letter(id));
    const SweepPoint& overlay = r.point("overlay");
    const SweepPoint& at1 = r.point("customized@1ms");
    const SweepPoint& at0 = r.point("customized@0ms");
    c.expect(at1.result.sustainable() && at1.result.busy_ratio < overlay.result.busy_ratio, s + ": 1 ms does not beat overlay");
    c.expect(at0.result.sustainable() && at0.result.busy_ratio <= overlay.result.busy_ratio, s + ": 0 ms exceeds overlay");
    const Normalized& n = r.normalized.at("customized@1ms");
    const double v = n.fail() ? NAN : n.ratio->to_double();
    c.expect(std::abs(v - expected[static_cast<int>(id)]) <= 0.15, s + ": 1 ms ratio " + fmt(v));
    got += (got.empty() ? "" : "/") + fmt(v);
    std::optional<Rational> prev;
    for (std::size_t i = kOverheads.size(); i-- > 0;) {
      const Normalized& p = r.normalized.at(r.points[i].label);
      if (p.fail()) continue;
      c.expect(!prev || *p.ratio >= *prev, s + ": ratio decreases at " + r.points[i].label);
      prev = p.ratio;
    }
  }
  c.note("1 ms ratios A-D " + got);
  return c.outcome();
}

Outcome overlay_sweep() {
  Check c;
  const double expected[] = {0.37, 0.72, 0.88};
  std::string got;
  for (SetupId id : kAllSetups) {
    const SweepReport r = sweep_overlay(builtin_setup(id, StrategyConfig::overlay()),
                                        {Rational(1), rational(3, 2), Rational(2), WideSpectrum{}}, microseconds(200), 1);
    const std::string s(1, setup_letter(id));
    auto ratio = [&](const char* label) {
      const Normalized& n = r.normalized.at(label);
      return n.fail() ? NAN : n.ratio->to_double();
    };
    const double x2 = ratio("overlay x2");
    got += (got.empty() ? "" : "/") + fmt(x2);
    if (id == SetupId::D) {
      c.expect(x2 > 1, "D: scale 2 ratio " + fmt(x2) + " not above 1");
      c.expect(std::abs(ratio("overlay") - 5.68) <= 1.0, "D: scale 1 ratio " + fmt(ratio("overlay")));
    } else {
      c.expect(x2 < 1 && std::abs(x2 - expected[static_cast<int>(id)]) <= 0.2, s + ": scale 2 ratio " + fmt(x2));
    }
    c.expect(ratio("wide-spectrum") <= 1, s + ": wide-spectrum ratio " + fmt(ratio("wide-spectrum")));
  }
  c.note("scale 2 ratios A-D " + got);
  return c.outcome();
}

Outcome calibration() {
  Check c;
  const std::vector<CalibrationTarget> targets = reference_targets();
  const CalibrationResult r = calibrate_workload(targets);
  c.expect(r.residuals.size() == targets.size(), "missing residuals");
  int hard = 0;
  for (const TargetResidual& t : r.residuals) {
    if (!t.hard) continue;
    ++hard;
    c.expect(t.satisfied, "hard target violated: " + t.label);
  }
  c.expect(r.table == shipped_latency_table(), "fit differs from the shipped table");
  const std::string committed = testing::slurp(std::string(OVSIM_SOURCE_DIR) + "/data/calibrated_latency.json");
  c.expect(calibration_json(r) == committed, "fit differs from data/calibrated_latency.json");
  c.note(std::to_string(targets.size()) + " targets, " + std::to_string(hard) + " hard, objective " + fmt(r.objective, 4));
  return c.outcome();
}

Outcome metrics_laws() {
  Check c;
  int overlay = 0, claims = 0;
  for (const Run& r : g_runs) {
    if (r.workload.strategy.mode == StrategyMode::Overlay) {
      ++overlay;
      c.expect(r.result.reload_ratio.is_zero(), "overlay run with reload time");
    }
    const QuickVerdict q = utilization_bounds(r.workload).verdict;
    if (q == QuickVerdict::DefiniteOverload) {
      ++claims;
      c.expect(!r.result.sustainable(), "DefiniteOverload simulated Sustainable");
    } else if (q == QuickVerdict::LikelyFeasible) {
      ++claims;
      c.expect(r.result.sustainable(), "LikelyFeasible simulated Divergent");
    }
  }
  const std::vector<TimeSpan> zeros(6, TimeSpan{});
  std::vector<TimeSpan> rising;
  for (int i = 1; i <= 6; ++i) rising.push_back(milliseconds(i));
  c.expect(classify_sustainability(zeros) == Verdict::Sustainable, "all-zero backlog not Sustainable");
  c.expect(classify_sustainability(rising) == Verdict::Divergent, "increasing backlog not Divergent");
  c.note(std::to_string(overlay) + " overlay runs, " + std::to_string(claims) + " quick-verdict claims checked");
  return c.outcome();
}

Outcome report_validity() {
  Check c;
  std::vector<const Trace*> traces;
  for (const Run& r : g_runs) traces.push_back(&r.result.trace);
  std::vector<SimResult> setups;
  for (SetupId id : kAllSetups) setups.push_back(simulate(builtin_setup(id, StrategyConfig::customized(milliseconds(20)))));
  for (const SimResult& s : setups) traces.push_back(&s.trace);
  for (const Trace* t : traces) {
    const Window full{Rational(0), std::max(t->end(), t->horizon)};
    try {
      const testing::SvgShapes s = testing::count_svg_shapes(gantt_svg(*t));
      c.expect(s.rects + s.paths == testing::expected_shapes(*t, full), "svg shape count mismatch");
    } catch (const std::exception& e) {
      c.expect(false, std::string("svg not well-formed: ") + e.what());
    }
    std::vector<TraceSegment> busy;
    for (const TraceSegment& seg : t->segments)
      if (seg.kind != SegmentKind::Idle) busy.push_back(seg);
    c.expect(parse_trace_csv(trace_csv(*t)) == busy, "csv round trip lost data");
  }
  c.note(std::to_string(traces.size()) + " traces");
  return c.outcome();
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 = no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "EDF oracle equivalence", 10, oracle_equivalence},
      {2, "determinism", 0, determinism},
      {3, "bounds bracketing", 0, bounds_bracketing},
      {4, "hyperperiod exactness", 0, hyperperiod_exactness},
      {5, "setup busy ratios and Fail tag", 2, setup_busy_ratios},
      {6, "reload overhead flip", 5, reload_sweep},
      {7, "overlay throughput sweep", 5, overlay_sweep},
      {8, "calibration residuals", 0, calibration},
      {9, "metrics laws", 0, metrics_laws},
      {10, "report validity", 0, report_validity},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (cr.limit_s > 0 && secs >= cr.limit_s) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the ") + fmt(cr.limit_s, 0) + " s limit";
    }
    failed += !o.pass;
    std::printf("criterion %2d %s  %s (%.2f s)%s%s\n", cr.id, o.pass ? "PASS" : "FAIL", cr.name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

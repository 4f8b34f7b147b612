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

/**
 * @file sweep.hpp
 * @brief One-dimensional sensitivity studies.
 *
 * Reload sweep: customized runs at several reload overheads, each divided by
 * the overlay's busy ratio. Overlay sweep: overlays of increasing throughput
 * (and the wide-spectrum idealization), each divided by a customized run at a
 * fixed small reload overhead.
 *
 * Divergent points are never turned into a number; they carry a Fail marker.
 */

#pragma once

#include "ovsim/engine.hpp"
#include "ovsim/error.hpp"
#include "ovsim/metrics.hpp"
#include "ovsim/timebase.hpp"
#include "ovsim/workload.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace ovsim {

enum class SweepAxis { ReloadOverhead, OverlayScale };

struct SweepPoint {
  std::string label;
  StrategyConfig strategy;
  SimResult result;
};

/// A busy ratio relative to the baseline, or Fail.
struct Normalized {
  std::optional<Rational> ratio;

  bool fail() const { return !ratio.has_value(); }
};

struct SweepReport {
  std::string workload;
  SweepAxis axis = SweepAxis::ReloadOverhead;
  /// Grid order; the baseline is one of them.
  std::vector<SweepPoint> points;
  std::string baseline_key;
  std::map<std::string, Normalized> normalized;

  const SweepPoint& point(const std::string& label) const {
    for (const SweepPoint& p : points)
      if (p.label == label) return p;
    throw Error("sweep: no point labelled '" + label + "'");
  }
};

/// Each Sustainable point's busy ratio over the baseline's; Fail otherwise.
inline std::map<std::string, Normalized> normalize_report(const std::vector<SweepPoint>& points,
                                                          const std::string& baseline_key) {
  const SweepPoint* base = nullptr;
  for (const SweepPoint& p : points)
    if (p.label == baseline_key) base = &p;
  if (base == nullptr) throw Error("normalize: baseline '" + baseline_key + "' is not among the sweep points");
  if (!base->result.sustainable()) throw Error("normalize: baseline '" + baseline_key + "' is Divergent");
  if (base->result.busy_ratio.is_zero()) throw Error("normalize: baseline '" + baseline_key + "' has zero busy ratio");
  std::map<std::string, Normalized> out;
  for (const SweepPoint& p : points) {
    Normalized n;
    if (p.result.sustainable()) n.ratio = p.result.busy_ratio / base->result.busy_ratio;
    out[p.label] = n;
  }
  return out;
}

/// Simulates every workload, `threads` at a time (0 = hardware concurrency).
/// Results come back in input order regardless of scheduling.
inline std::vector<SimResult> run_grid(const std::vector<WorkloadConfig>& grid, unsigned threads = 0) {
  std::vector<std::optional<SimResult>> slots(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, grid.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        slots[i] = simulate(grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<SimResult> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

namespace detail {

inline SweepReport assemble(const WorkloadConfig& base, SweepAxis axis, const std::vector<StrategyConfig>& strategies,
                            const std::string& baseline_key, unsigned threads) {
  std::vector<WorkloadConfig> grid;
  for (const StrategyConfig& s : strategies) {
    WorkloadConfig w = base;
    w.strategy = s;
    grid.push_back(std::move(w));
  }
  std::vector<SimResult> results = run_grid(grid, threads);
  SweepReport report;
  report.workload = base.name;
  report.axis = axis;
  report.baseline_key = baseline_key;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const std::string label = strategies[i].label();
    for (const SweepPoint& p : report.points)
      if (p.label == label) throw Error("sweep: duplicate grid point '" + label + "'");
    report.points.push_back({label, strategies[i], std::move(results[i])});
  }
  report.normalized = normalize_report(report.points, baseline_key);
  return report;
}

}  // namespace detail

/// Customized runs at each overhead, normalized by an overlay run of the same
/// tasks. The overlay baseline is the last point.
inline SweepReport sweep_reload(const WorkloadConfig& base, const std::vector<TimeSpan>& overheads, unsigned threads = 0) {
  if (base.strategy.mode != StrategyMode::Customized) throw Error("sweep_reload: base workload must use the customized strategy");
  if (overheads.empty()) throw Error("sweep_reload: no overheads given");
  std::vector<StrategyConfig> strategies;
  for (const TimeSpan& r : overheads) {
    if (r.is_negative()) throw Error("sweep_reload: negative overhead " + format_duration(r));
    strategies.push_back(StrategyConfig::customized(r));
  }
  const StrategyConfig baseline = StrategyConfig::overlay();
  strategies.push_back(baseline);
  return detail::assemble(base, SweepAxis::ReloadOverhead, strategies, baseline.label(), threads);
}

struct WideSpectrum {};

/// A throughput multiplier (>= 1) or the wide-spectrum overlay.
using OverlayPoint = std::variant<Rational, WideSpectrum>;

/// Overlay runs at each point, normalized by a customized run at
/// `baseline_reload`. The baseline is the first point.
inline SweepReport sweep_overlay(const WorkloadConfig& base, const std::vector<OverlayPoint>& scales,
                                 const TimeSpan& baseline_reload, unsigned threads = 0) {
  if (baseline_reload.is_negative()) throw Error("sweep_overlay: negative baseline reload");
  if (scales.empty()) throw Error("sweep_overlay: no overlay points given");
  const StrategyConfig baseline = StrategyConfig::customized(baseline_reload);
  std::vector<StrategyConfig> strategies{baseline};
  for (const OverlayPoint& p : scales) {
    if (std::holds_alternative<WideSpectrum>(p)) {
      strategies.push_back(StrategyConfig::wide_spectrum_overlay());
      continue;
    }
    const Rational scale = std::get<Rational>(p);
    if (scale < Rational(1)) throw Error("sweep_overlay: overlay scale must be >= 1, got " + scale.to_string());
    strategies.push_back(StrategyConfig::overlay(scale));
  }
  return detail::assemble(base, SweepAxis::OverlayScale, strategies, baseline.label(), threads);
}

}  // namespace ovsim

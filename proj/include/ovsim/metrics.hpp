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
 * @file metrics.hpp
 * @brief Trace metrics and the sustainability verdict.
 *
 * Busy time counts both execution and reload: the accelerator can do nothing
 * else while a bitstream loads. The two parts are also reported separately.
 *
 * Backlog at an instant b is the execution demand still owed to jobs
 * released strictly before b (pending or in flight). Future reloads are not
 * included because whether they happen depends on the schedule.
 *
 * A run is Divergent when the backlog sampled at hyperperiod boundaries grows
 * strictly over the last W samples and ends above where the measurement
 * window started. Everything else is Sustainable.
 */

#pragma once

#include "ovsim/error.hpp"
#include "ovsim/timebase.hpp"
#include "ovsim/trace.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ovsim {

enum class Verdict { Sustainable, Divergent };

inline const char* to_string(Verdict v) { return v == Verdict::Sustainable ? "Sustainable" : "Divergent"; }

struct Window {
  TimeStamp start;
  TimeStamp end;
};

struct BusyBreakdown {
  Rational busy;
  Rational exec;
  Rational reload;
};

struct TaskStats {
  std::size_t completed = 0;
  std::size_t miss_count = 0;
  /// Absent when the task completed no instance.
  std::optional<TimeSpan> max_response;
  std::optional<double> mean_response_s;
  /// Least-squares slope of response (seconds) against instance index over
  /// completed post-warmup instances.
  std::optional<double> trend_slope_s;
};

struct BacklogSample {
  TimeStamp boundary;
  TimeSpan remaining;
};

struct SimResult {
  Trace trace;
  Window window;
  Rational busy_ratio;
  Rational exec_ratio;
  Rational reload_ratio;
  std::vector<TaskStats> per_task;
  /// Samples at every hyperperiod boundary from 0 to the horizon.
  std::vector<BacklogSample> backlog_series;
  std::int64_t warmup_hyperperiods = 0;
  Verdict verdict = Verdict::Sustainable;

  bool sustainable() const { return verdict == Verdict::Sustainable; }
};

/// Execute and Reload time intersecting `window`, as fractions of its length.
inline BusyBreakdown busy_breakdown(const Trace& trace, const Window& window) {
  if (!(window.start < window.end)) throw Error("busy_ratio: empty window");
  Rational exec;
  Rational reload;
  for (const TraceSegment& s : trace.segments) {
    if (s.kind == SegmentKind::Idle) continue;
    if (s.end <= window.start || s.start >= window.end) continue;
    const TimeStamp lo = std::max(s.start, window.start);
    const TimeStamp hi = std::min(s.end, window.end);
    (s.kind == SegmentKind::Execute ? exec : reload) += hi - lo;
  }
  const TimeSpan len = window.end - window.start;
  BusyBreakdown b;
  b.exec = exec / len;
  b.reload = reload / len;
  b.busy = b.exec + b.reload;
  return b;
}

inline Rational busy_ratio(const Trace& trace, const Window& window) { return busy_breakdown(trace, window).busy; }

/// Remaining execution demand at `boundary` of jobs released before it.
inline TimeSpan backlog_at(const Trace& trace, const TimeStamp& boundary) {
  TimeSpan remaining;
  for (const auto& per_task : trace.jobs) {
    for (const JobRecord& r : per_task) {
      if (!(r.job.release < boundary)) break;  // records are in release order
      TimeSpan done;
      if (r.start && *r.start < boundary) done = std::min(boundary - *r.start, r.job.exec_demand);
      remaining += r.job.exec_demand - done;
    }
  }
  return remaining;
}

/// Backlog at k * hyperperiod for k = 0..horizon/hyperperiod.
inline std::vector<BacklogSample> backlog_series(const Trace& trace) {
  std::vector<BacklogSample> out;
  const std::int64_t count = (trace.horizon / trace.hyperperiod).floor();
  for (std::int64_t k = 0; k <= count; ++k) {
    const TimeStamp b = trace.hyperperiod * Rational(k);
    out.push_back({b, backlog_at(trace, b)});
  }
  return out;
}

/// `samples` are the post-warmup boundary backlogs in time order.
inline Verdict classify_sustainability(const std::vector<TimeSpan>& samples, std::size_t window = 5) {
  if (window < 2) throw Error("classify_sustainability: window must be at least 2");
  if (samples.size() < window + 1)
    throw Error("classify_sustainability: need at least " + std::to_string(window + 1) +
                " post-warmup hyperperiod samples, got " + std::to_string(samples.size()) +
                "; use a longer horizon");
  const std::size_t first = samples.size() - window;
  for (std::size_t i = first + 1; i < samples.size(); ++i)
    if (!(samples[i - 1] < samples[i])) return Verdict::Sustainable;
  return samples.back() > samples.front() ? Verdict::Divergent : Verdict::Sustainable;
}

/// Per-task response statistics. Instances released before `warmup_end` are
/// included in max/mean but excluded from the trend fit.
inline std::vector<TaskStats> response_stats(const Trace& trace, const TimeStamp& warmup_end = TimeStamp{}) {
  std::vector<TaskStats> out(trace.jobs.size());
  const TimeStamp end = trace.end();
  for (std::size_t t = 0; t < trace.jobs.size(); ++t) {
    TaskStats& st = out[t];
    double sum = 0;
    std::vector<std::pair<double, double>> fit;
    for (const JobRecord& r : trace.jobs[t]) {
      if (!r.completion) {
        if (r.job.deadline <= end) ++st.miss_count;
        continue;
      }
      const TimeSpan resp = *r.completion - r.job.release;
      ++st.completed;
      if (*r.completion > r.job.deadline) ++st.miss_count;
      if (!st.max_response || resp > *st.max_response) st.max_response = resp;
      sum += resp.to_double();
      if (r.job.release >= warmup_end) fit.emplace_back(static_cast<double>(r.job.instance), resp.to_double());
    }
    if (st.completed == 0) continue;
    st.mean_response_s = sum / static_cast<double>(st.completed);
    if (fit.size() < 2) {
      st.trend_slope_s = 0.0;
      continue;
    }
    double mx = 0;
    double my = 0;
    for (const auto& [x, y] : fit) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(fit.size());
    my /= static_cast<double>(fit.size());
    double sxy = 0;
    double sxx = 0;
    for (const auto& [x, y] : fit) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    st.trend_slope_s = sxx > 0 ? sxy / sxx : 0.0;
  }
  return out;
}

struct MetricsOptions {
  std::int64_t warmup_hyperperiods = 2;
  std::size_t divergence_window = 5;
};

/// Fills every metric of a SimResult from a finished trace. The measurement
/// window is [warmup * hyperperiod, horizon].
inline SimResult compute_metrics(Trace trace, const MetricsOptions& opt = {}) {
  SimResult r;
  r.warmup_hyperperiods = opt.warmup_hyperperiods;
  r.window = {trace.hyperperiod * Rational(opt.warmup_hyperperiods), trace.horizon};
  const BusyBreakdown b = busy_breakdown(trace, r.window);
  r.busy_ratio = b.busy;
  r.exec_ratio = b.exec;
  r.reload_ratio = b.reload;
  r.per_task = response_stats(trace, r.window.start);
  r.backlog_series = backlog_series(trace);
  std::vector<TimeSpan> post;
  for (const BacklogSample& s : r.backlog_series)
    if (s.boundary >= r.window.start) post.push_back(s.remaining);
  r.verdict = classify_sustainability(post, opt.divergence_window);
  r.trace = std::move(trace);
  return r;
}

}  // namespace ovsim

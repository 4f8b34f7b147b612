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
 * @file engine.hpp
 * @brief Non-preemptive EDF on one reconfigurable accelerator.
 *
 * Event loop:
 *  - every task releases instance k at k * period (all tasks start at t = 0)
 *    while the release is before the horizon;
 *  - whenever the accelerator is free and work is pending, the job with the
 *    earliest deadline is dispatched;
 *  - under the customized strategy a reload precedes the job when the loaded
 *    bitstream differs from the job's model (the accelerator starts empty);
 *  - reload and execution both run to completion;
 *  - nothing is dispatched at or after the horizon, but a job already
 *    dispatched finishes, so the trace may run past the horizon.
 *
 * Late jobs stay in the queue. Nothing is dropped.
 */

#pragma once

#include "ovsim/error.hpp"
#include "ovsim/metrics.hpp"
#include "ovsim/timebase.hpp"
#include "ovsim/trace.hpp"
#include "ovsim/workload.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ovsim {

/// Time spent swapping bitstreams before running `next_model`.
inline TimeSpan switch_cost(const std::optional<std::string>& previous_model, const std::string& next_model,
                            const StrategyConfig& strategy) {
  if (strategy.mode == StrategyMode::Overlay) return {};
  if (previous_model && *previous_model == next_model) return {};
  return strategy.reload_overhead;
}

/// Highest-priority pending job under EDF (see EdfBefore for tie-breaks).
inline const Job& dispatch_next(std::span<const Job> pending, const TimeStamp& now) {
  if (pending.empty()) throw Error("dispatch_next: no pending job at t=" + now.to_string());
  return *std::min_element(pending.begin(), pending.end(), EdfBefore{});
}

/// Runs the schedule and returns the raw trace.
inline Trace run_schedule(const WorkloadConfig& workload) {
  if (workload.tasks.empty()) throw Error("simulate: workload has no tasks");
  validate_workload(workload);

  const std::size_t n = workload.tasks.size();
  Trace trace;
  trace.hyperperiod = workload.hyperperiod();
  trace.horizon = workload.horizon();
  trace.jobs.resize(n);
  std::vector<TimeSpan> periods(n);
  std::vector<TimeSpan> demand(n);
  for (std::size_t i = 0; i < n; ++i) {
    trace.task_names.push_back(workload.tasks[i].name);
    trace.model_ids.push_back(workload.tasks[i].model_id);
    periods[i] = workload.tasks[i].period();
    demand[i] = effective_exec(workload.tasks[i], workload.strategy);
  }

  std::vector<std::int64_t> next_instance(n, 0);
  auto release_time = [&](std::size_t i) { return periods[i] * Rational(next_instance[i]); };

  std::set<Job, EdfBefore> pending;
  std::optional<std::string> loaded;
  TimeStamp now;

  auto push = [&](SegmentKind kind, const TimeStamp& start, const TimeStamp& end, std::optional<JobRef> job,
                  std::string model) {
    trace.segments.push_back({kind, start, end, job, std::move(model)});
  };

  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      for (TimeStamp r = release_time(i); r <= now && r < trace.horizon; r = release_time(i)) {
        const Job job{i, next_instance[i], r, r + periods[i], demand[i]};
        pending.insert(job);
        trace.jobs[i].push_back({job, std::nullopt, std::nullopt});
        ++next_instance[i];
      }
    }

    if (pending.empty()) {
      std::optional<TimeStamp> next;
      for (std::size_t i = 0; i < n; ++i) {
        const TimeStamp r = release_time(i);
        if (r < trace.horizon && (!next || r < *next)) next = r;
      }
      if (!next) {
        if (now < trace.horizon) push(SegmentKind::Idle, now, trace.horizon, std::nullopt, {});
        break;
      }
      push(SegmentKind::Idle, now, *next, std::nullopt, {});
      now = *next;
      continue;
    }

    if (now >= trace.horizon) break;

    const Job job = *pending.begin();
    pending.erase(pending.begin());
    const std::string& model = workload.tasks[job.task_index].model_id;
    const TimeSpan reload = switch_cost(loaded, model, workload.strategy);
    if (reload.is_positive()) {
      push(SegmentKind::Reload, now, now + reload, std::nullopt, model);
      now += reload;
    }
    loaded = model;
    const TimeStamp done = now + job.exec_demand;
    push(SegmentKind::Execute, now, done, JobRef{job.task_index, job.instance}, model);
    JobRecord& rec = trace.jobs[job.task_index][static_cast<std::size_t>(job.instance)];
    rec.start = now;
    rec.completion = done;
    now = done;
  }
  return trace;
}

/// Simulates `workload` and computes all metrics over the post-warmup window.
inline SimResult simulate(const WorkloadConfig& workload, std::size_t divergence_window = 5) {
  return compute_metrics(run_schedule(workload), {workload.warmup_hyperperiods, divergence_window});
}

}  // namespace ovsim

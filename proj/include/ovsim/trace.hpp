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

#pragma once

#include "ovsim/timebase.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace ovsim {

/// One periodic instance. Deadline is the next release of the same task.
struct Job {
  std::size_t task_index = 0;
  std::int64_t instance = 0;
  TimeStamp release;
  TimeStamp deadline;
  TimeSpan exec_demand;

  friend bool operator==(const Job&, const Job&) = default;
};

/// EDF priority: earlier absolute deadline first, then earlier release, lower
/// task index, lower instance index. Total on distinct jobs.
struct EdfBefore {
  bool operator()(const Job& a, const Job& b) const {
    return std::tie(a.deadline, a.release, a.task_index, a.instance) <
           std::tie(b.deadline, b.release, b.task_index, b.instance);
  }
};

enum class SegmentKind { Idle, Reload, Execute };

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Idle: return "idle";
    case SegmentKind::Reload: return "reload";
    case SegmentKind::Execute: return "execute";
  }
  return "?";
}

struct JobRef {
  std::size_t task_index = 0;
  std::int64_t instance = 0;

  friend bool operator==(const JobRef&, const JobRef&) = default;
};

struct TraceSegment {
  SegmentKind kind = SegmentKind::Idle;
  TimeStamp start;
  TimeStamp end;
  std::optional<JobRef> job;  // Execute only
  std::string model_id;       // Reload and Execute

  TimeSpan length() const { return end - start; }

  friend bool operator==(const TraceSegment&, const TraceSegment&) = default;
};

/// Outcome of one job in a run. `start` is the start of execution, after any
/// reload that preceded it.
struct JobRecord {
  Job job;
  std::optional<TimeStamp> start;
  std::optional<TimeStamp> completion;
};

/// Contiguous Idle/Reload/Execute timeline covering [0, max(horizon, last
/// completion)], plus the fate of every released job.
struct Trace {
  std::vector<std::string> task_names;
  std::vector<std::string> model_ids;
  std::vector<TraceSegment> segments;
  /// jobs[task][instance]
  std::vector<std::vector<JobRecord>> jobs;
  TimeStamp horizon;
  TimeSpan hyperperiod;

  TimeStamp end() const { return segments.empty() ? TimeStamp{} : segments.back().end; }
};

}  // namespace ovsim

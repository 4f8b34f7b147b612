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
#include "ovsim/workload.hpp"

#include <algorithm>

namespace ovsim {

enum class QuickVerdict { DefiniteOverload, LikelyFeasible, NeedsSimulation };

inline const char* to_string(QuickVerdict v) {
  switch (v) {
    case QuickVerdict::DefiniteOverload: return "DefiniteOverload";
    case QuickVerdict::LikelyFeasible: return "LikelyFeasible";
    case QuickVerdict::NeedsSimulation: return "NeedsSimulation";
  }
  return "?";
}

/// lower = sum f_i * C_i (no reloads), upper = sum f_i * (C_i + R) (a reload
/// before every job). `blocking` = max_i f_i * max_j (C_j + R), the share of
/// a period one non-preemptive job can steal.
struct UtilizationBounds {
  Rational lower;
  Rational upper;
  Rational blocking;
  QuickVerdict verdict = QuickVerdict::NeedsSimulation;
};

/// Conservative three-way call; only the two extremes are claims.
inline QuickVerdict quick_verdict(const UtilizationBounds& b) {
  if (b.lower > Rational(1)) return QuickVerdict::DefiniteOverload;
  if (b.upper <= Rational(1) - b.blocking) return QuickVerdict::LikelyFeasible;
  return QuickVerdict::NeedsSimulation;
}

inline UtilizationBounds utilization_bounds(const WorkloadConfig& w) {
  const TimeSpan reload = w.strategy.mode == StrategyMode::Customized ? w.strategy.reload_overhead : TimeSpan{};
  UtilizationBounds b;
  TimeSpan longest;
  Rational max_freq;
  for (const TaskSpec& t : w.tasks) {
    const TimeSpan c = effective_exec(t, w.strategy);
    b.lower += t.frequency * c;
    b.upper += t.frequency * (c + reload);
    longest = std::max(longest, c + reload);
    max_freq = std::max(max_freq, t.frequency);
  }
  b.blocking = max_freq * longest;
  b.verdict = quick_verdict(b);
  return b;
}

}  // namespace ovsim

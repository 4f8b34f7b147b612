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
 * @file shipped_table.hpp
 * @brief Default latency table for the reference setups.
 *
 * These numbers are FITTED, not measured: they are the output of
 * `ovsim calibrate` against reference_targets() (see data/calibrated_latency.json
 * for the residuals). Regenerate both together; a unit test pins them to the
 * calibrator's output.
 */

#pragma once

#include "ovsim/workload.hpp"

#include <cstdint>

namespace ovsim {

struct ShippedLatency {
  const char* model_id;
  std::int64_t overlay_us;
  std::int64_t customized_us;
};

inline constexpr ShippedLatency kShippedLatencies[] = {
    {"DeiT-L", 1810, 1509},      {"DeiT-S", 2811, 284},     {"MLP-Mixer-L", 6017, 4315},
    {"MLP-Mixer-S", 5867, 592},  {"PointNet-L", 39351, 37488}, {"PointNet-S", 253, 239},
};

inline LatencyTable shipped_latency_table() {
  LatencyTable t;
  for (const ShippedLatency& e : kShippedLatencies)
    t[e.model_id] = {microseconds(e.overlay_us), microseconds(e.customized_us)};
  return t;
}

/// Reference setup with the shipped latencies.
inline WorkloadConfig builtin_setup(SetupId id, const StrategyConfig& strategy) {
  return builtin_setup(id, strategy, shipped_latency_table());
}

}  // namespace ovsim

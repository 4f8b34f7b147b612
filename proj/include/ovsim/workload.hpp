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
 * @file workload.hpp
 * @brief Periodic DNN tasks, deployment strategies and workload documents.
 *
 * A workload is a set of periodic tasks sharing one accelerator. Each task
 * names the model (bitstream) it runs and carries two latencies: one on the
 * generic overlay and one on its own customized bitstream. The strategy picks
 * which latency applies and whether model switches cost a reload.
 *
 * Workload documents are JSON:
 * ```
 * {
 *   "name": "setup-A",
 *   "tasks": [
 *     {"name": "segmentation", "model_id": "DeiT-L", "frequency_hz": 20,
 *      "overlay_exec": "12ms", "customized_exec": "10ms"}
 *   ],
 *   "strategy": {"mode": "customized", "reload_overhead": "20ms"},
 *   "horizon_hyperperiods": 20,
 *   "warmup_hyperperiods": 2
 * }
 * ```
 */

#pragma once

#include "ovsim/error.hpp"
#include "ovsim/timebase.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ovsim {

enum class StrategyMode { Overlay, Customized };

struct StrategyConfig {
  StrategyMode mode = StrategyMode::Overlay;
  /// Customized only: cost of every bitstream swap.
  TimeSpan reload_overhead{};
  /// Overlay only: throughput multiplier, 1 = today's overlay.
  Rational overlay_scale{1};
  /// Overlay only: latency parity with customized bitstreams. Overrides
  /// overlay_scale.
  bool wide_spectrum = false;

  static StrategyConfig overlay(Rational scale = Rational(1)) {
    StrategyConfig s;
    s.overlay_scale = scale;
    return s;
  }
  static StrategyConfig wide_spectrum_overlay() {
    StrategyConfig s;
    s.wide_spectrum = true;
    return s;
  }
  static StrategyConfig customized(TimeSpan reload) {
    StrategyConfig s;
    s.mode = StrategyMode::Customized;
    s.reload_overhead = reload;
    return s;
  }

  bool is_overlay() const { return mode == StrategyMode::Overlay; }

  /// Short human label: "overlay", "overlay x1.5", "wide-spectrum",
  /// "customized@20ms".
  std::string label() const {
    if (mode == StrategyMode::Customized) return "customized@" + format_duration(reload_overhead);
    if (wide_spectrum) return "wide-spectrum";
    if (overlay_scale == Rational(1)) return "overlay";
    return "overlay x" + overlay_scale.to_string();
  }

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

struct TaskSpec {
  std::string name;
  std::string model_id;
  Rational frequency;  // Hz
  TimeSpan overlay_exec;
  TimeSpan customized_exec;

  TimeSpan period() const { return Rational(1) / frequency; }

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct WorkloadConfig {
  std::string name;
  std::vector<TaskSpec> tasks;
  StrategyConfig strategy;
  std::int64_t horizon_hyperperiods = 20;
  std::int64_t warmup_hyperperiods = 2;

  std::vector<TimeSpan> periods() const {
    std::vector<TimeSpan> out;
    out.reserve(tasks.size());
    for (const TaskSpec& t : tasks) out.push_back(t.period());
    return out;
  }
  TimeSpan hyperperiod() const {
    const auto p = periods();
    return ovsim::hyperperiod(p);
  }
  TimeStamp horizon() const { return hyperperiod() * Rational(horizon_hyperperiods); }

  friend bool operator==(const WorkloadConfig&, const WorkloadConfig&) = default;
};

/// Exact reciprocal of a positive frequency.
inline TimeSpan period_of(const Rational& frequency_hz) {
  if (!frequency_hz.is_positive()) throw Error("period_of: frequency must be positive, got " + frequency_hz.to_string());
  return Rational(1) / frequency_hz;
}

/// Execution demand of one job of `task` under `strategy`.
inline TimeSpan effective_exec(const TaskSpec& task, const StrategyConfig& strategy) {
  if (strategy.mode == StrategyMode::Customized) return task.customized_exec;
  if (strategy.wide_spectrum) return task.customized_exec;
  return task.overlay_exec / strategy.overlay_scale;
}

// ---------------------------------------------------------------------------
// Validation

/// Checks every invariant of a workload; throws ConfigError naming the field.
inline void validate_strategy(const StrategyConfig& s, const std::string& path = "strategy") {
  if (s.mode == StrategyMode::Customized) {
    if (s.reload_overhead.is_negative())
      throw ConfigError(path + ".reload_overhead", "reload overhead must be non-negative, got " + format_duration(s.reload_overhead));
  } else if (s.overlay_scale < Rational(1)) {
    throw ConfigError(path + ".overlay_scale", "overlay scale must be >= 1, got " + s.overlay_scale.to_string());
  }
}

inline void validate_workload(const WorkloadConfig& w) {
  if (w.name.empty()) throw ConfigError("name", "workload name is empty");
  if (w.tasks.empty()) throw ConfigError("tasks", "workload has no tasks");
  std::set<std::string> names;
  std::set<std::string> models;
  for (std::size_t i = 0; i < w.tasks.size(); ++i) {
    const TaskSpec& t = w.tasks[i];
    const std::string path = "tasks[" + std::to_string(i) + "]";
    if (t.name.empty()) throw ConfigError(path + ".name", "task name is empty");
    if (t.model_id.empty()) throw ConfigError(path + ".model_id", "model id is empty");
    if (!t.frequency.is_positive())
      throw ConfigError(path + ".frequency_hz", "frequency must be positive, got " + t.frequency.to_string());
    if (!t.overlay_exec.is_positive())
      throw ConfigError(path + ".overlay_exec", "execution time must be positive, got " + format_duration(t.overlay_exec));
    if (!t.customized_exec.is_positive())
      throw ConfigError(path + ".customized_exec",
                        "execution time must be positive, got " + format_duration(t.customized_exec));
    if (!names.insert(t.name).second) throw ConfigError(path + ".name", "duplicate task name '" + t.name + "'");
    if (!models.insert(t.model_id).second)
      throw ConfigError(path + ".model_id", "duplicate model id '" + t.model_id + "'");
  }
  validate_strategy(w.strategy);
  if (w.horizon_hyperperiods <= 0)
    throw ConfigError("horizon_hyperperiods", "must be positive, got " + std::to_string(w.horizon_hyperperiods));
  if (w.warmup_hyperperiods < 0)
    throw ConfigError("warmup_hyperperiods", "must be non-negative, got " + std::to_string(w.warmup_hyperperiods));
  if (w.horizon_hyperperiods <= w.warmup_hyperperiods)
    throw ConfigError("horizon_hyperperiods", "must exceed warmup_hyperperiods (" + std::to_string(w.horizon_hyperperiods) +
                                                  " <= " + std::to_string(w.warmup_hyperperiods) + ")");
}

// ---------------------------------------------------------------------------
// JSON documents

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

inline std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

inline TimeSpan read_duration(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a duration string such as \"20ms\"");
  try {
    return parse_duration(v.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

/// Integer, decimal or "a/b" string. Decimals go through their shortest
/// round-trip spelling so 0.2 reads as exactly 1/5.
inline Rational read_rational(const json& v, const std::string& path) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
      const std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
      if (text.find_first_of("eE") != std::string_view::npos) throw Error("exponent notation not supported");
      return Rational::parse(text);
    }
    if (v.is_string()) return Rational::parse(v.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a number");
}

inline std::int64_t read_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline json rational_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.to_fraction_string();
}

}  // namespace detail

inline StrategyConfig strategy_from_json(const nlohmann::json& s, const std::string& path = "strategy") {
  using namespace detail;
  if (!s.is_object()) throw ConfigError(path, "expected an object");
  reject_unknown_keys(s, {"mode", "reload_overhead", "overlay_scale", "wide_spectrum"}, path);
  const std::string mode = read_string(require(s, "mode", path), path + ".mode");
  StrategyConfig out;
  if (mode == "overlay") {
    out.mode = StrategyMode::Overlay;
    if (s.contains("reload_overhead"))
      throw ConfigError(path + ".reload_overhead", "only valid with mode \"customized\"");
    if (s.contains("overlay_scale")) out.overlay_scale = read_rational(s["overlay_scale"], path + ".overlay_scale");
    if (s.contains("wide_spectrum")) {
      if (!s["wide_spectrum"].is_boolean()) throw ConfigError(path + ".wide_spectrum", "expected a boolean");
      out.wide_spectrum = s["wide_spectrum"].get<bool>();
    }
  } else if (mode == "customized") {
    out.mode = StrategyMode::Customized;
    if (s.contains("overlay_scale") || s.contains("wide_spectrum"))
      throw ConfigError(path, "overlay_scale/wide_spectrum only valid with mode \"overlay\"");
    out.reload_overhead = s.contains("reload_overhead") ? read_duration(s["reload_overhead"], path + ".reload_overhead")
                                                        : milliseconds(20);
  } else {
    throw ConfigError(path + ".mode", "unknown strategy mode '" + mode + "' (expected overlay or customized)");
  }
  validate_strategy(out, path);
  return out;
}

inline nlohmann::json strategy_to_json(const StrategyConfig& s) {
  nlohmann::json out;
  if (s.mode == StrategyMode::Customized) {
    out["mode"] = "customized";
    out["reload_overhead"] = format_duration(s.reload_overhead);
  } else {
    out["mode"] = "overlay";
    out["overlay_scale"] = detail::rational_json(s.overlay_scale);
    out["wide_spectrum"] = s.wide_spectrum;
  }
  return out;
}

/// Parses and validates a workload document.
inline WorkloadConfig load_workload(std::string_view text) {
  using namespace detail;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed workload document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "workload document must be a JSON object");
  reject_unknown_keys(doc, {"name", "tasks", "strategy", "horizon_hyperperiods", "warmup_hyperperiods"}, "");

  WorkloadConfig w;
  w.name = read_string(require(doc, "name", ""), "name");
  const json& tasks = require(doc, "tasks", "");
  if (!tasks.is_array()) throw ConfigError("tasks", "expected an array");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string path = "tasks[" + std::to_string(i) + "]";
    const json& t = tasks[i];
    if (!t.is_object()) throw ConfigError(path, "expected an object");
    reject_unknown_keys(t, {"name", "model_id", "frequency_hz", "overlay_exec", "customized_exec"}, path);
    TaskSpec spec;
    spec.name = read_string(require(t, "name", path), path + ".name");
    spec.model_id = read_string(require(t, "model_id", path), path + ".model_id");
    spec.frequency = read_rational(require(t, "frequency_hz", path), path + ".frequency_hz");
    spec.overlay_exec = read_duration(require(t, "overlay_exec", path), path + ".overlay_exec");
    spec.customized_exec = read_duration(require(t, "customized_exec", path), path + ".customized_exec");
    w.tasks.push_back(std::move(spec));
  }
  w.strategy = strategy_from_json(require(doc, "strategy", ""));
  if (doc.contains("horizon_hyperperiods")) w.horizon_hyperperiods = read_int(doc["horizon_hyperperiods"], "horizon_hyperperiods");
  if (doc.contains("warmup_hyperperiods")) w.warmup_hyperperiods = read_int(doc["warmup_hyperperiods"], "warmup_hyperperiods");
  validate_workload(w);
  return w;
}

inline std::string serialize_workload(const WorkloadConfig& w) {
  nlohmann::json doc;
  doc["name"] = w.name;
  doc["tasks"] = nlohmann::json::array();
  for (const TaskSpec& t : w.tasks) {
    doc["tasks"].push_back({{"name", t.name},
                            {"model_id", t.model_id},
                            {"frequency_hz", detail::rational_json(t.frequency)},
                            {"overlay_exec", format_duration(t.overlay_exec)},
                            {"customized_exec", format_duration(t.customized_exec)}});
  }
  doc["strategy"] = strategy_to_json(w.strategy);
  doc["horizon_hyperperiods"] = w.horizon_hyperperiods;
  doc["warmup_hyperperiods"] = w.warmup_hyperperiods;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Latency tables

struct ModelLatency {
  TimeSpan overlay_exec;
  TimeSpan customized_exec;

  friend bool operator==(const ModelLatency&, const ModelLatency&) = default;
};

/// Per-model latencies keyed by model_id.
using LatencyTable = std::map<std::string, ModelLatency>;

/// Reads {"latencies": {model_id: {overlay_exec, customized_exec}}, ...}.
/// Other top-level keys (calibration residuals) are ignored.
inline LatencyTable load_latency_table(std::string_view text) {
  using namespace detail;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed latency table: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "latency table must be a JSON object");
  const json& lat = require(doc, "latencies", "");
  if (!lat.is_object()) throw ConfigError("latencies", "expected an object keyed by model_id");
  LatencyTable table;
  for (auto it = lat.begin(); it != lat.end(); ++it) {
    const std::string path = "latencies." + it.key();
    if (!it->is_object()) throw ConfigError(path, "expected an object");
    reject_unknown_keys(*it, {"overlay_exec", "customized_exec"}, path);
    ModelLatency m{read_duration(require(*it, "overlay_exec", path), path + ".overlay_exec"),
                   read_duration(require(*it, "customized_exec", path), path + ".customized_exec")};
    if (!m.overlay_exec.is_positive()) throw ConfigError(path + ".overlay_exec", "execution time must be positive");
    if (!m.customized_exec.is_positive()) throw ConfigError(path + ".customized_exec", "execution time must be positive");
    table.emplace(it.key(), m);
  }
  return table;
}

inline nlohmann::json latency_table_json(const LatencyTable& table) {
  nlohmann::json lat = nlohmann::json::object();
  for (const auto& [model, m] : table)
    lat[model] = {{"overlay_exec", format_duration(m.overlay_exec)}, {"customized_exec", format_duration(m.customized_exec)}};
  return lat;
}

// ---------------------------------------------------------------------------
// The four reference setups

enum class SetupId { A, B, C, D };

inline constexpr SetupId kAllSetups[] = {SetupId::A, SetupId::B, SetupId::C, SetupId::D};

inline char setup_letter(SetupId id) { return static_cast<char>('A' + static_cast<int>(id)); }

inline SetupId parse_setup(std::string_view s) {
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'D') return static_cast<SetupId>(s[0] - 'A');
  if (s.size() == 1 && s[0] >= 'a' && s[0] <= 'd') return static_cast<SetupId>(s[0] - 'a');
  throw Error("unknown setup '" + std::string(s) + "' (expected A, B, C or D)");
}

/// Task slot shared by every setup: segmentation at 20 Hz, classification at
/// 15 Hz, point-cloud classification at 10 Hz.
struct SetupSlot {
  const char* task_name;
  const char* model_id;
  std::int64_t frequency_hz;
};

/// Task/model/frequency assignment of a reference setup.
inline std::vector<SetupSlot> setup_slots(SetupId id) {
  switch (id) {
    case SetupId::A:
      return {{"segmentation", "DeiT-L", 20}, {"classification", "MLP-Mixer-L", 15}, {"pointcloud", "PointNet-L", 10}};
    case SetupId::B:
      return {{"segmentation", "DeiT-S", 20}, {"classification", "MLP-Mixer-L", 15}, {"pointcloud", "PointNet-L", 10}};
    case SetupId::C:
      return {{"segmentation", "DeiT-S", 20}, {"classification", "MLP-Mixer-L", 15}, {"pointcloud", "PointNet-S", 10}};
    case SetupId::D:
      return {{"segmentation", "DeiT-S", 20}, {"classification", "MLP-Mixer-S", 15}, {"pointcloud", "PointNet-S", 10}};
  }
  throw Error("unknown setup");
}

/// Builds a reference setup using latencies from `table`.
inline WorkloadConfig builtin_setup(SetupId id, const StrategyConfig& strategy, const LatencyTable& table) {
  WorkloadConfig w;
  w.name = std::string("setup-") + setup_letter(id);
  w.strategy = strategy;
  for (const SetupSlot& slot : setup_slots(id)) {
    auto it = table.find(slot.model_id);
    if (it == table.end()) throw ConfigError("latencies", std::string("latency table has no entry for ") + slot.model_id);
    w.tasks.push_back({slot.task_name, slot.model_id, Rational(slot.frequency_hz), it->second.overlay_exec,
                       it->second.customized_exec});
  }
  validate_workload(w);
  return w;
}

}  // namespace ovsim

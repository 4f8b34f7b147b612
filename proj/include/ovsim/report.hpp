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
 * @file report.hpp
 * @brief CSV event logs, SVG timelines and markdown tables.
 *
 * Every function here is a pure function of its inputs; output is
 * byte-identical across runs.
 *
 * Trace CSV:
 * ```
 * kind,start_s,end_s,task,instance,model
 * reload,0,0.02,,,DeiT-L
 * execute,0.02,0.03,0,0,DeiT-L
 * ```
 * Idle gaps are omitted. Times are exact: decimal when the value has a finite
 * decimal expansion, "a/b" otherwise (1/15 s stays 1/15).
 */

#pragma once

#include "ovsim/error.hpp"
#include "ovsim/metrics.hpp"
#include "ovsim/sweep.hpp"
#include "ovsim/timebase.hpp"
#include "ovsim/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ovsim {

inline constexpr std::string_view kTraceCsvHeader = "kind,start_s,end_s,task,instance,model";

inline std::string trace_csv(const Trace& trace) {
  std::string out(kTraceCsvHeader);
  out += '\n';
  for (const TraceSegment& s : trace.segments) {
    if (s.kind == SegmentKind::Idle) continue;
    out += to_string(s.kind);
    out += ',' + s.start.to_string() + ',' + s.end.to_string() + ',';
    if (s.job) out += std::to_string(s.job->task_index) + ',' + std::to_string(s.job->instance);
    else out += ',';
    out += ',' + s.model_id + '\n';
  }
  return out;
}

/// Inverse of trace_csv for its non-Idle segments.
inline std::vector<TraceSegment> parse_trace_csv(std::string_view text) {
  std::vector<TraceSegment> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kTraceCsvHeader) throw Error("trace csv: unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    for (std::size_t pos = 0;;) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    const std::string where = "trace csv line " + std::to_string(line_no);
    if (f.size() != 6) throw Error(where + ": expected 6 fields, got " + std::to_string(f.size()));
    TraceSegment s;
    if (f[0] == "execute") s.kind = SegmentKind::Execute;
    else if (f[0] == "reload") s.kind = SegmentKind::Reload;
    else throw Error(where + ": unknown segment kind '" + std::string(f[0]) + "'");
    try {
      s.start = Rational::parse(f[1]);
      s.end = Rational::parse(f[2]);
      if (s.kind == SegmentKind::Execute) {
        s.job = JobRef{static_cast<std::size_t>(Rational::parse(f[3]).num()), Rational::parse(f[4]).num()};
      } else if (!f[3].empty() || !f[4].empty()) {
        throw Error("reload rows carry no job");
      }
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    s.model_id = std::string(f[5]);
    out.push_back(std::move(s));
  }
  if (!header_seen) throw Error("trace csv: missing header");
  return out;
}

// ---------------------------------------------------------------------------
// Gantt chart

struct GanttStyle {
  /// Drawn time range; defaults to the whole trace.
  std::optional<Window> window;
  double px_per_ms = 4.0;
  double row_height = 28.0;
  double label_width = 120.0;
  std::vector<std::string> palette = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1"};
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

/// One row per task. Execute bars are filled per task; a reload is a hatched
/// bar on the row of the model it loads. Releases are downward arrows above a
/// row, deadlines upward arrows below it. Shapes are exactly the <rect> and
/// <path> elements outside <defs>: one per non-Idle segment plus one per marker.
inline std::string gantt_svg(const Trace& trace, const GanttStyle& style = {}) {
  using detail::fixed;
  const Window win = style.window.value_or(Window{TimeStamp{}, std::max(trace.end(), trace.horizon)});
  const double span_ms = std::max(0.0, (win.end - win.start).to_double() * 1000.0);
  const double plot_w = span_ms * style.px_per_ms;
  const double top = 20.0;
  const std::size_t rows = trace.task_names.size();
  const double width = style.label_width + plot_w + 20.0;
  const double height = top + static_cast<double>(rows) * style.row_height + 40.0;
  auto x_of = [&](const TimeStamp& t) { return style.label_width + (t - win.start).to_double() * 1000.0 * style.px_per_ms; };
  auto row_of_model = [&](const std::string& model) -> std::size_t {
    for (std::size_t i = 0; i < trace.model_ids.size(); ++i)
      if (trace.model_ids[i] == model) return i;
    return 0;
  };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fixed(width) << "\" height=\""
    << fixed(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<defs><pattern id=\"reload-hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" "
       "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#333\" stroke-width=\"2\"/>"
       "</pattern></defs>\n";

  for (std::size_t i = 0; i < rows; ++i) {
    const double y = top + static_cast<double>(i) * style.row_height;
    o << "<text x=\"4\" y=\"" << fixed(y + style.row_height * 0.6) << "\">" << detail::xml_escape(trace.task_names[i])
      << " (" << detail::xml_escape(trace.model_ids[i]) << ")</text>\n";
  }

  for (const TraceSegment& s : trace.segments) {
    if (s.kind == SegmentKind::Idle) continue;
    if (s.end <= win.start || s.start >= win.end) continue;
    const TimeStamp a = std::max(s.start, win.start);
    const TimeStamp b = std::min(s.end, win.end);
    const std::size_t row = s.job ? s.job->task_index : row_of_model(s.model_id);
    const double y = top + static_cast<double>(row) * style.row_height + 6.0;
    const double h = style.row_height - 12.0;
    o << "<rect x=\"" << fixed(x_of(a)) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(x_of(b) - x_of(a))
      << "\" height=\"" << fixed(h) << "\"";
    if (s.kind == SegmentKind::Reload) {
      o << " class=\"reload\" fill=\"url(#reload-hatch)\" stroke=\"#333\"><title>reload " << detail::xml_escape(s.model_id);
    } else {
      o << " class=\"exec\" fill=\"" << style.palette[row % style.palette.size()] << "\" stroke=\"#222\"><title>"
        << detail::xml_escape(trace.task_names[row]) << " #" << s.job->instance;
    }
    o << " [" << s.start.to_string() << ", " << s.end.to_string() << ") s</title></rect>\n";
  }

  for (std::size_t i = 0; i < trace.jobs.size(); ++i) {
    const double y = top + static_cast<double>(i) * style.row_height;
    for (const JobRecord& r : trace.jobs[i]) {
      if (r.job.release >= win.start && r.job.release <= win.end) {
        const double x = x_of(r.job.release);
        o << "<path class=\"release\" d=\"M" << fixed(x) << ' ' << fixed(y) << " v6 l-3 -3 m3 3 l3 -3\" stroke=\"#000\" "
             "fill=\"none\"/>\n";
      }
      if (r.job.deadline >= win.start && r.job.deadline <= win.end) {
        const double x = x_of(r.job.deadline);
        const double yb = y + style.row_height;
        o << "<path class=\"deadline\" d=\"M" << fixed(x) << ' ' << fixed(yb) << " v-6 l-3 3 m3 -3 l3 3\" stroke=\"#c00\" "
             "fill=\"none\"/>\n";
      }
    }
  }

  const double axis_y = top + static_cast<double>(rows) * style.row_height + 8.0;
  o << "<line class=\"axis\" x1=\"" << fixed(style.label_width) << "\" y1=\"" << fixed(axis_y) << "\" x2=\""
    << fixed(style.label_width + plot_w) << "\" y2=\"" << fixed(axis_y) << "\" stroke=\"#000\"/>\n";
  const double tick_ms = span_ms <= 250 ? 25 : span_ms <= 1000 ? 100 : 500;
  const double w0_ms = win.start.to_double() * 1000.0;
  for (double t = 0; t <= span_ms + 1e-9; t += tick_ms) {
    o << "<text x=\"" << fixed(style.label_width + t * style.px_per_ms) << "\" y=\"" << fixed(axis_y + 14)
      << "\" text-anchor=\"middle\">" << fixed(w0_ms + t, 0) << "</text>\n";
  }
  o << "<text x=\"" << fixed(style.label_width + plot_w) << "\" y=\"" << fixed(axis_y + 28)
    << "\" text-anchor=\"end\">time (ms)</text>\n";
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Tables

inline std::string format_ratio(const Rational& r) { return detail::fixed(r.to_double(), 3); }

struct SummaryEntry {
  std::string setup;
  std::string strategy;
  const SimResult* result = nullptr;
};

/// Rows are setups, columns strategies, both in first-appearance order.
/// Cells hold the busy ratio or Fail.
inline std::string summary_md(const std::vector<SummaryEntry>& entries) {
  if (entries.empty()) throw Error("summary_md: no results");
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const SummaryEntry& e : entries) {
    add_unique(rows, e.setup);
    add_unique(cols, e.strategy);
  }
  std::string out = "| setup |";
  for (const auto& c : cols) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out += "---|";
  out += '\n';
  for (const auto& r : rows) {
    out += "| " + r + " |";
    for (const auto& c : cols) {
      std::string cell = "-";
      for (const SummaryEntry& e : entries) {
        if (e.setup == r && e.strategy == c) cell = e.result->sustainable() ? format_ratio(e.result->busy_ratio) : "Fail";
      }
      out += " " + cell + " |";
    }
    out += '\n';
  }
  return out;
}

inline std::string format_normalized(const Normalized& n) { return n.fail() ? "Fail" : format_ratio(*n.ratio); }

/// Normalized values, one row per report and one column per grid point.
inline std::string sweep_md(const std::vector<SweepReport>& reports) {
  if (reports.empty()) throw Error("sweep_md: no reports");
  std::string out = "| workload |";
  for (const SweepPoint& p : reports.front().points) out += " " + p.label + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < reports.front().points.size(); ++i) out += "---|";
  out += '\n';
  for (const SweepReport& r : reports) {
    out += "| " + r.workload + " |";
    for (const SweepPoint& p : reports.front().points) {
      auto it = r.normalized.find(p.label);
      out += " " + (it == r.normalized.end() ? std::string("-") : format_normalized(it->second)) + " |";
    }
    out += '\n';
  }
  out += "\nNormalized to `" + reports.front().baseline_key + "`. Fail = backlog grows without bound.\n";
  return out;
}

inline std::string sweep_csv(const std::vector<SweepReport>& reports) {
  std::string out = "workload,point,busy_ratio,exec_ratio,reload_ratio,verdict,normalized\n";
  for (const SweepReport& r : reports) {
    for (const SweepPoint& p : r.points) {
      out += r.workload + ',' + p.label + ',' + detail::fixed(p.result.busy_ratio.to_double(), 6) + ',' +
             detail::fixed(p.result.exec_ratio.to_double(), 6) + ',' + detail::fixed(p.result.reload_ratio.to_double(), 6) +
             ',' + to_string(p.result.verdict) + ',';
      const Normalized& n = r.normalized.at(p.label);
      out += (n.fail() ? std::string("Fail") : detail::fixed(n.ratio->to_double(), 6)) + '\n';
    }
  }
  return out;
}

/// Human summary of one run.
inline std::string describe(const SimResult& r) {
  std::ostringstream o;
  o << "verdict: " << to_string(r.verdict) << (r.sustainable() ? "" : " (Fail)") << '\n';
  o << "busy_ratio: " << format_ratio(r.busy_ratio) << " (exec " << format_ratio(r.exec_ratio) << ", reload "
    << format_ratio(r.reload_ratio) << ")\n";
  o << "window: [" << r.window.start.to_string() << ", " << r.window.end.to_string() << "] s\n";
  for (std::size_t i = 0; i < r.per_task.size(); ++i) {
    const TaskStats& t = r.per_task[i];
    o << "task " << r.trace.task_names[i] << ": completed " << t.completed << ", misses " << t.miss_count;
    if (t.max_response) {
      o << ", max response " << detail::fixed(t.max_response->to_double() * 1000.0, 3) << " ms, mean "
        << detail::fixed(*t.mean_response_s * 1000.0, 3) << " ms, trend " << detail::fixed(*t.trend_slope_s * 1000.0, 4)
        << " ms/instance";
    } else {
      o << ", no completed instance";
    }
    o << '\n';
  }
  return o.str();
}

}  // namespace ovsim

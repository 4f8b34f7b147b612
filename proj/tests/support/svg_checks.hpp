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

#include "ovsim/metrics.hpp"
#include "ovsim/trace.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstddef>
#include <sstream>
#include <string>

namespace ovsim::testing {

struct SvgShapes {
  std::size_t rects = 0;
  std::size_t hatched = 0;  // rects filled with the reload pattern
  std::size_t paths = 0;
};

/// Parses `svg` as XML (throws on malformed input) and counts the drawn
/// shapes directly under the root, i.e. outside <defs>.
inline SvgShapes count_svg_shapes(const std::string& svg) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  std::istringstream in(svg);
  pt::read_xml(in, doc);
  SvgShapes out;
  for (const auto& [name, child] : doc.get_child("svg")) {
    if (name == "rect") {
      ++out.rects;
      if (child.get<std::string>("<xmlattr>.fill", "") == "url(#reload-hatch)") ++out.hatched;
    } else if (name == "path") {
      ++out.paths;
    }
  }
  return out;
}

/// Non-Idle segments and release/deadline markers that fall in [from, to].
inline std::size_t expected_shapes(const Trace& tr, const Window& w) {
  std::size_t n = 0;
  for (const TraceSegment& s : tr.segments)
    if (s.kind != SegmentKind::Idle && s.end > w.start && s.start < w.end) ++n;
  for (const auto& task : tr.jobs)
    for (const JobRecord& r : task) {
      n += r.job.release >= w.start && r.job.release <= w.end;
      n += r.job.deadline >= w.start && r.job.deadline <= w.end;
    }
  return n;
}

}  // namespace ovsim::testing

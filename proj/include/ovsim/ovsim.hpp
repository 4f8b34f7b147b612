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

#include "ovsim/analysis.hpp"
#include "ovsim/calibrate.hpp"
#include "ovsim/engine.hpp"
#include "ovsim/error.hpp"
#include "ovsim/metrics.hpp"
#include "ovsim/report.hpp"
#include "ovsim/shipped_table.hpp"
#include "ovsim/sweep.hpp"
#include "ovsim/timebase.hpp"
#include "ovsim/trace.hpp"
#include "ovsim/workload.hpp"

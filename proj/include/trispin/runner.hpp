// Copyright 2026 The trispin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "trispin/config.hpp"

namespace trispin {

enum class Subcommand { kSpectrum, kTrajectories, kDark, kFt, kCompare };

std::string_view to_string(Subcommand c);
Subcommand parse_subcommand(std::string_view text);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one analysis and writes its tables under cfg.output_dir:
///   spectrum      spectrum.csv, kinks.csv
///   trajectories  activities.csv, histogram.csv, events_sample.csv,
///                 blinking.csv
///   dark          dark.csv
///   ft            ft.csv
///   compare       compare.csv
/// Every file starts with a '#' provenance block. Failures are reported as
/// a JSON record on `err` and in error.json; the return value is the exit
/// code (0 ok, 2 validation, 3 numerical check).
int run(Subcommand cmd, const RunConfig& cfg, std::ostream& err);

}  // namespace trispin

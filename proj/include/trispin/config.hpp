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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trispin/model.hpp"

namespace trispin {

enum class Profile { kFast, kPaper };

std::string_view to_string(Profile p);
Profile parse_profile(std::string_view text);

struct ScanConfig {
  double s_min = -1.0;
  double s_max = 1.0;
  int n_points = 51;
  std::vector<double> nbar_sweep = {0.0, 1.0, 2.0, 5.0};
};

struct EnsembleConfig {
  // Unset values fall back to the profile: fast 400 x 1e3, paper 2000 x 1e4.
  std::optional<std::size_t> n_trajectories;
  std::optional<std::size_t> n_jumps;
  std::optional<double> t_max;
  std::uint64_t master_seed = 0;
  double burn_in_fraction = 0.1;
  // Convert n_jumps into a fixed horizon n_jumps / stationary jump rate.
  bool fixed_horizon = true;
  int bins = 0;  // 0: Freedman-Diaconis
  double ft_window = 40.0;
  int ft_k_max = 6;
  std::size_t sample_logs = 3;
};

struct RunConfig {
  ModelParams model;
  ScanConfig scan;
  EnsembleConfig ensemble;
  std::filesystem::path output_dir = "out";
  Profile profile = Profile::kFast;
  int threads = 0;  // execution detail, not part of the config hash

  std::size_t trajectories() const;
  std::size_t jumps() const;
  /// 1 for the paper profile, 2 for fast.
  double tolerance_scale() const;
  /// Deterministic text form of everything that affects results.
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
};

/// Reads an INI document with sections [model], [scan], [ensemble],
/// [output]. Unknown sections or keys, unparsable values and out-of-range
/// values throw ValidationError naming the key. model.alpha, model.b_field,
/// model.gamma_coll and ensemble.master_seed are required.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view text);

}  // namespace trispin

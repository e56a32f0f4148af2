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

#include <string>
#include <string_view>
#include <vector>

namespace trispin {

/// Normalization of the single-site spin-flip operators.
///   kHalved:   sigma_pm = (sigma_x +- i sigma_y) / 2   (|up><down| etc.)
///   kUnhalved: sigma_pm =  sigma_x +- i sigma_y        (twice the above)
enum class Convention { kHalved, kUnhalved };

std::string_view to_string(Convention c);
Convention parse_convention(std::string_view text);

/// Physical parameters of the three-spin model. All quantities are
/// dimensionless (energies and rates in the same unit, hbar = 1).
struct ModelParams {
  double alpha = 10.0;        // transverse field
  double b_field = 0.5;       // longitudinal field B
  double gamma_coll = 0.05;   // collective rate Gamma
  double gamma_single = 0.0;  // single-spin rate gamma
  double nbar = 0.0;          // bath occupation
  Convention convention = Convention::kHalved;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Parameter set used throughout the figures: alpha=10, B=0.5, Gamma=0.05.
ModelParams paper_params(double nbar = 0.0, double gamma_single = 0.0);

/// Throws ValidationError naming the offending field. Returns non-fatal
/// warnings (B not small compared to alpha).
std::vector<std::string> validate(const ModelParams& p);

}  // namespace trispin

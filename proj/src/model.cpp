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

#include "trispin/model.hpp"

#include <cmath>

#include "trispin/errors.hpp"

namespace trispin {

std::string_view to_string(Convention c) {
  return c == Convention::kHalved ? "halved" : "unhalved";
}

Convention parse_convention(std::string_view text) {
  if (text == "halved") return Convention::kHalved;
  if (text == "unhalved") return Convention::kUnhalved;
  throw ValidationError("convention: expected 'halved' or 'unhalved', got '" +
                        std::string(text) + "'");
}

ModelParams paper_params(double nbar, double gamma_single) {
  ModelParams p;
  p.nbar = nbar;
  p.gamma_single = gamma_single;
  return p;
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ValidationError(std::string(field) + ": " + what);
}

}  // namespace

std::vector<std::string> validate(const ModelParams& p) {
  require(std::isfinite(p.alpha) && p.alpha > 0.0, "alpha", "must be > 0");
  require(std::isfinite(p.b_field), "b_field", "must be finite");
  require(std::isfinite(p.gamma_coll) && p.gamma_coll >= 0.0, "gamma_coll",
          "must be >= 0");
  require(std::isfinite(p.gamma_single) && p.gamma_single >= 0.0,
          "gamma_single", "must be >= 0");
  require(std::isfinite(p.nbar) && p.nbar >= 0.0, "nbar", "must be >= 0");

  std::vector<std::string> warnings;
  if (std::abs(p.b_field) >= p.alpha / 2.0) {
    warnings.emplace_back(
        "b_field: |B| >= alpha/2, outside the weak longitudinal field regime");
  }
  return warnings;
}

}  // namespace trispin

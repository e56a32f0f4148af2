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

// trispin: large-deviation and quantum-jump analysis of the three-spin
// collective dissipation model.
//
//   trispin <spectrum|trajectories|dark|ft|compare> --config run.ini
//           [--out DIR] [--profile fast|paper] [--seed N] [--threads N]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "trispin/config.hpp"
#include "trispin/errors.hpp"
#include "trispin/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Three-spin collective dissipation: spectra, trajectories, symmetries"};
  app.set_version_flag("--version", std::string(TRISPIN_VERSION));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  int threads = 0;

  const std::pair<trispin::Subcommand, const char*> kCommands[] = {
      {trispin::Subcommand::kSpectrum, "theta(s), k(s) scan and kink report"},
      {trispin::Subcommand::kTrajectories, "quantum-jump ensemble: activities, histogram, logs"},
      {trispin::Subcommand::kDark, "dark subspace basis, energies and checks"},
      {trispin::Subcommand::kFt, "windowed fluctuation-theorem test"},
      {trispin::Subcommand::kCompare, "spectral k(0) vs ensemble mean over nbar"},
  };
  for (const auto& [cmd, help] : kCommands) {
    auto* sub = app.add_subcommand(std::string(trispin::to_string(cmd)), help);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--profile", profile, "fast or paper")
        ->check(CLI::IsMember({"fast", "paper"}));
    sub->add_option("--seed", seed, "master seed (overrides [ensemble] master_seed)");
    sub->add_option("--threads", threads, "worker threads, 0 = all")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : trispin::kExitValidation;
  }

  const auto cmd = trispin::parse_subcommand(app.get_subcommands().front()->get_name());
  trispin::RunConfig cfg;
  try {
    cfg = trispin::load_config(config_path);
  } catch (const trispin::ValidationError& e) {
    const nlohmann::json rec = {{"status", "error"},
                                {"subcommand", trispin::to_string(cmd)},
                                {"kind", "validation"},
                                {"exit_code", trispin::kExitValidation},
                                {"message", e.what()}};
    std::cerr << rec.dump() << "\n";
    return trispin::kExitValidation;
  }
  if (out_dir) cfg.output_dir = *out_dir;
  if (profile) cfg.profile = trispin::parse_profile(*profile);
  if (seed) cfg.ensemble.master_seed = *seed;
  cfg.threads = threads;
  return trispin::run(cmd, cfg, std::cerr);
}

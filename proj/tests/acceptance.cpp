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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "trispin/config.hpp"
#include "trispin/runner.hpp"
#include "trispin/spectral.hpp"
#include "trispin/trajectories.hpp"

using namespace trispin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  fmt::print("{} [{:2}] {} | {} | {:.2f} s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail,
             secs);
  std::fflush(stdout);
}

constexpr double kDamping = 0.01;  // gamma / Gamma
constexpr std::uint64_t kSeed = 20140601;
constexpr std::size_t kTrajectories = 400;
constexpr std::size_t kJumps = 1000;

ModelParams damped(double nbar) { return paper_params(nbar, kDamping * 0.05); }

std::vector<TrajectorySummary> fast_ensemble(const ModelParams& p, std::uint64_t seed) {
  EnsembleSpec spec;
  spec.n_trajectories = kTrajectories;
  spec.master_seed = seed;
  spec.stop = MaxTime{horizon_for_jumps(p, kJumps)};
  return run_ensemble(p, spec);
}

std::vector<double> activities(const std::vector<TrajectorySummary>& runs, bool active_only) {
  std::vector<double> out;
  for (const auto& r : runs) {
    if (!active_only || !r.dark_trapped) out.push_back(r.net_activity);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared between criteria 7 and 8.
std::vector<TrajectorySummary> undamped_cold;

}  // namespace

int main() {
  fmt::print("trispin {} acceptance, ladder convention: {}\n", TRISPIN_VERSION,
             to_string(paper_params().convention));

  criterion(1, "theta(0) = 0 for gamma in {0, 0.01 Gamma} x nbar in {0,1,2,5}", [] {
    double worst = 0.0;
    for (double g : {0.0, kDamping * 0.05}) {
      for (double nbar : {0.0, 1.0, 2.0, 5.0}) {
        worst = std::max(worst, std::abs(dynamical_free_energy(paper_params(nbar, g), 0.0)));
      }
    }
    return Outcome{worst < 1e-9, fmt::format("max |theta(0)| = {:.3g}", worst)};
  });

  criterion(2, "gamma=0, nbar=0: theta = 0 on s >= 0 and k(0-) > 0", [] {
    const auto p = paper_params();
    double worst = 0.0;
    for (double s : linear_grid(0.0, 1.0, 50)) {
      worst = std::max(worst, std::abs(dynamical_free_energy(p, s)));
    }
    const double k = activity_hf(p, -1e-6);
    return Outcome{worst < 1e-10 && k > 0.0,
                   fmt::format("max |theta(s>=0)| = {:.3g}, k(-1e-6) = {:.10g}", worst, k)};
  });

  std::vector<std::vector<double>> gc_grids;
  for (double nbar : {1.0, 2.0, 5.0}) {
    const double s0 = gc_symmetry_point(nbar);
    gc_grids.push_back(linear_grid(-s0, 2.0 * s0, 31));
  }

  criterion(3, "Gallavotti-Cohen symmetry and kink at s0 for nbar in {1,2,5}", [&] {
    bool ok = true;
    std::string detail;
    const double nbars[] = {1.0, 2.0, 5.0};
    for (int i = 0; i < 3; ++i) {
      const auto p = paper_params(nbars[i]);
      const double s0 = gc_symmetry_point(nbars[i]);
      const auto& grid = gc_grids[i];
      const double res = gc_residual(p, grid);
      const auto scan = theta_scan(p, grid);
      const double spacing = grid[1] - grid[0];
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& k : scan.kinks) nearest = std::min(nearest, std::abs(k.s_star - s0));
      ok = ok && res < 1e-8 && nearest < spacing;
      detail += fmt::format("{}nbar={}: residual {:.2g}, |s*-s0| {:.2g}", i ? "; " : "",
                            nbars[i], res, nearest);
    }
    return Outcome{ok, detail};
  });

  criterion(4, "gamma=0.01 Gamma removes all kinks on the same grids", [&] {
    std::size_t total = 0;
    const double nbars[] = {1.0, 2.0, 5.0};
    for (int i = 0; i < 3; ++i) total += theta_scan(damped(nbars[i]), gc_grids[i]).kinks.size();
    total += theta_scan(damped(0.0), linear_grid(-1.0, 1.0, 50)).kinks.size();
    return Outcome{total == 0, fmt::format("kinks found: {}", total)};
  });

  criterion(5, "finite-difference vs Hellmann-Feynman activity at 20 points", [] {
    double worst = 0.0;
    int points = 0;
    const ModelParams sets[] = {paper_params(0.0), paper_params(2.0), damped(0.0), damped(5.0)};
    const double ss[] = {-0.8, -0.4, -0.2, -0.1, -0.03};
    for (const auto& p : sets) {
      for (double s : ss) {
        const double hf = activity_hf(p, s);
        const double fd = activity_fd(p, s);
        worst = std::max(worst, std::abs(fd - hf) / std::abs(hf));
        ++points;
      }
    }
    return Outcome{worst < 1e-6 && points == 20,
                   fmt::format("{} points, max relative difference {:.3g}", points, worst)};
  });

  criterion(6, "ensemble mean vs spectral k(0), gamma=0.01 Gamma, 400 x 1e3", [] {
    bool ok = true;
    std::string detail;
    for (double nbar : {0.0, 1.0, 2.0, 5.0}) {
      const auto p = damped(nbar);
      const auto st = ensemble_stats(activities(fast_ensemble(p, kSeed + 1), false));
      const double k0 = activity_hf(p, 0.0);
      const double z = (st.mean - k0) / st.std_error;
      ok = ok && std::abs(z) < 3.0;
      detail += fmt::format("{}nbar={}: k0 {:.5g}, mean {:.5g} +- {:.2g} (z {:+.2f})",
                            nbar > 0 ? "; " : "", nbar, k0, st.mean, st.std_error, z);
    }
    return Outcome{ok, detail};
  });

  criterion(7, "bimodal activities with a zero mode, zero fraction vs d/8", [] {
    const auto p = paper_params();
    undamped_cold = fast_ensemble(p, kSeed + 2);
    const auto st = ensemble_stats(activities(undamped_cold, false));
    const int d = dark_subspace(p).dimension;
    const double expect = double(d) / 8.0;
    const double sigma = std::sqrt(expect * (1.0 - expect) / double(kTrajectories));
    bool zero_mode = false;
    for (int b : st.mode_bins) {
      zero_mode = zero_mode || (st.histogram.edges[b] <= 0.0 && 0.0 < st.histogram.edges[b + 1]);
    }
    const bool within = std::abs(st.zero_fraction - expect) < 3.0 * sigma;
    const bool paper = std::abs(expect - 0.25) < 1e-12;
    return Outcome{st.bimodal && zero_mode && within && paper,
                   fmt::format("bimodality {:.3f}, zero mode {}, zero_fraction {:.4f} vs d/8 = "
                               "{}/8 = {:.3f} +- {:.3f} (3 sigma), paper 25%",
                               st.bimodality, zero_mode, st.zero_fraction, d, expect,
                               3.0 * sigma)};
  });

  criterion(8, "damped mean activity is 0.70-0.80 of the undamped active mean", [] {
    if (undamped_cold.empty()) undamped_cold = fast_ensemble(paper_params(), kSeed + 2);
    const auto active = ensemble_stats(activities(undamped_cold, true));
    const auto dmp = ensemble_stats(activities(fast_ensemble(damped(0.0), kSeed + 3), false));
    const double r = dmp.mean / active.mean;
    const double sr = r * std::hypot(dmp.std_error / dmp.mean, active.std_error / active.mean);
    const bool ok = r > 0.70 - 3.0 * sr && r < 0.80 + 3.0 * sr;
    const double spectral = activity_hf(damped(0.0), 0.0) / activity_hf(paper_params(), -1e-6);
    return Outcome{ok, fmt::format("ratio {:.4f} +- {:.4f} (spectral {:.4f})", r, sr, spectral)};
  });

  criterion(9, "fluctuation theorem slope at nbar=5; no negative windows at nbar=0", [] {
    auto counts_for = [](const ModelParams& p, std::uint64_t seed) {
      EnsembleSpec spec;
      spec.n_trajectories = kTrajectories;
      spec.master_seed = seed;
      spec.stop = MaxTime{horizon_for_jumps(p, kJumps)};
      std::vector<std::vector<long>> per(kTrajectories);
      for_each_trajectory(p, spec, [&](std::size_t i, const JumpRecord& r) {
        per[i] = window_net_counts(r, 40.0, spec.burn_in_fraction * r.total_time);
      });
      std::vector<long> all;
      for (const auto& v : per) all.insert(all.end(), v.begin(), v.end());
      return all;
    };
    const auto hot = empirical_ft(counts_for(paper_params(5.0), kSeed + 4), 6, 5.0);
    const auto cold = empirical_ft(counts_for(paper_params(0.0), kSeed + 5), 6, 0.0);
    const double rel = std::abs(hot.slope - hot.s0) / hot.s0;
    return Outcome{rel < 0.2 && cold.negative_windows == 0,
                   fmt::format("slope {:.4f} +- {:.4f} vs ln(6/5) = {:.4f} ({:.1f}%), "
                               "nbar=0 negative windows {} of {}",
                               hot.slope, hot.slope_std_error, hot.s0, 100.0 * rel,
                               cold.negative_windows, cold.n_windows)};
  });

  criterion(10, "no single-site dark state; no dark vector killed by sigma_-^1", [] {
    const auto d = dark_subspace(paper_params());
    const bool ok = d.single_site_kernel_dimension == 0 && d.lowering1_min_singular > 1e-10;
    return Outcome{ok, fmt::format("dim ker(s+1) n ker(s-1) = {}, min singular of s-1 on dark "
                                   "span = {:.4g}",
                                   d.single_site_kernel_dimension, d.lowering1_min_singular)};
  });

  criterion(11, "k(-1e-6) at gamma=0 agrees across nbar in {0,1,2,5} within 5%", [] {
    std::vector<double> ks;
    for (double nbar : {0.0, 1.0, 2.0, 5.0}) ks.push_back(activity_hf(paper_params(nbar), -1e-6));
    const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
    double mean = 0.0;
    for (double k : ks) mean += k / double(ks.size());
    const double spread = (*hi - *lo) / mean;
    return Outcome{spread < 0.05,
                   fmt::format("k = {:.6g}, {:.6g}, {:.6g}, {:.6g}; spread {:.2f}%", ks[0], ks[1],
                               ks[2], ks[3], 100.0 * spread)};
  });

  criterion(12, "byte-identical outputs across reruns and worker counts {1, 4}", [] {
    const fs::path root = fs::temp_directory_path() / "trispin_acceptance";
    fs::remove_all(root);
    RunConfig cfg = parse_config(R"([model]
alpha = 10
b_field = 0.5
gamma_coll = 0.05
gamma_single_ratio = 0.01
nbar = 2
[ensemble]
master_seed = 424242
)");
    std::size_t files = 0;
    std::size_t mismatches = 0;
    for (auto cmd : {Subcommand::kSpectrum, Subcommand::kTrajectories, Subcommand::kDark,
                     Subcommand::kFt, Subcommand::kCompare}) {
      const std::pair<const char*, int> runs[] = {{"a", 1}, {"b", 1}, {"c", 4}};
      for (const auto& [tag, threads] : runs) {
        cfg.output_dir = root / std::string(to_string(cmd)) / tag;
        cfg.threads = threads;
        std::ostringstream err;
        if (run(cmd, cfg, err) != kExitOk) {
          return Outcome{false, fmt::format("{} failed: {}", to_string(cmd), err.str())};
        }
      }
      const fs::path base = root / std::string(to_string(cmd));
      for (const auto& entry : fs::directory_iterator(base / "a")) {
        const auto name = entry.path().filename();
        const std::string ref = slurp(entry.path());
        ++files;
        if (ref != slurp(base / "b" / name) || ref != slurp(base / "c" / name)) ++mismatches;
      }
    }
    return Outcome{files > 0 && mismatches == 0,
                   fmt::format("{} files compared over 3 runs, {} mismatches", files, mismatches)};
  });

  fmt::print("{} of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

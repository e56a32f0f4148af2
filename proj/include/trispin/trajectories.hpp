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
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "trispin/liouvillian.hpp"
#include "trispin/model.hpp"
#include "trispin/rng.hpp"
#include "trispin/spin_algebra.hpp"

namespace trispin {

/// Longest no-jump interval before a trajectory is declared dark-trapped.
inline constexpr double kStallWindow = 1e6;

struct MaxTime {
  double t_max = 0.0;
};
struct MaxJumps {
  std::size_t n_jumps = 0;
};
using StopCriterion = std::variant<MaxTime, MaxJumps>;

struct JumpEvent {
  double time = 0.0;
  int channel = 0;  // index into build_channels(params)
  int weight = 0;   // contribution to the net count K
};

struct JumpRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Vec8 initial_state = Vec8::Zero();
  std::vector<JumpEvent> events;
  double total_time = 0.0;
  ModelParams params;
  bool dark_trapped = false;
  // Largest | ||psi|| - 1 | seen right after a renormalization.
  double max_renormalization_error = 0.0;
};

std::vector<JumpChannel> build_channels(const ModelParams& p);

/// H_eff = H - (i/2) sum_c rate_c L_c^+ L_c.
Mat8 effective_hamiltonian(const ModelParams& p);

/// Exact no-jump evolution psi(t) = exp(-i H_eff t) psi via the eigenbasis
/// of H_eff.
class NoJumpPropagator {
 public:
  explicit NoJumpPropagator(const Mat8& h_eff);

  /// Expansion coefficients of psi in the eigenbasis.
  Vec8 coefficients(const Vec8& psi) const;
  Vec8 evolve(const Vec8& coeffs, double t) const;
  /// ||psi(t)||^2, non-increasing in t.
  double norm2(const Vec8& coeffs, double t) const;
  /// Largest decay rate -2 Im(lambda) over the eigenvalues.
  double max_decay_rate() const { return max_decay_; }

 private:
  Vec8 eigenvalues_;
  Mat8 vectors_;
  Mat8 inverse_;
  Mat8 gram_;
  double max_decay_ = 0.0;
};

/// Haar-random pure state from eight complex Gaussians.
Vec8 haar_state(Philox4x32& rng);

/// Quantum-jump sampler for one parameter set. Immutable after
/// construction, so one instance can serve many threads.
class JumpSimulator {
 public:
  explicit JumpSimulator(const ModelParams& p);

  /// Haar-random initial state drawn from the (seed, stream) generator.
  JumpRecord run(std::uint64_t seed, std::uint64_t stream,
                 const StopCriterion& stop) const;
  JumpRecord run(std::uint64_t seed, std::uint64_t stream,
                 const StopCriterion& stop, const Vec8& initial) const;

  const std::vector<JumpChannel>& channels() const { return channels_; }
  const NoJumpPropagator& propagator() const { return propagator_; }

 private:
  JumpRecord simulate(Philox4x32& rng, JumpRecord rec,
                      const StopCriterion& stop) const;

  ModelParams params_;
  std::vector<JumpChannel> channels_;
  NoJumpPropagator propagator_;
};

JumpRecord sample_trajectory(const ModelParams& p, std::uint64_t seed,
                             std::uint64_t stream, const StopCriterion& stop);

/// Net count rate after `burn_in`: sum of weights / (total_time - burn_in).
double net_activity(const JumpRecord& r, double burn_in);

/// Sum over channels of rate_c tr(L_c^+ L_c rho) in the active stationary
/// state.
double stationary_jump_rate(const ModelParams& p);

/// Fixed horizon expected to contain about `n_jumps` jumps.
double horizon_for_jumps(const ModelParams& p, std::size_t n_jumps);

struct EnsembleSpec {
  std::size_t n_trajectories = 0;
  StopCriterion stop = MaxJumps{1000};
  std::uint64_t master_seed = 0;
  double burn_in_fraction = 0.1;
  int threads = 0;  // 0: OpenMP default
};

/// Calls fn(i, record_i) for every trajectory i; invocations may run
/// concurrently but each index is visited exactly once. Records depend
/// only on (params, master_seed, i, stop).
void for_each_trajectory(
    const ModelParams& p, const EnsembleSpec& spec,
    const std::function<void(std::size_t, const JumpRecord&)>& fn);

struct TrajectorySummary {
  std::uint64_t stream = 0;
  double net_activity = 0.0;
  double total_time = 0.0;
  bool dark_trapped = false;
  std::vector<long> channel_counts;  // over the post burn-in window
};

std::vector<TrajectorySummary> run_ensemble(const ModelParams& p,
                                            const EnsembleSpec& spec);

struct Histogram {
  std::vector<double> edges;  // size = counts.size() + 1
  std::vector<long> counts;
};

struct EnsembleStats {
  std::vector<double> activities;
  Histogram histogram;
  double mean = 0.0;
  double std = 0.0;
  double std_error = 0.0;
  double zero_fraction = 0.0;
  // Lowest histogram density between the two largest modes divided by the
  // smaller of the two peaks; 1 when there is a single mode.
  double bimodality = 1.0;
  bool bimodal = false;
  std::vector<int> mode_bins;  // the (up to) two largest modes
};

/// `bins` <= 0 selects the Freedman-Diaconis rule.
EnsembleStats ensemble_stats(std::span<const double> activities, int bins = 0);
EnsembleStats ensemble_stats(std::span<const JumpRecord> records,
                             double burn_in_fraction, int bins = 0);

Histogram make_histogram(std::span<const double> values, int bins);

/// Net counts K in consecutive windows of length `window` starting at
/// `burn_in`.
std::vector<long> window_net_counts(const JumpRecord& r, double window,
                                    double burn_in);

struct FtRow {
  long k = 0;
  long n_positive = 0;  // windows with count +k
  long n_negative = 0;  // windows with count -k
  double log_ratio = 0.0;
  double predicted = 0.0;  // s0 * k
  bool omitted = false;    // fewer than min_count windows on either side
};

struct FtResult {
  std::vector<FtRow> rows;
  double s0 = 0.0;  // +inf when nbar = 0
  double slope = 0.0;
  double slope_std_error = 0.0;
  long n_windows = 0;
  long negative_windows = 0;
};

/// Estimates log(p_K / p_-K) for K = 1..k_max and fits a line through the
/// origin weighted by the inverse Poisson variance 1/n_K + 1/n_-K.
FtResult empirical_ft(std::span<const long> window_counts, int k_max,
                      double nbar, long min_count = 10);

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  bool active = false;
};

/// Labels consecutive windows by total jump rate against `rate_threshold`
/// and merges neighbours with the same label. The remainder shorter than
/// one window joins the last window.
std::vector<Segment> blinking_segments(const JumpRecord& r, double window,
                                       double rate_threshold);

/// Half the total jump rate of the active phase without single-spin damping.
double default_blink_threshold(const ModelParams& p);

}  // namespace trispin

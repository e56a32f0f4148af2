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

#include "trispin/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <boost/math/tools/toms748_solve.hpp>

#include "parallel.hpp"
#include "trispin/errors.hpp"
#include "trispin/spectral.hpp"

namespace trispin {

std::vector<JumpChannel> build_channels(const ModelParams& p) {
  return jump_channels(p);
}

Mat8 effective_hamiltonian(const ModelParams& p) {
  Mat8 h = build_hamiltonian(p).matrix();
  const cplx half_i(0.0, 0.5);
  for (const auto& ch : build_channels(p)) {
    const Mat8& l = ch.op.matrix();
    h -= half_i * ch.rate * (l.adjoint() * l);
  }
  return h;
}

NoJumpPropagator::NoJumpPropagator(const Mat8& h_eff) {
  Eigen::ComplexEigenSolver<Mat8> es(h_eff);
  if (es.info() != Eigen::Success) {
    throw NumericalError("NoJumpPropagator: eigensolver failed");
  }
  eigenvalues_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
  Eigen::BDCSVD<Mat8> svd(vectors_);
  const auto& sv = svd.singularValues();
  if (sv(kDim - 1) < 1e-10 * sv(0)) {
    throw NumericalError("NoJumpPropagator: H_eff eigenbasis is ill-conditioned");
  }
  inverse_ = vectors_.inverse();
  gram_ = vectors_.adjoint() * vectors_;
  for (int i = 0; i < kDim; ++i) {
    max_decay_ = std::max(max_decay_, -2.0 * eigenvalues_(i).imag());
  }
}

Vec8 NoJumpPropagator::coefficients(const Vec8& psi) const {
  return inverse_ * psi;
}

namespace {

Vec8 phased(const Vec8& eigenvalues, const Vec8& coeffs, double t) {
  const cplx minus_i(0.0, -1.0);
  Vec8 a;
  for (int i = 0; i < kDim; ++i) {
    a(i) = std::exp(minus_i * eigenvalues(i) * t) * coeffs(i);
  }
  return a;
}

}  // namespace

Vec8 NoJumpPropagator::evolve(const Vec8& coeffs, double t) const {
  return vectors_ * phased(eigenvalues_, coeffs, t);
}

double NoJumpPropagator::norm2(const Vec8& coeffs, double t) const {
  const Vec8 a = phased(eigenvalues_, coeffs, t);
  return a.dot(gram_ * a).real();
}

Vec8 haar_state(Philox4x32& rng) {
  std::normal_distribution<double> gauss;
  Vec8 v;
  for (int i = 0; i < kDim; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = cplx(re, im);
  }
  return v.normalized();
}

JumpSimulator::JumpSimulator(const ModelParams& p)
    : params_(p),
      channels_(build_channels(p)),
      propagator_(effective_hamiltonian(p)) {}

JumpRecord JumpSimulator::run(std::uint64_t seed, std::uint64_t stream,
                              const StopCriterion& stop) const {
  Philox4x32 rng(seed, stream);
  JumpRecord rec;
  rec.seed = seed;
  rec.stream = stream;
  rec.initial_state = haar_state(rng);
  return simulate(rng, std::move(rec), stop);
}

JumpRecord JumpSimulator::run(std::uint64_t seed, std::uint64_t stream,
                              const StopCriterion& stop,
                              const Vec8& initial) const {
  if (!(initial.norm() > 0.0)) {
    throw ValidationError("initial state must be nonzero");
  }
  Philox4x32 rng(seed, stream);
  JumpRecord rec;
  rec.seed = seed;
  rec.stream = stream;
  rec.initial_state = initial.normalized();
  return simulate(rng, std::move(rec), stop);
}

JumpRecord JumpSimulator::simulate(Philox4x32& rng, JumpRecord rec,
                                   const StopCriterion& stop) const {
  rec.params = params_;
  const auto* max_time = std::get_if<MaxTime>(&stop);
  const auto* max_jumps = std::get_if<MaxJumps>(&stop);
  if (max_time && !(max_time->t_max > 0.0)) {
    throw ValidationError("stop: t_max must be > 0");
  }
  if (max_jumps && max_jumps->n_jumps == 0) {
    throw ValidationError("stop: n_jumps must be > 0");
  }

  const double base_step =
      propagator_.max_decay_rate() > 0.0 ? 0.5 / propagator_.max_decay_rate() : 1.0;
  Vec8 psi = rec.initial_state;
  double t = 0.0;

  for (;;) {
    const double threshold = uniform_open01(rng);
    const Vec8 coeffs = propagator_.coefficients(psi);
    auto excess = [&](double tau) {
      return propagator_.norm2(coeffs, tau) - threshold;
    };

    const double remaining =
        max_time ? max_time->t_max - t : std::numeric_limits<double>::infinity();
    const double horizon = std::min(remaining, kStallWindow);
    if (excess(horizon) > 0.0) {
      // No jump before the horizon.
      if (horizon == remaining) {
        rec.total_time = max_time->t_max;
        rec.dark_trapped = excess(remaining + kStallWindow) > 0.0;
      } else {
        rec.total_time = t + kStallWindow;
        rec.dark_trapped = true;
      }
      break;
    }

    double lo = 0.0;
    double hi = std::min(base_step, horizon);
    while (excess(hi) > 0.0) {
      lo = hi;
      hi = std::min(2.0 * hi, horizon);
    }
    double tau = hi;
    if (hi > lo) {
      boost::uintmax_t max_iter = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          excess, lo, hi, excess(lo), excess(hi),
          boost::math::tools::eps_tolerance<double>(50), max_iter);
      tau = 0.5 * (bracket.first + bracket.second);
    }
    const double t_next = t + tau;
    t = t_next > t ? t_next : std::nextafter(t, std::numeric_limits<double>::infinity());

    psi = propagator_.evolve(coeffs, tau);
    std::vector<double> weights(channels_.size());
    double total = 0.0;
    for (std::size_t c = 0; c < channels_.size(); ++c) {
      weights[c] = channels_[c].rate * (channels_[c].op.matrix() * psi).squaredNorm();
      total += weights[c];
    }
    if (!(total > 0.0)) {
      throw NumericalError("jump selected in a state with zero jump rate");
    }
    const double pick = uniform_open01(rng) * total;
    std::size_t chosen = 0;
    double acc = weights[0];
    while (pick > acc && chosen + 1 < channels_.size()) {
      ++chosen;
      acc += weights[chosen];
    }
    // Never pick a channel that annihilates the state.
    while (weights[chosen] == 0.0 && chosen > 0) --chosen;

    psi = channels_[chosen].op.matrix() * psi;
    psi.normalize();
    rec.max_renormalization_error =
        std::max(rec.max_renormalization_error, std::abs(psi.norm() - 1.0));
    rec.events.push_back({t, static_cast<int>(chosen), channels_[chosen].count_weight});

    if (max_jumps && rec.events.size() >= max_jumps->n_jumps) {
      rec.total_time = t;
      break;
    }
  }
  return rec;
}

JumpRecord sample_trajectory(const ModelParams& p, std::uint64_t seed,
                             std::uint64_t stream, const StopCriterion& stop) {
  return JumpSimulator(p).run(seed, stream, stop);
}

double net_activity(const JumpRecord& r, double burn_in) {
  if (!(r.total_time > burn_in)) {
    throw ValidationError("net_activity: empty window after burn-in");
  }
  long net = 0;
  for (const auto& e : r.events) {
    if (e.time > burn_in) net += e.weight;
  }
  return double(net) / (r.total_time - burn_in);
}

double stationary_jump_rate(const ModelParams& p) {
  const Mat8 rho = active_steady_state(p).matrix();
  double rate = 0.0;
  for (const auto& ch : build_channels(p)) {
    const Mat8& l = ch.op.matrix();
    rate += ch.rate * (l.adjoint() * l * rho).trace().real();
  }
  return rate;
}

double horizon_for_jumps(const ModelParams& p, std::size_t n_jumps) {
  const double rate = stationary_jump_rate(p);
  if (!(rate > 0.0)) {
    throw NumericalError("horizon_for_jumps: stationary jump rate is zero");
  }
  return double(n_jumps) / rate;
}

void for_each_trajectory(
    const ModelParams& p, const EnsembleSpec& spec,
    const std::function<void(std::size_t, const JumpRecord&)>& fn) {
  if (spec.n_trajectories == 0) {
    throw ValidationError("ensemble: n_trajectories must be >= 1");
  }
  const JumpSimulator sim(p);
  const auto n = static_cast<long>(spec.n_trajectories);
  std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_threads(spec.threads))
  for (long i = 0; i < n; ++i) {
    try {
      const JumpRecord rec = sim.run(spec.master_seed, static_cast<std::uint64_t>(i), spec.stop);
      fn(static_cast<std::size_t>(i), rec);
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericalError(failure);
}

std::vector<TrajectorySummary> run_ensemble(const ModelParams& p,
                                            const EnsembleSpec& spec) {
  const std::size_t n_channels = build_channels(p).size();
  std::vector<TrajectorySummary> out(spec.n_trajectories);
  for_each_trajectory(p, spec, [&](std::size_t i, const JumpRecord& rec) {
    const double burn_in = spec.burn_in_fraction * rec.total_time;
    TrajectorySummary s;
    s.stream = rec.stream;
    s.total_time = rec.total_time;
    s.dark_trapped = rec.dark_trapped;
    s.net_activity = net_activity(rec, burn_in);
    s.channel_counts.assign(n_channels, 0);
    for (const auto& e : rec.events) {
      if (e.time > burn_in) ++s.channel_counts[e.channel];
    }
    out[i] = std::move(s);
  });
  return out;
}

namespace {

// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * double(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
}

int freedman_diaconis_bins(const std::vector<double>& sorted) {
  const double n = double(sorted.size());
  const double range = sorted.back() - sorted.front();
  if (range <= 0.0) return 1;
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  if (iqr <= 0.0) return static_cast<int>(std::ceil(std::log2(n))) + 1;
  const double width = 2.0 * iqr * std::cbrt(1.0 / n);
  return std::clamp(static_cast<int>(std::ceil(range / width)), 1, 1000);
}

}  // namespace

Histogram make_histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw ValidationError("histogram: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (bins <= 0) bins = freedman_diaconis_bins(sorted);
  double lo = sorted.front();
  double hi = sorted.back();
  if (hi <= lo) {
    const double pad = std::max(0.5 * std::abs(lo), 0.5);
    lo -= pad;
    hi += pad;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    h.edges[b] = lo + (hi - lo) * double(b) / double(bins);
  }
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / double(bins);
  for (double v : values) {
    auto b = static_cast<int>(std::floor((v - lo) / width));
    h.counts[std::clamp(b, 0, bins - 1)] += 1;
  }
  return h;
}

EnsembleStats ensemble_stats(std::span<const double> activities, int bins) {
  if (activities.empty()) throw ValidationError("ensemble_stats: empty ensemble");
  EnsembleStats st;
  st.activities.assign(activities.begin(), activities.end());
  const double n = double(activities.size());
  double sum = 0.0;
  long zeros = 0;
  for (double a : activities) {
    sum += a;
    if (a == 0.0) ++zeros;
  }
  st.mean = sum / n;
  double ss = 0.0;
  for (double a : activities) ss += (a - st.mean) * (a - st.mean);
  st.std = activities.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  st.std_error = st.std / std::sqrt(n);
  st.zero_fraction = double(zeros) / n;
  st.histogram = make_histogram(activities, bins);

  // Local maxima, plateaus counted once at their first bin.
  const auto& c = st.histogram.counts;
  const int nb = static_cast<int>(c.size());
  std::vector<int> modes;
  for (int b = 0; b < nb; ++b) {
    if (c[b] == 0) continue;
    int e = b;
    while (e + 1 < nb && c[e + 1] == c[b]) ++e;
    const bool left_ok = b == 0 || c[b - 1] < c[b];
    const bool right_ok = e == nb - 1 || c[e + 1] < c[b];
    if (left_ok && right_ok) modes.push_back(b);
    b = e;
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [&c](int a, int b) { return c[a] > c[b]; });
  if (modes.size() > 2) modes.resize(2);
  st.mode_bins = modes;
  if (modes.size() == 2) {
    const int a = std::min(modes[0], modes[1]);
    const int b = std::max(modes[0], modes[1]);
    long valley = c[a];
    for (int i = a; i <= b; ++i) valley = std::min(valley, c[i]);
    st.bimodality = double(valley) / double(std::min(c[a], c[b]));
    st.bimodal = st.bimodality < 0.5;
  }
  std::sort(st.mode_bins.begin(), st.mode_bins.end());
  return st;
}

EnsembleStats ensemble_stats(std::span<const JumpRecord> records,
                             double burn_in_fraction, int bins) {
  std::vector<double> acts;
  acts.reserve(records.size());
  for (const auto& r : records) {
    acts.push_back(net_activity(r, burn_in_fraction * r.total_time));
  }
  return ensemble_stats(acts, bins);
}

std::vector<long> window_net_counts(const JumpRecord& r, double window,
                                    double burn_in) {
  if (!(window > 0.0)) throw ValidationError("window must be > 0");
  std::vector<long> out;
  if (r.total_time - burn_in < window) return out;
  const auto n = static_cast<std::size_t>(std::floor((r.total_time - burn_in) / window));
  out.assign(n, 0);
  for (const auto& e : r.events) {
    if (e.time < burn_in) continue;
    const auto w = static_cast<std::size_t>(std::floor((e.time - burn_in) / window));
    if (w < n) out[w] += e.weight;
  }
  return out;
}

FtResult empirical_ft(std::span<const long> window_counts, int k_max,
                      double nbar, long min_count) {
  if (k_max < 1) throw ValidationError("empirical_ft: k_max must be >= 1");
  FtResult res;
  res.s0 = nbar > 0.0 ? gc_symmetry_point(nbar)
                      : std::numeric_limits<double>::infinity();
  std::map<long, long> hist;
  for (long k : window_counts) {
    ++hist[k];
    if (k < 0) ++res.negative_windows;
  }
  res.n_windows = static_cast<long>(window_counts.size());

  double sxy = 0.0;
  double sxx = 0.0;
  for (long k = 1; k <= k_max; ++k) {
    FtRow row;
    row.k = k;
    row.n_positive = hist.count(k) ? hist[k] : 0;
    row.n_negative = hist.count(-k) ? hist[-k] : 0;
    row.predicted = res.s0 * double(k);
    row.omitted = row.n_positive < min_count || row.n_negative < min_count;
    if (!row.omitted) {
      row.log_ratio = std::log(double(row.n_positive) / double(row.n_negative));
      const double var = 1.0 / double(row.n_positive) + 1.0 / double(row.n_negative);
      sxy += double(k) * row.log_ratio / var;
      sxx += double(k) * double(k) / var;
    } else {
      row.log_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    res.rows.push_back(row);
  }
  if (sxx > 0.0) {
    res.slope = sxy / sxx;
    res.slope_std_error = 1.0 / std::sqrt(sxx);
  } else {
    res.slope = std::numeric_limits<double>::quiet_NaN();
    res.slope_std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

std::vector<Segment> blinking_segments(const JumpRecord& r, double window,
                                       double rate_threshold) {
  if (!(window > 0.0)) throw ValidationError("blinking_segments: window must be > 0");
  if (window > r.total_time) {
    throw ValidationError("blinking_segments: window longer than trajectory");
  }
  const auto n = static_cast<std::size_t>(std::floor(r.total_time / window));
  std::vector<long> counts(n, 0);
  for (const auto& e : r.events) {
    const auto w = std::min(n - 1, static_cast<std::size_t>(std::floor(e.time / window)));
    ++counts[w];
  }
  std::vector<Segment> out;
  for (std::size_t w = 0; w < n; ++w) {
    const double start = double(w) * window;
    const double end = w + 1 == n ? r.total_time : start + window;
    const bool active = double(counts[w]) / (end - start) >= rate_threshold;
    if (!out.empty() && out.back().active == active) {
      out.back().t_end = end;
    } else {
      out.push_back({start, end, active});
    }
  }
  return out;
}

double default_blink_threshold(const ModelParams& p) {
  ModelParams closed = p;
  closed.gamma_single = 0.0;
  return 0.5 * stationary_jump_rate(closed);
}

}  // namespace trispin

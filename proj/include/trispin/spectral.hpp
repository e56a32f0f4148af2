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

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trispin/liouvillian.hpp"
#include "trispin/model.hpp"

namespace trispin {

/// Leading eigenvalue of a (tilted) generator.
struct LeadingEigenvalue {
  std::complex<double> value;
  int index = -1;     // position in the eigenvalue list
  double gap = 0.0;   // distance to the nearest other eigenvalue
};

/// All 64 eigenvalues of a dense generator.
Eigen::VectorXcd generator_eigenvalues(const SuperMatrix& w);

/// Among eigenvalues whose real part lies within 1e-9 of the maximum, picks
/// the largest real part with |Im| <= 1e-8. Eigenvalue pairs +-i*eps from
/// coherences inside the dark subspace tie with the real null eigenvalue at
/// s = 0; they are skipped. Throws NumericalError when no near-real
/// eigenvalue sits at the top of the spectrum.
LeadingEigenvalue leading_eigenvalue(const Eigen::VectorXcd& eigenvalues);

/// theta(s): the leading eigenvalue of W_s.
double dynamical_free_energy(const ModelParams& p, double s);

/// k(s) = -[theta(s+h) - theta(s-h)] / (2h). Throws KinkStraddleError when
/// the stencil contains a non-analytic point of theta.
double activity_fd(const ModelParams& p, double s, double h = 1e-4);
/// Same, but checks the stencil against known kink locations.
double activity_fd(const ModelParams& p, double s, double h,
                   std::span<const double> known_kinks);
/// Richardson-extrapolated central difference (4 D(h/2) - D(h)) / 3.
double activity_fd_richardson(const ModelParams& p, double s, double h = 1e-4);

/// k(s) = -<<l| dW_s/ds |r>> / <<l|r>> for the leading left/right
/// eigenvectors. Throws DegeneracyError when the leading eigenvalue is not
/// separated from the rest of the spectrum by more than 1e-10.
double activity_hf(const ModelParams& p, double s);

/// Hellmann-Feynman where defined, otherwise a central difference with a
/// small step (1e-7). At a kink this returns the average of the one-sided
/// activities.
double local_activity(const ModelParams& p, double s);

struct Kink {
  double s_star = 0.0;
  double delta_k = 0.0;  // k_left - k_right
  double k_left = 0.0;   // k(s* - 1e-6)
  double k_right = 0.0;  // k(s* + 1e-6)
};

struct ScanResult {
  std::vector<double> s_values;
  std::vector<double> theta;
  std::vector<double> activity;
  std::vector<Kink> kinks;
  // Present when produced by theta_scan; enables kink refinement.
  std::optional<ModelParams> params;
};

struct ScanOptions {
  int threads = 0;               // 0: OpenMP default
  double jump_threshold = -1.0;  // <= 0: 1% of max |k| on the grid
};

ScanResult theta_scan(const ModelParams& p, std::span<const double> s_grid,
                      const ScanOptions& opts = {});

std::vector<double> linear_grid(double lo, double hi, int n);

/// Flags grid intervals where either the secant slope of theta disagrees
/// with the mean of -k at the endpoints, or the step in k disagrees with the
/// neighbouring steps, by more than 10x the median disagreement, and k
/// changes by more than `jump_threshold` across the interval and its
/// neighbours. With params available the location is bisected on the
/// leading-branch switch and the candidate is kept only if the one-sided
/// activities at s* +- 1e-6 still differ by more than half the threshold.
std::vector<Kink> detect_kinks(const ScanResult& scan, double jump_threshold);

/// s0 = ln((n+1)/n). Throws ValidationError for nbar <= 0.
double gc_symmetry_point(double nbar);

/// max over the grid of |theta(s) - theta(s0 - s)|.
double gc_residual(const ModelParams& p, std::span<const double> s_grid,
                   int threads = 0);

struct SteadyState {
  DensityMatrix rho;
  int null_dimension = 0;
  double residual = 0.0;  // max |W[rho]| entry
};

/// Stationary state of W. For gamma > 0 the null space must be
/// one-dimensional (NumericalError otherwise). For gamma = 0 the returned
/// representative is the long-time average of the maximally mixed state.
/// Closed dynamics (Gamma = gamma = 0) is rejected.
SteadyState steady_state(const ModelParams& p);

/// Long-time average of `rho0`: the spectral projection of rho0 onto the
/// null space of W.
Mat8 ergodic_average(const ModelParams& p, const Mat8& rho0);

struct DarkSubspace {
  Eigen::MatrixXcd basis;       // 8 x dimension, orthonormal columns
  int dimension = 0;
  std::vector<double> energies;  // H restricted to the span, ascending
  double jump_residual = 0.0;         // max ||sigma_pm v||
  double invariance_residual = 0.0;   // max |(1 - P) H P| entry
  // Smallest singular value of sigma_-^1 restricted to the span; > 0 means
  // no dark vector is annihilated by sigma_-^1.
  double lowering1_min_singular = 0.0;
  // dim ker(sigma_+^1) n ker(sigma_-^1).
  int single_site_kernel_dimension = 0;

  Mat8 projector() const;
};

/// Largest H-invariant subspace of ker(sigma_+) n ker(sigma_-).
DarkSubspace dark_subspace(const ModelParams& p);

/// Stationary state of the dynamics restricted to the complement of the
/// dark subspace (equal to steady_state for gamma > 0).
DensityMatrix active_steady_state(const ModelParams& p);

/// Orthonormal basis of the null space; singular values below
/// `abs_tol` count as zero.
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& m, double abs_tol);

}  // namespace trispin

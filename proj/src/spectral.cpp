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

#include "trispin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "parallel.hpp"
#include "trispin/errors.hpp"
#include "trispin/spin_algebra.hpp"

namespace trispin {

namespace {

constexpr double kTieWindow = 1e-9;
constexpr double kImagTol = 1e-8;
constexpr double kGapTol = 1e-10;
constexpr double kRankTol = 1e-10;
constexpr double kOneSidedOffset = 1e-6;
constexpr double kFallbackStep = 1e-7;

void require_finite_s(double s) {
  if (!std::isfinite(s)) throw ValidationError("s must be finite");
}

}  // namespace

Eigen::VectorXcd generator_eigenvalues(const SuperMatrix& w) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(w, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver failed to converge");
  }
  return es.eigenvalues();
}

LeadingEigenvalue leading_eigenvalue(const Eigen::VectorXcd& ev) {
  if (ev.size() == 0) throw NumericalError("empty spectrum");
  double max_re = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    max_re = std::max(max_re, ev(i).real());
  }
  LeadingEigenvalue out;
  double smallest_imag = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i).real() < max_re - kTieWindow) continue;
    smallest_imag = std::min(smallest_imag, std::abs(ev(i).imag()));
    if (std::abs(ev(i).imag()) > kImagTol) continue;
    if (out.index < 0 || ev(i).real() > out.value.real()) {
      out.value = ev(i);
      out.index = static_cast<int>(i);
    }
  }
  if (out.index < 0) {
    throw NumericalError("leading eigenvalue is not real (|Im| = " +
                         std::to_string(smallest_imag) + ")");
  }
  out.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (i == out.index) continue;
    out.gap = std::min(out.gap, std::abs(ev(i) - out.value));
  }
  return out;
}

double dynamical_free_energy(const ModelParams& p, double s) {
  require_finite_s(s);
  const auto w = tilt_generator(p, s);
  return leading_eigenvalue(generator_eigenvalues(w.matrix)).value.real();
}

double activity_fd(const ModelParams& p, double s, double h) {
  require_finite_s(s);
  if (!(h > 0.0)) throw ValidationError("activity_fd: h must be > 0");
  const double t0 = dynamical_free_energy(p, s);
  const double tp = dynamical_free_energy(p, s + h);
  const double tm = dynamical_free_energy(p, s - h);
  const double tp2 = dynamical_free_energy(p, s + h / 2);
  const double tm2 = dynamical_free_energy(p, s - h / 2);

  // One-sided slope mismatch: ~theta'' h for smooth theta, ~constant when a
  // kink sits inside the stencil.
  const double jump_h = (tp - t0) / h - (t0 - tm) / h;
  const double jump_h2 = (tp2 - t0) / (h / 2) - (t0 - tm2) / (h / 2);
  if (std::abs(jump_h) > 1e-8 && std::abs(jump_h2) > 0.75 * std::abs(jump_h)) {
    throw KinkStraddleError(
        "activity_fd: theta is not differentiable inside [s-h, s+h] around s=" +
        std::to_string(s) + "; evaluate one-sided on either side");
  }
  return -(tp - tm) / (2.0 * h);
}

double activity_fd(const ModelParams& p, double s, double h,
                   std::span<const double> known_kinks) {
  for (double k : known_kinks) {
    if (k > s - h && k < s + h) {
      throw KinkStraddleError("activity_fd: stencil around s=" +
                              std::to_string(s) + " straddles kink at " +
                              std::to_string(k));
    }
  }
  return activity_fd(p, s, h);
}

double activity_fd_richardson(const ModelParams& p, double s, double h) {
  const double coarse = activity_fd(p, s, h);
  const double fine = -(dynamical_free_energy(p, s + h / 2) -
                        dynamical_free_energy(p, s - h / 2)) /
                      h;
  return (4.0 * fine - coarse) / 3.0;
}

namespace {

// Hellmann-Feynman derivative given the already factorized W_s.
double hf_from_spectrum(const ModelParams& p, double s, const SuperMatrix& w,
                        const LeadingEigenvalue& lead) {
  if (lead.gap <= kGapTol) {
    throw DegeneracyError("activity_hf: leading eigenvalue at s=" +
                          std::to_string(s) + " is degenerate (gap " +
                          std::to_string(lead.gap) + ")");
  }
  // Inverse iteration on the (numerically) singular shifted matrix; the
  // rounding error in lead.value keeps the factorization finite.
  const Eigen::MatrixXcd shifted =
      w - lead.value * Eigen::MatrixXcd::Identity(kSuperDim, kSuperDim);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_adj(shifted.adjoint());
  Eigen::VectorXcd right = Eigen::VectorXcd::Ones(kSuperDim);
  Eigen::VectorXcd left = Eigen::VectorXcd::Ones(kSuperDim);
  for (int it = 0; it < 3; ++it) {
    right = lu.solve(right);
    right /= right.norm();
    left = lu_adj.solve(left);
    left /= left.norm();
  }
  if (!right.allFinite() || !left.allFinite()) {
    throw NumericalError("activity_hf: inverse iteration failed");
  }
  const std::complex<double> norm = left.dot(right);
  if (std::abs(norm) < 1e-12) {
    throw NumericalError("activity_hf: left/right eigenvectors are orthogonal");
  }
  const std::complex<double> num = left.dot(tilt_derivative(p, s) * right);
  return -(num / norm).real();
}

double fallback_activity(const ModelParams& p, double s) {
  return -(dynamical_free_energy(p, s + kFallbackStep) -
           dynamical_free_energy(p, s - kFallbackStep)) /
         (2.0 * kFallbackStep);
}

struct PointValue {
  double theta = 0.0;
  double activity = 0.0;
};

PointValue evaluate_point(const ModelParams& p, double s) {
  require_finite_s(s);
  const auto w = tilt_generator(p, s);
  const auto lead = leading_eigenvalue(generator_eigenvalues(w.matrix));
  PointValue out;
  out.theta = lead.value.real();
  try {
    out.activity = hf_from_spectrum(p, s, w.matrix, lead);
  } catch (const DegeneracyError&) {
    out.activity = fallback_activity(p, s);
  }
  return out;
}

}  // namespace

double activity_hf(const ModelParams& p, double s) {
  require_finite_s(s);
  const auto w = tilt_generator(p, s);
  const auto lead = leading_eigenvalue(generator_eigenvalues(w.matrix));
  return hf_from_spectrum(p, s, w.matrix, lead);
}

double local_activity(const ModelParams& p, double s) {
  return evaluate_point(p, s).activity;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) {
    throw ValidationError("linear_grid: need n >= 2 and hi > lo");
  }
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * double(i) / double(n - 1);
  }
  return g;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("s grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ValidationError("s grid not finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ValidationError("s grid must be strictly increasing");
    }
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// Bisects on which branch the local activity is closer to. The reference
// activities follow the bracket so that drift along a curved branch does
// not outweigh the jump.
double refine_kink(const ModelParams& p, double lo, double hi, double k_lo,
                   double k_hi) {
  for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double km = local_activity(p, mid);
    if (std::abs(km - k_lo) < std::abs(km - k_hi)) {
      lo = mid;
      k_lo = km;
    } else {
      hi = mid;
      k_hi = km;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Kink> detect_kinks(const ScanResult& scan, double jump_threshold) {
  const auto& s = scan.s_values;
  const auto& th = scan.theta;
  const auto& k = scan.activity;
  const std::size_t n = s.size();
  std::vector<Kink> out;
  if (n < 2 || th.size() != n || k.size() != n) return out;

  // Two signatures of a corner inside interval i, both small on analytic
  // stretches. The secant slope of theta against the trapezoid mean of -k
  // (cancels when the corner sits exactly mid-interval), and the step in k
  // against the average step of the neighbouring intervals.
  const std::size_t m = n - 1;
  std::vector<double> mismatch(m);
  std::vector<double> step_dev(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double secant = (th[i + 1] - th[i]) / (s[i + 1] - s[i]);
    mismatch[i] = std::abs(secant + 0.5 * (k[i] + k[i + 1]));
    const double step = k[i + 1] - k[i];
    const double before = i > 0 ? k[i] - k[i - 1] : step;
    const double after = i + 2 < n ? k[i + 2] - k[i + 1] : step;
    const double ref = (i > 0 && i + 2 < n) ? 0.5 * (before + after)
                       : i > 0             ? before
                                           : after;
    step_dev[i] = std::abs(step - ref);
  }
  const double med_mismatch = median(mismatch);
  const double med_step = median(step_dev);

  std::vector<bool> flag(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const double floor = 0.5 * jump_threshold;
    const bool outlier =
        (mismatch[i] > 10.0 * med_mismatch && mismatch[i] > floor) ||
        (step_dev[i] > 10.0 * med_step && step_dev[i] > floor);
    const std::size_t a = i > 0 ? i - 1 : i;
    const std::size_t b = std::min(i + 2, n - 1);
    const bool jump = std::abs(k[b] - k[a]) > jump_threshold;
    flag[i] = outlier && jump;
  }

  for (std::size_t i = 0; i < m;) {
    if (!flag[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < m && flag[j + 1]) ++j;
    const std::size_t a = i;
    const std::size_t b = j + 1;
    i = j + 1;

    Kink kink;
    if (!scan.params) {
      kink.s_star = 0.5 * (s[a] + s[b]);
      kink.k_left = k[a];
      kink.k_right = k[b];
    } else {
      const ModelParams& p = *scan.params;
      kink.s_star = refine_kink(p, s[a], s[b], k[a], k[b]);
      kink.k_left = local_activity(p, kink.s_star - kOneSidedOffset);
      kink.k_right = local_activity(p, kink.s_star + kOneSidedOffset);
      if (std::abs(kink.k_left - kink.k_right) <= 0.5 * jump_threshold) {
        continue;  // smooth crossover narrower than the grid spacing
      }
    }
    kink.delta_k = kink.k_left - kink.k_right;
    out.push_back(kink);
  }
  return out;
}

ScanResult theta_scan(const ModelParams& p, std::span<const double> s_grid,
                      const ScanOptions& opts) {
  validate(p);
  check_grid(s_grid);
  const int n = static_cast<int>(s_grid.size());
  ScanResult out;
  out.s_values.assign(s_grid.begin(), s_grid.end());
  out.theta.assign(n, 0.0);
  out.activity.assign(n, 0.0);
  out.params = p;

  std::string failure;
  const int threads = detail::resolve_threads(opts.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      const auto v = evaluate_point(p, s_grid[i]);
      out.theta[i] = v.theta;
      out.activity[i] = v.activity;
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericalError(failure);

  double threshold = opts.jump_threshold;
  if (threshold <= 0.0) {
    double kmax = 0.0;
    for (double v : out.activity) kmax = std::max(kmax, std::abs(v));
    threshold = std::max(1e-9, 0.01 * kmax);
  }
  out.kinks = detect_kinks(out, threshold);
  return out;
}

double gc_symmetry_point(double nbar) {
  if (!(nbar > 0.0) || !std::isfinite(nbar)) {
    throw ValidationError("nbar: symmetry point needs nbar > 0");
  }
  return std::log((nbar + 1.0) / nbar);
}

double gc_residual(const ModelParams& p, std::span<const double> s_grid,
                   int threads) {
  validate(p);
  const double s0 = gc_symmetry_point(p.nbar);
  check_grid(s_grid);
  const int n = static_cast<int>(s_grid.size());
  std::vector<double> diff(n, 0.0);
  std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_threads(threads))
  for (int i = 0; i < n; ++i) {
    try {
      diff[i] = std::abs(dynamical_free_energy(p, s_grid[i]) -
                         dynamical_free_energy(p, s0 - s_grid[i]));
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericalError(failure);
  return *std::max_element(diff.begin(), diff.end());
}

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& m, double abs_tol) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > abs_tol) ++rank;
  }
  return svd.matrixV().rightCols(m.cols() - rank);
}

namespace {

struct NullProjection {
  Eigen::MatrixXcd projector;  // 64 x 64 spectral projector onto ker W
  int dimension = 0;
};

NullProjection null_projection(const SuperMatrix& w) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = kRankTol * std::max(1.0, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  const int dim = kSuperDim - rank;
  NullProjection out;
  out.dimension = dim;
  if (dim == 0) {
    out.projector = Eigen::MatrixXcd::Zero(kSuperDim, kSuperDim);
    return out;
  }
  const Eigen::MatrixXcd right = svd.matrixV().rightCols(dim);
  const Eigen::MatrixXcd left = svd.matrixU().rightCols(dim);
  const Eigen::MatrixXcd overlap = left.adjoint() * right;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(overlap);
  if (!lu.isInvertible()) {
    throw NumericalError("null eigenvalue of W is not semisimple");
  }
  out.projector = right * lu.inverse() * left.adjoint();
  return out;
}

Mat8 normalized_state(const Mat8& m) {
  Mat8 h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!(std::abs(tr) > 1e-14)) {
    throw NumericalError("stationary state has zero trace");
  }
  return h / tr;
}

}  // namespace

Mat8 ergodic_average(const ModelParams& p, const Mat8& rho0) {
  const auto w = build_generator(p);
  const auto proj = null_projection(w.matrix);
  return unvectorize(proj.projector * vectorize(rho0));
}

SteadyState steady_state(const ModelParams& p) {
  validate(p);
  if (p.gamma_coll == 0.0 && p.gamma_single == 0.0) {
    throw NumericalError(
        "steady_state: closed dynamics (Gamma = gamma = 0) has no unique "
        "stationary state");
  }
  const auto w = build_generator(p);
  const auto proj = null_projection(w.matrix);
  if (proj.dimension == 0) {
    throw NumericalError("steady_state: generator has no null vector");
  }
  if (p.gamma_single > 0.0 && proj.dimension > 1) {
    throw NumericalError("steady_state: null space of dimension " +
                         std::to_string(proj.dimension) +
                         " despite single-spin damping");
  }
  const Mat8 avg =
      unvectorize(proj.projector * vectorize(Mat8::Identity() / double(kDim)));
  const Mat8 rho = normalized_state(avg);
  SteadyState out{DensityMatrix(rho), proj.dimension, 0.0};
  out.residual = unvectorize(w.matrix * vectorize(rho)).cwiseAbs().maxCoeff();
  return out;
}

Mat8 DarkSubspace::projector() const {
  if (dimension == 0) return Mat8::Zero();
  return basis * basis.adjoint();
}

DarkSubspace dark_subspace(const ModelParams& p) {
  validate(p);
  const Mat8 h = build_hamiltonian(p).matrix();
  const Mat8 sp = collective_jump(Direction::kRaise, p.convention).matrix();
  const Mat8 sm = collective_jump(Direction::kLower, p.convention).matrix();
  const double scale = std::max({1.0, max_abs(h), max_abs(sp)});
  const double tol = kRankTol * scale;

  Eigen::MatrixXcd stacked(2 * kDim, kDim);
  stacked << sp, sm;
  Eigen::MatrixXcd basis = null_space(stacked, tol);

  // Shrink to the largest H-invariant subspace.
  while (basis.cols() > 0) {
    const Eigen::MatrixXcd leak =
        (Eigen::MatrixXcd::Identity(kDim, kDim) - basis * basis.adjoint()) *
        h * basis;
    const Eigen::MatrixXcd keep = null_space(leak, tol);
    if (keep.cols() == basis.cols()) break;
    basis = basis * keep;
  }

  DarkSubspace out;
  out.dimension = static_cast<int>(basis.cols());
  if (out.dimension > 0) {
    const Eigen::MatrixXcd hr = basis.adjoint() * h * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (hr + hr.adjoint()));
    basis = basis * es.eigenvectors();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      out.energies.push_back(es.eigenvalues()(i));
    }
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      out.jump_residual = std::max(
          {out.jump_residual, (sp * basis.col(c)).norm(), (sm * basis.col(c)).norm()});
    }
    const Mat8 proj = basis * basis.adjoint();
    out.invariance_residual =
        ((Mat8::Identity() - proj) * h * proj).cwiseAbs().maxCoeff();
    const Mat8 s1m = ladder(1, Direction::kLower, p.convention).matrix();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(s1m * basis);
    out.lowering1_min_singular = svd.singularValues().minCoeff();
  }
  out.basis = basis;

  Eigen::MatrixXcd single(2 * kDim, kDim);
  single << ladder(1, Direction::kRaise, p.convention).matrix(),
      ladder(1, Direction::kLower, p.convention).matrix();
  out.single_site_kernel_dimension =
      static_cast<int>(null_space(single, tol).cols());
  return out;
}

DensityMatrix active_steady_state(const ModelParams& p) {
  validate(p);
  if (p.gamma_single > 0.0) return steady_state(p).rho;
  const auto dark = dark_subspace(p);
  if (dark.dimension == 0) return steady_state(p).rho;
  const Mat8 q = Mat8::Identity() - dark.projector();
  return DensityMatrix(normalized_state(ergodic_average(p, q)));
}

}  // namespace trispin

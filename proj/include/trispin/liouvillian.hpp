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
#include <vector>

#include <Eigen/Dense>

#include "trispin/model.hpp"
#include "trispin/spin_algebra.hpp"

namespace trispin {

inline constexpr int kSuperDim = kDim * kDim;

/// Dense operator on vectorized 8x8 matrices (64x64).
using SuperMatrix = Eigen::MatrixXcd;
using SuperVector = Eigen::VectorXcd;

/// A physical state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  /// Throws ValidationError when an invariant fails at 1e-10.
  explicit DensityMatrix(const Mat8& m);

  static DensityMatrix maximally_mixed();
  static DensityMatrix pure(const Vec8& psi);

  const Mat8& matrix() const { return matrix_; }

 private:
  Mat8 matrix_;
};

/// The generator W (or tilted W_s) together with how it was built.
struct Superoperator {
  SuperMatrix matrix;
  double bias = 0.0;
  ModelParams params;
};

/// One Lindblad channel in standard form: the dissipator contribution is
/// rate * (L rho L^+ - {L^+ L, rho} / 2). `count_weight` is the change of
/// the net emitted count K when this channel fires.
struct JumpChannel {
  std::string name;
  SpinOperator op;
  double rate = 0.0;
  int count_weight = 0;
};

/// Collective emission (+1), collective absorption (-1) and the six
/// single-spin channels (0). Channels with zero rate are omitted.
std::vector<JumpChannel> jump_channels(const ModelParams& p);

/// Column stacking: element (r, c) goes to index c * 8 + r.
SuperVector vectorize(const Mat8& rho);
/// Throws ValidationError unless v has 64 entries.
Mat8 unvectorize(const SuperVector& v);

/// Matrix of rho -> A rho B, i.e. B^T (x) A.
SuperMatrix sandwich(const Mat8& a, const Mat8& b);

/// D[L] rho = 2 L rho L^+ - {L^+ L, rho}.
SuperMatrix dissipator(const SpinOperator& jump);

/// Matrix of rho -> -i [H, rho]. Throws ValidationError for non-Hermitian H.
SuperMatrix commutator_part(const SpinOperator& h);

/// W = -i[H, .] + Gamma (n+1) D[s-] + Gamma n D[s+]
///     + gamma (n+1) sum_i D[s-^i] + gamma n sum_i D[s+^i].
Superoperator build_generator(const ModelParams& p);

/// W_s: the recycling terms 2 Gamma (n+1) s- . s+ and 2 Gamma n s+ . s-
/// are multiplied by exp(-s) and exp(+s) respectively. Single-spin
/// channels are never tilted.
Superoperator tilt_generator(const ModelParams& p, double s);

/// d W_s / d s.
SuperMatrix tilt_derivative(const ModelParams& p, double s);

/// W_s with every counted recycling term removed (the s -> +inf limit at
/// nbar = 0).
SuperMatrix no_jump_generator(const ModelParams& p);

Mat8 apply_generator(const Superoperator& g, const Mat8& rho);

/// Row vector <<I| with <<I|v>> = trace(unvectorize(v)).
Eigen::RowVectorXcd trace_functional();

}  // namespace trispin

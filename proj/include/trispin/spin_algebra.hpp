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
#include <string_view>

#include <Eigen/Dense>

#include "trispin/model.hpp"

namespace trispin {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;

inline constexpr int kSites = 3;
inline constexpr int kDim = 8;

enum class Axis { kX, kY, kZ };
enum class Direction { kRaise, kLower };

/// An operator on the three-spin Hilbert space.
///
/// Basis: |s1 s2 s3> with spin 1 the most significant bit and bit value 0
/// meaning spin up (sigma_z = +1). |up up up> is index 0, |down up up> is 4.
class SpinOperator {
 public:
  SpinOperator() : matrix_(Mat8::Zero()) {}
  /// Throws ValidationError if `hermitian` is set and the matrix is not
  /// Hermitian to 1e-12.
  explicit SpinOperator(const Mat8& m, bool hermitian = false);

  const Mat8& matrix() const { return matrix_; }
  bool hermitian_hint() const { return hermitian_; }

  SpinOperator adjoint() const;

 private:
  Mat8 matrix_;
  bool hermitian_ = false;
};

double max_abs(const Mat8& m);
double hermiticity_defect(const Mat8& m);

Mat2 pauli(Axis axis);

/// `op` on `site` (1, 2 or 3), identity on the other two.
SpinOperator embed(const Mat2& op, int site);

/// H = alpha sum_i X_i + sum_<ij> X_i X_j - B sum_i Z_i, with all three
/// pairs of the triangle coupled at unit strength.
SpinOperator build_hamiltonian(const ModelParams& p);
/// Same operator without parameter validation (alpha = 0 allowed).
SpinOperator build_hamiltonian(double alpha, double b_field);

SpinOperator ladder(int site, Direction dir, Convention conv);

/// sigma_pm = sigma_pm^1 (sigma_pm^2 - sigma_pm^3).
SpinOperator collective_jump(Direction dir, Convention conv);

/// Permutation matrix exchanging sites 2 and 3.
Mat8 swap23();

/// Product state from a three-letter string of 'u' / 'd', site 1 first.
Vec8 product_state(std::string_view spins);

}  // namespace trispin

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

#include "trispin/spin_algebra.hpp"

#include <array>
#include <string>

#include "trispin/errors.hpp"

namespace trispin {

SpinOperator::SpinOperator(const Mat8& m, bool hermitian)
    : matrix_(m), hermitian_(hermitian) {
  if (hermitian_ && hermiticity_defect(matrix_) >= 1e-12) {
    throw ValidationError("SpinOperator: matrix flagged Hermitian is not");
  }
}

SpinOperator SpinOperator::adjoint() const {
  return SpinOperator(matrix_.adjoint(), hermitian_);
}

double max_abs(const Mat8& m) { return m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Mat8& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Mat2 pauli(Axis axis) {
  const cplx i(0.0, 1.0);
  Mat2 m;
  switch (axis) {
    case Axis::kX:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case Axis::kY:
      m << 0.0, -i, i, 0.0;
      break;
    case Axis::kZ:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return m;
}

namespace {

// Kronecker product of three 2x2 factors, first factor most significant.
Mat8 kron3(const Mat2& a, const Mat2& b, const Mat2& c) {
  Mat8 out;
  for (int r = 0; r < kDim; ++r) {
    for (int col = 0; col < kDim; ++col) {
      out(r, col) = a(r >> 2, col >> 2) * b((r >> 1) & 1, (col >> 1) & 1) *
                    c(r & 1, col & 1);
    }
  }
  return out;
}

void check_site(int site) {
  if (site < 1 || site > kSites) {
    throw ValidationError("site must be 1, 2 or 3, got " +
                          std::to_string(site));
  }
}

}  // namespace

SpinOperator embed(const Mat2& op, int site) {
  check_site(site);
  std::array<Mat2, kSites> factors = {Mat2::Identity(), Mat2::Identity(),
                                      Mat2::Identity()};
  factors[site - 1] = op;
  const bool herm = (op - op.adjoint()).cwiseAbs().maxCoeff() < 1e-15;
  return SpinOperator(kron3(factors[0], factors[1], factors[2]), herm);
}

SpinOperator build_hamiltonian(const ModelParams& p) {
  validate(p);
  return build_hamiltonian(p.alpha, p.b_field);
}

SpinOperator build_hamiltonian(double alpha, double b_field) {
  Mat8 h = Mat8::Zero();
  const Mat2 x = pauli(Axis::kX);
  const Mat2 z = pauli(Axis::kZ);
  for (int i = 1; i <= kSites; ++i) {
    h += alpha * embed(x, i).matrix() - b_field * embed(z, i).matrix();
  }
  constexpr std::array<std::array<int, 2>, 3> kPairs = {{{1, 2}, {2, 3}, {1, 3}}};
  for (const auto& [a, b] : kPairs) {
    h += embed(x, a).matrix() * embed(x, b).matrix();
  }
  return SpinOperator(h, true);
}

SpinOperator ladder(int site, Direction dir, Convention conv) {
  const cplx i(0.0, 1.0);
  const double sign = dir == Direction::kRaise ? 1.0 : -1.0;
  Mat2 m = pauli(Axis::kX) + sign * i * pauli(Axis::kY);
  if (conv == Convention::kHalved) m *= 0.5;
  return embed(m, site);
}

SpinOperator collective_jump(Direction dir, Convention conv) {
  const Mat8 m = ladder(1, dir, conv).matrix() *
                 (ladder(2, dir, conv).matrix() - ladder(3, dir, conv).matrix());
  return SpinOperator(m);
}

Mat8 swap23() {
  Mat8 s = Mat8::Zero();
  for (int idx = 0; idx < kDim; ++idx) {
    const int b2 = (idx >> 1) & 1;
    const int b3 = idx & 1;
    const int swapped = (idx & 4) | (b3 << 1) | b2;
    s(swapped, idx) = 1.0;
  }
  return s;
}

Vec8 product_state(std::string_view spins) {
  if (spins.size() != kSites) {
    throw ValidationError("product_state: expected three characters");
  }
  int idx = 0;
  for (char c : spins) {
    if (c != 'u' && c != 'd') {
      throw ValidationError("product_state: characters must be 'u' or 'd'");
    }
    idx = (idx << 1) | (c == 'd' ? 1 : 0);
  }
  Vec8 v = Vec8::Zero();
  v(idx) = 1.0;
  return v;
}

}  // namespace trispin

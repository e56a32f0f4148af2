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

#include "trispin/liouvillian.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "trispin/errors.hpp"

namespace trispin {

DensityMatrix::DensityMatrix(const Mat8& m) : matrix_(m) {
  constexpr double kTol = 1e-10;
  if (hermiticity_defect(m) > kTol) {
    throw ValidationError("DensityMatrix: not Hermitian");
  }
  if (std::abs(m.trace() - cplx(1.0)) > kTol) {
    throw ValidationError("DensityMatrix: trace is not 1");
  }
  const Mat8 herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat8> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kTol) {
    throw ValidationError("DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Mat8::Identity() / double(kDim));
}

DensityMatrix DensityMatrix::pure(const Vec8& psi) {
  const Vec8 u = psi.normalized();
  return DensityMatrix(u * u.adjoint());
}

std::vector<JumpChannel> jump_channels(const ModelParams& p) {
  validate(p);
  const auto conv = p.convention;
  std::vector<JumpChannel> out;
  auto add = [&out](std::string name, SpinOperator op, double rate, int w) {
    if (rate > 0.0) out.push_back({std::move(name), std::move(op), rate, w});
  };
  // Factor 2 from the 2 L rho L^+ normalization of D[L].
  add("collective_emission", collective_jump(Direction::kLower, conv),
      2.0 * p.gamma_coll * (p.nbar + 1.0), +1);
  add("collective_absorption", collective_jump(Direction::kRaise, conv),
      2.0 * p.gamma_coll * p.nbar, -1);
  for (int site = 1; site <= kSites; ++site) {
    add("single_emission_" + std::to_string(site),
        ladder(site, Direction::kLower, conv),
        2.0 * p.gamma_single * (p.nbar + 1.0), 0);
  }
  for (int site = 1; site <= kSites; ++site) {
    add("single_absorption_" + std::to_string(site),
        ladder(site, Direction::kRaise, conv), 2.0 * p.gamma_single * p.nbar,
        0);
  }
  return out;
}

SuperVector vectorize(const Mat8& rho) {
  SuperVector v(kSuperDim);
  for (int c = 0; c < kDim; ++c) {
    for (int r = 0; r < kDim; ++r) v(c * kDim + r) = rho(r, c);
  }
  return v;
}

Mat8 unvectorize(const SuperVector& v) {
  if (v.size() != kSuperDim) {
    throw ValidationError("unvectorize: expected 64 entries, got " +
                          std::to_string(v.size()));
  }
  Mat8 m;
  for (int c = 0; c < kDim; ++c) {
    for (int r = 0; r < kDim; ++r) m(r, c) = v(c * kDim + r);
  }
  return m;
}

SuperMatrix sandwich(const Mat8& a, const Mat8& b) {
  // (B^T (x) A)[(j,i),(l,k)] = B(l,j) A(i,k) with row index j*8+i.
  SuperMatrix out(kSuperDim, kSuperDim);
  for (int j = 0; j < kDim; ++j) {
    for (int l = 0; l < kDim; ++l) {
      out.block(j * kDim, l * kDim, kDim, kDim) = b(l, j) * a;
    }
  }
  return out;
}

SuperMatrix dissipator(const SpinOperator& jump) {
  const Mat8& l = jump.matrix();
  const Mat8 ldl = l.adjoint() * l;
  const Mat8 id = Mat8::Identity();
  return 2.0 * sandwich(l, l.adjoint()) - sandwich(ldl, id) -
         sandwich(id, ldl);
}

SuperMatrix commutator_part(const SpinOperator& h) {
  if (hermiticity_defect(h.matrix()) >= 1e-12) {
    throw ValidationError("commutator_part: Hamiltonian is not Hermitian");
  }
  const cplx minus_i(0.0, -1.0);
  const Mat8 id = Mat8::Identity();
  return minus_i * (sandwich(h.matrix(), id) - sandwich(id, h.matrix()));
}

namespace {

SuperMatrix untilted(const ModelParams& p) {
  SuperMatrix w = commutator_part(build_hamiltonian(p));
  for (const auto& ch : jump_channels(p)) {
    w += (0.5 * ch.rate) * dissipator(ch.op);
  }
  return w;
}

}  // namespace

Superoperator build_generator(const ModelParams& p) {
  return Superoperator{untilted(p), 0.0, p};
}

Superoperator tilt_generator(const ModelParams& p, double s) {
  if (!std::isfinite(s)) throw ValidationError("tilt_generator: s not finite");
  SuperMatrix w = untilted(p);
  for (const auto& ch : jump_channels(p)) {
    if (ch.count_weight == 0) continue;
    const double factor = std::exp(-ch.count_weight * s) - 1.0;
    const Mat8& l = ch.op.matrix();
    w += (ch.rate * factor) * sandwich(l, l.adjoint());
  }
  return Superoperator{std::move(w), s, p};
}

SuperMatrix tilt_derivative(const ModelParams& p, double s) {
  SuperMatrix d = SuperMatrix::Zero(kSuperDim, kSuperDim);
  for (const auto& ch : jump_channels(p)) {
    if (ch.count_weight == 0) continue;
    const double factor = -ch.count_weight * std::exp(-ch.count_weight * s);
    const Mat8& l = ch.op.matrix();
    d += (ch.rate * factor) * sandwich(l, l.adjoint());
  }
  return d;
}

SuperMatrix no_jump_generator(const ModelParams& p) {
  SuperMatrix w = untilted(p);
  for (const auto& ch : jump_channels(p)) {
    if (ch.count_weight == 0) continue;
    const Mat8& l = ch.op.matrix();
    w -= ch.rate * sandwich(l, l.adjoint());
  }
  return w;
}

Mat8 apply_generator(const Superoperator& g, const Mat8& rho) {
  if (g.matrix.rows() != kSuperDim || g.matrix.cols() != kSuperDim) {
    throw ValidationError("apply_generator: superoperator must be 64x64");
  }
  return unvectorize(g.matrix * vectorize(rho));
}

Eigen::RowVectorXcd trace_functional() {
  return vectorize(Mat8::Identity()).transpose();
}

}  // namespace trispin

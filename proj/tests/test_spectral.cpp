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

#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "oracles.hpp"
#include "trispin/errors.hpp"
#include "trispin/spectral.hpp"

using namespace trispin;

namespace {

ModelParams with_convention(ModelParams p, Convention c) {
  p.convention = c;
  return p;
}

// 2 Gamma [(n+1) <s+ s-> - n <s- s+>] in the stationary state.
double stationary_net_rate(const ModelParams& p, const Mat8& rho) {
  const Mat8 sm = collective_jump(Direction::kLower, p.convention).matrix();
  const Mat8 sp = collective_jump(Direction::kRaise, p.convention).matrix();
  return 2.0 * p.gamma_coll *
         ((p.nbar + 1.0) * (sp * sm * rho).trace().real() -
          p.nbar * (sm * sp * rho).trace().real());
}

}  // namespace

TEST_CASE("leading eigenvalue skips oscillating ties") {
  Eigen::VectorXcd ev(4);
  ev << cplx(0.0, 20.0), cplx(-1e-12, 0.0), cplx(0.0, -20.0), cplx(-1.0, 0.0);
  const auto lead = leading_eigenvalue(ev);
  CHECK(lead.index == 1);
  CHECK(lead.gap == doctest::Approx(1.0).epsilon(1e-9));

  Eigen::VectorXcd bad(2);
  bad << cplx(1.0, 1.0), cplx(1.0, -1.0);
  CHECK_THROWS_AS(leading_eigenvalue(bad), NumericalError);
}

TEST_CASE("theta(0) vanishes for every parameter set") {
  for (double gs : {0.0, 0.0005}) {
    for (double nbar : {0.0, 1.0, 2.0, 5.0}) {
      CHECK(std::abs(dynamical_free_energy(paper_params(nbar, gs), 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("gamma=0, nbar=0: theta is flat for s >= 0") {
  const auto p = paper_params();
  for (double s : linear_grid(0.0, 1.0, 11)) {
    CHECK(std::abs(dynamical_free_energy(p, s)) < 1e-10);
  }
  CHECK(std::abs(activity_fd(p, 0.5)) < 1e-8);
}

TEST_CASE("theta(-0.1) regression anchors") {
  const auto p = paper_params();
  const double halved = dynamical_free_energy(p, -0.1);
  CHECK(halved > 0.0);
  CHECK(halved == doctest::Approx(0.007199403116705497).epsilon(1e-9));
  const double unhalved =
      dynamical_free_energy(with_convention(p, Convention::kUnhalved), -0.1);
  CHECK(unhalved == doctest::Approx(0.11405989522028824).epsilon(1e-9));
}

TEST_CASE("finite difference and Hellmann-Feynman activities agree") {
  const ModelParams sets[] = {paper_params(0.0, 0.0005), paper_params(2.0, 0.0005),
                              paper_params(0.0), paper_params(5.0)};
  for (const auto& p : sets) {
    for (double s : {-0.3, -0.05}) {
      const double hf = activity_hf(p, s);
      const double fd = activity_fd(p, s);
      CHECK(std::abs(fd - hf) / std::abs(hf) < 1e-6);
      CHECK(std::abs(activity_fd_richardson(p, s) - hf) / std::abs(hf) < 1e-7);
    }
  }
  const auto damped = paper_params(1.0, 0.0005);
  CHECK(std::abs(activity_fd(damped, 0.0) - activity_hf(damped, 0.0)) /
            std::abs(activity_hf(damped, 0.0)) <
        1e-6);
}

TEST_CASE("Hellmann-Feynman activity equals the stationary jump balance") {
  for (double nbar : {0.0, 1.0, 5.0}) {
    const auto p = paper_params(nbar, 0.0005);
    const auto ss = steady_state(p);
    CHECK(activity_hf(p, 0.0) ==
          doctest::Approx(stationary_net_rate(p, ss.rho.matrix())).epsilon(1e-8));
  }
}

TEST_CASE("activity grows as s decreases") {
  const auto p = paper_params();
  double prev = activity_hf(p, -0.01);
  CHECK(prev > 0.0);
  for (double s : {-0.1, -0.5, -1.0, -2.0}) {
    const double k = activity_hf(p, s);
    CHECK(k > prev);
    prev = k;
  }
}

TEST_CASE("kink handling in the derivative routines") {
  const auto p = paper_params();
  CHECK_THROWS_AS(activity_fd(p, 0.0), KinkStraddleError);
  CHECK_THROWS_AS(activity_hf(p, 0.5), DegeneracyError);
  const std::vector<double> kinks{0.0};
  CHECK_THROWS_AS(activity_fd(p, 5e-5, 1e-4, kinks), KinkStraddleError);
  CHECK_NOTHROW(activity_fd(p, -0.3, 1e-4, kinks));
  CHECK_THROWS_AS(activity_fd(p, -0.3, 0.0), ValidationError);
  CHECK(local_activity(p, 0.5) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("scan at gamma=0, nbar=0 has a single kink at the origin") {
  const auto scan = theta_scan(paper_params(), linear_grid(-1.0, 1.0, 51));
  REQUIRE(scan.kinks.size() == 1);
  const auto& k = scan.kinks[0];
  CHECK(std::abs(k.s_star) < 1e-6);
  CHECK(k.k_left > 0.0);
  CHECK(k.k_left == doctest::Approx(activity_hf(paper_params(), -1e-6)));
  CHECK(std::abs(k.k_right) < 1e-6);
  CHECK(k.delta_k == doctest::Approx(k.k_left - k.k_right));
}

TEST_CASE("scan at gamma=0, nbar>0 finds the second kink at s0") {
  for (double nbar : {1.0, 2.0, 5.0}) {
    const double s0 = gc_symmetry_point(nbar);
    const auto scan = theta_scan(paper_params(nbar), linear_grid(-s0, 2 * s0, 40));
    REQUIRE(scan.kinks.size() == 2);
    CHECK(std::abs(scan.kinks[0].s_star) < 1e-6);
    CHECK(scan.kinks[1].s_star == doctest::Approx(s0).epsilon(1e-6));
    // Symmetric jumps: the active branch re-enters with the opposite sign.
    CHECK(scan.kinks[1].k_right == doctest::Approx(-scan.kinks[0].k_left).epsilon(1e-4));
  }
  const auto scan2 = theta_scan(paper_params(2.0), linear_grid(-1.0, 1.0, 51));
  REQUIRE(scan2.kinks.size() == 2);
  CHECK(scan2.kinks[1].s_star == doctest::Approx(std::log(1.5)).epsilon(1e-6));
}

TEST_CASE("single-spin damping removes the kinks") {
  for (double nbar : {0.0, 1.0, 2.0, 5.0}) {
    const auto scan = theta_scan(paper_params(nbar, 0.0005), linear_grid(-1.0, 1.0, 51));
    CHECK(scan.kinks.empty());
  }
}

TEST_CASE("detect_kinks on synthetic data") {
  ScanResult linear;
  linear.s_values = linear_grid(-1.0, 1.0, 21);
  for (double s : linear.s_values) {
    linear.theta.push_back(2.0 - 3.0 * s);
    linear.activity.push_back(3.0);
  }
  CHECK(detect_kinks(linear, 0.01).empty());

  ScanResult corner;
  corner.s_values = linear_grid(-1.0, 1.0, 20);
  for (double s : corner.s_values) {
    corner.theta.push_back(s < 0.0 ? -s + 0.1 * s * s : 0.1 * s * s);
    corner.activity.push_back(s < 0.0 ? 1.0 - 0.2 * s : -0.2 * s);
  }
  const auto kinks = detect_kinks(corner, 0.01);
  REQUIRE(kinks.size() == 1);
  CHECK(std::abs(kinks[0].s_star) < 0.06);
  CHECK(kinks[0].delta_k > 0.9);
}

TEST_CASE("scan rejects bad grids") {
  const std::vector<double> unsorted{0.0, -0.1};
  CHECK_THROWS_AS(theta_scan(paper_params(), unsorted), ValidationError);
  CHECK_THROWS_AS(linear_grid(1.0, 0.0, 5), ValidationError);
}

TEST_CASE("theta is convex away from kinks") {
  for (double gs : {0.0, 0.0005}) {
    const auto scan = theta_scan(paper_params(1.0, gs), linear_grid(-1.0, -0.02, 30));
    for (std::size_t i = 1; i + 1 < scan.theta.size(); ++i) {
      const double d2 = scan.theta[i + 1] - 2 * scan.theta[i] + scan.theta[i - 1];
      CHECK(d2 >= -1e-8);
    }
  }
}

TEST_CASE("Gallavotti-Cohen symmetry") {
  CHECK(gc_symmetry_point(1.0) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(gc_symmetry_point(0.0), ValidationError);
  for (double nbar : {1.0, 2.0, 5.0}) {
    const double s0 = gc_symmetry_point(nbar);
    CHECK(gc_residual(paper_params(nbar), linear_grid(-s0, 2 * s0, 31)) < 1e-8);
  }
  CHECK(gc_residual(paper_params(5.0), linear_grid(-0.2, 0.4, 31)) < 1e-8);
  CHECK(gc_residual(paper_params(5.0, 0.0005), linear_grid(-0.2, 0.4, 31)) > 1e-6);
  CHECK_THROWS_AS(gc_residual(paper_params(0.0), linear_grid(-0.2, 0.4, 5)),
                  ValidationError);
}

TEST_CASE("k(0) decreases with nbar and changes sign under damping") {
  for (double gs : {0.0005, 0.05}) {
    double prev = activity_hf(paper_params(0.0, gs), 0.0);
    for (double nbar : {1.0, 2.0, 5.0}) {
      const double k = activity_hf(paper_params(nbar, gs), 0.0);
      CHECK(k < prev);
      prev = k;
    }
  }
  // Regression anchor for the sign change at gamma = Gamma (halved ladder).
  auto f = [](double nbar) { return activity_hf(paper_params(nbar, 0.05), 0.0); };
  CHECK(f(50.0) > 0.0);
  CHECK(f(200.0) < 0.0);
  boost::uintmax_t iters = 100;
  const auto bracket = boost::math::tools::toms748_solve(
      f, 50.0, 200.0, boost::math::tools::eps_tolerance<double>(40), iters);
  const double nstar = 0.5 * (bracket.first + bracket.second);
  CHECK(nstar == doctest::Approx(104.364674198).epsilon(1e-8));
  // Without single-spin damping the balance never inverts.
  CHECK(activity_hf(paper_params(200.0), -1e-6) > 0.0);
}

TEST_CASE("steady state") {
  const auto p = paper_params(0.0, 0.0005);
  const auto ss = steady_state(p);
  CHECK(ss.null_dimension == 1);
  CHECK(ss.residual < 1e-10);
  const Mat8 w_rho = apply_generator(build_generator(p), ss.rho.matrix());
  CHECK(w_rho.cwiseAbs().maxCoeff() < 1e-10);

  const auto undamped = steady_state(paper_params());
  CHECK(undamped.null_dimension >= 2);

  auto closed = paper_params();
  closed.gamma_coll = 0.0;
  CHECK_THROWS_AS(steady_state(closed), NumericalError);
}

TEST_CASE("ergodic average is stationary and trace preserving") {
  const auto p = paper_params();
  const Mat8 rho0 = oracle::random_density(21);
  const Mat8 avg = ergodic_average(p, rho0);
  CHECK(std::abs(avg.trace() - cplx(1.0)) < 1e-10);
  CHECK(apply_generator(build_generator(p), avg).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ergodic_average(p, avg) - avg).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dark subspace") {
  const auto p = paper_params();
  const auto d = dark_subspace(p);
  CHECK(d.dimension == 2);
  CHECK(double(d.dimension) / 8.0 == doctest::Approx(0.25));
  CHECK(d.jump_residual < 1e-10);
  CHECK(d.invariance_residual < 1e-10);
  REQUIRE(d.energies.size() == 2);
  // Closed form for the exchange-odd sector: -1 +- sqrt(alpha^2 + B^2).
  const double r = std::hypot(p.alpha, p.b_field);
  CHECK(d.energies[0] == doctest::Approx(-1.0 - r).epsilon(1e-10));
  CHECK(d.energies[1] == doctest::Approx(-1.0 + r).epsilon(1e-10));
  for (double e : d.energies) CHECK(std::abs(e) > 1e-3);
  CHECK(d.lowering1_min_singular > 1e-10);
  CHECK(d.single_site_kernel_dimension == 0);

  // Independent check: the 2-3 difference in the jump operators kills
  // states symmetric in sites 2 and 3, so dark vectors are exchange-even.
  const Mat8 h = oracle::hamiltonian(p.alpha, p.b_field);
  const Mat8 swap = swap23();
  for (int c = 0; c < d.dimension; ++c) {
    const Vec8 v = d.basis.col(c);
    CHECK((swap * v - v).norm() < 1e-10);
  }
  const Mat8 proj = d.projector();
  CHECK((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(((Mat8::Identity() - proj) * h * proj).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(proj.trace().real() == doctest::Approx(2.0));
}

TEST_CASE("active steady state carries no dark weight") {
  const auto p = paper_params();
  const auto rho = active_steady_state(p).matrix();
  const Mat8 proj = dark_subspace(p).projector();
  CHECK(std::abs((proj * rho).trace()) < 1e-10);
  CHECK(apply_generator(build_generator(p), rho).cwiseAbs().maxCoeff() < 1e-10);
  // Its net emission rate is the active plateau k(0-).
  CHECK(stationary_net_rate(p, rho) ==
        doctest::Approx(activity_hf(p, -1e-6)).epsilon(1e-4));
}

/*
 Copyright 2026 The flatopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "flatopt/cost.hpp"
#include "flatopt/errors.hpp"
#include "flatopt/euler_lagrange.hpp"
#include "flatopt/simulate.hpp"
#include "flatopt/tpbvp.hpp"
#include "test_support.hpp"

using namespace flatopt;

namespace {

QuadraticJetForm dc_motor_form(double y_f) {
  return shifted_form({{0, 1.0, y_f}, {1, 1.0, 0.0}, {0, 1.0, 0.0}}) +
         variable_penalty(dc_motor_flat_map(DcMotorParams{}), "u", 1.0);
}

EulerLagrangeOde ode_of(std::vector<double> coeffs, double rhs) {
  EulerLagrangeOde ode;
  ode.coeffs = std::move(coeffs);
  ode.rhs = rhs;
  return ode;
}

// Oracle: the companion system x' = A x with z = x_0, solved through the
// matrix exponential (homogeneous part) plus the constant particular value.
class ExpmOracle {
 public:
  ExpmOracle(const EulerLagrangeOde& ode, const BoundaryData& bc, double T)
      : n_(ode.order()), A_(Eigen::MatrixXd::Zero(n_, n_)) {
    for (int i = 0; i + 1 < n_; ++i) A_(i, i + 1) = 1.0;
    for (int k = 0; k < n_; ++k) A_(n_ - 1, k) = -ode.coeffs[static_cast<std::size_t>(k)];
    zp_ = ode.rhs / ode.coeffs[0];
    const int nu = n_ / 2;
    const Eigen::MatrixXd E = Eigen::MatrixXd(A_ * T).exp();
    Eigen::MatrixXd M(n_, n_);
    Eigen::VectorXd rhs(n_);
    for (int d = 0; d < nu; ++d) {
      M.row(d) = Eigen::RowVectorXd::Unit(n_, d);
      M.row(nu + d) = E.row(d);
      rhs(d) = bc.at0[static_cast<std::size_t>(d)] - (d == 0 ? zp_ : 0.0);
      rhs(nu + d) = bc.atT[static_cast<std::size_t>(d)] - (d == 0 ? zp_ : 0.0);
    }
    x0_ = M.fullPivLu().solve(rhs);
  }
  double value(double t, int deriv) const {
    const Eigen::VectorXd x = Eigen::MatrixXd(A_ * t).exp() * x0_;
    return x(deriv) + (deriv == 0 ? zp_ : 0.0);
  }

 private:
  int n_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd x0_;
  double zp_ = 0.0;
};

bool contains(const std::vector<RootCluster>& cl, std::complex<double> z, int mult,
              double tol) {
  return std::any_of(cl.begin(), cl.end(), [&](const RootCluster& c) {
    return std::abs(c.root - z) <= tol && c.multiplicity == mult;
  });
}

}  // namespace

TEST(CharacteristicRoots, SimplePair) {
  const auto cl = characteristic_roots(ode_of({-1.0, 0.0, 1.0}, 0.0));
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_TRUE(contains(cl, 1.0, 1, 1e-12));
  EXPECT_TRUE(contains(cl, -1.0, 1, 1e-12));
}

TEST(CharacteristicRoots, QuadrupleZero) {
  const auto ode = derive_el(shifted_form({{2, 1.0, 0.0}}));
  const auto cl = characteristic_roots(ode);
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_EQ(cl[0].multiplicity, 4);
  EXPECT_EQ(cl[0].root, std::complex<double>(0.0, 0.0));
}

TEST(CharacteristicRoots, DcMotorSymmetricPairs) {
  const auto cl = characteristic_roots(derive_el(dc_motor_form(100.0)));
  ASSERT_EQ(cl.size(), 4u);
  for (const auto& c : cl) {
    EXPECT_NEAR(c.root.imag(), 0.0, 1e-9 * std::abs(c.root));
    EXPECT_TRUE(contains(cl, -c.root, 1, 1e-6 * std::abs(c.root)));
  }
}

TEST(CharacteristicRoots, ZeroPolynomialRejected) {
  EXPECT_THROW(characteristic_roots(ode_of({}, 0.0)), std::exception);
}

TEST(CharacteristicRoots, PropertyRootSetSymmetric) {
  check::Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int nu = rng.integer(1, 4);
    const QuadraticJetForm form(rng.spd(nu + 1, 0.2, 2.0), Eigen::VectorXd::Zero(nu + 1), 0.0);
    const auto cl = characteristic_roots(derive_el(form));
    int total = 0;
    for (const auto& c : cl) {
      total += c.multiplicity;
      const double tol = 1e-6 * std::max(1.0, std::abs(c.root));
      EXPECT_TRUE(contains(cl, -c.root, c.multiplicity, tol)) << c.root;
      EXPECT_TRUE(contains(cl, std::conj(c.root), c.multiplicity, tol)) << c.root;
    }
    EXPECT_EQ(total, 2 * nu);
  }
}

TEST(BuildBasis, AnchoringRule) {
  const double T = 1.0;
  const auto basis = build_basis({{-1.0, 1}, {1.0, 1}}, T);
  ASSERT_EQ(basis.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& m = basis.modes()[i];
    for (double t : {0.0, 0.3, 1.0}) {
      const double want = m.root.real() > 0 ? std::exp(t - T) : std::exp(-t);
      EXPECT_NEAR(basis.value(i, t, 0), want, 1e-15);
    }
    EXPECT_EQ(m.anchored_at_end, m.root.real() > 0);
  }
}

TEST(BuildBasis, DoubleZeroRoot) {
  const auto basis = build_basis({{0.0, 2}}, 5.0);
  ASSERT_EQ(basis.size(), 2u);
  EXPECT_EQ(basis.value(0, 3.0, 0), 1.0);
  EXPECT_EQ(basis.value(1, 3.0, 0), 3.0);
  EXPECT_EQ(basis.value(1, 3.0, 1), 1.0);
  EXPECT_EQ(basis.value(1, 3.0, 2), 0.0);
}

TEST(BuildBasis, ComplexPair) {
  const auto basis = build_basis({{{0.0, 1.0}, 1}, {{0.0, -1.0}, 1}}, 2.0);
  ASSERT_EQ(basis.size(), 2u);
  for (double t : {0.0, 0.7, 2.0}) {
    EXPECT_NEAR(basis.value(0, t, 0), std::cos(t), 1e-15);
    EXPECT_NEAR(basis.value(1, t, 0), std::sin(t), 1e-15);
    EXPECT_NEAR(basis.value(1, t, 1), std::cos(t), 1e-15);
  }
}

TEST(BuildBasis, PropertyDerivativesMatchFiniteDifferences) {
  const auto basis = build_basis({{{-0.5, 2.0}, 2}, {{-0.5, -2.0}, 2}, {1.5, 1}, {0.0, 2}}, 2.0);
  ASSERT_EQ(basis.size(), 7u);
  const double h = 1e-5;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (double t : {0.2, 1.1, 1.9})
      for (int d = 0; d < 3; ++d) {
        const double fd = (basis.value(i, t + h, d) - basis.value(i, t - h, d)) / (2 * h);
        EXPECT_NEAR(basis.value(i, t, d + 1), fd, 1e-6 * (1.0 + std::abs(fd)));
      }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double fd =
        (basis.antiderivative(i, 1.0 + h) - basis.antiderivative(i, 1.0 - h)) / (2 * h);
    EXPECT_NEAR(basis.value(i, 1.0, 0), fd, 1e-7);
  }
}

TEST(ParticularSolution, Examples) {
  EXPECT_DOUBLE_EQ(particular_solution(ode_of({-1.0, 0.0, 1.0}, -1.0)), 1.0);
  EXPECT_EQ(particular_solution(ode_of({0.0, 0.0, 1.0}, 0.0)), 0.0);
  EXPECT_THROW(particular_solution(ode_of({0.0, 0.0, 1.0}, 2.0)), NumericalError);
}

TEST(ParticularSolution, DcMotorMinimizesPointwiseIntegrand) {
  const double y_f = 100.0;
  const auto form = dc_motor_form(y_f);
  const double zp = particular_solution(derive_el(form));
  // Scalar oracle: golden-section minimization of L(y, 0, 0).
  const auto L = [&](double y) {
    const std::vector<double> jet{y, 0.0, 0.0};
    return evaluate_lagrangian(form, jet);
  };
  double lo = 0.0;
  double hi = y_f;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo);
    const double b = lo + g * (hi - lo);
    (L(a) < L(b) ? hi : lo) = (L(a) < L(b) ? b : a);
  }
  EXPECT_NEAR(zp, 0.5 * (lo + hi), 1e-6);
  const double u0 = dc_motor_flat_map(DcMotorParams{}).row("u")[0];
  EXPECT_NEAR(zp, y_f / (2.0 + u0 * u0), 1e-10);
}

TEST(SolveTpbvp, SinhSolution) {
  const double T = 1.7;
  const auto sol = solve_tpbvp(ode_of({-1.0, 0.0, 1.0}, 0.0), BoundaryData{{0.0}, {1.0}}, T);
  for (double t : {0.0, 0.4, 1.0, T}) {
    EXPECT_NEAR(sol.value(t, 0), std::sinh(t) / std::sinh(T), 1e-14);
    EXPECT_NEAR(sol.value(t, 1), std::cosh(t) / std::sinh(T), 1e-14);
  }
  const auto traj = eval_solution(sol, 101, 2);
  EXPECT_NEAR(traj["z"].back(), 1.0, 1e-15);
  EXPECT_NEAR(sol.integral(0.0, T), (std::cosh(T) - 1.0) / std::sinh(T), 1e-14);
}

TEST(SolveTpbvp, StraightLine) {
  const auto sol = solve_tpbvp(ode_of({0.0, 0.0, 1.0}, 0.0), BoundaryData{{0.0}, {1.0}}, 1.0);
  const auto traj = eval_solution(sol, 11, 1);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_NEAR(traj["z"][k], traj.time(k), 1e-15);
    EXPECT_NEAR(traj["z_dot"][k], 1.0, 1e-15);
  }
}

TEST(SolveTpbvp, SingularBoundaryMatrixRejected) {
  // z'' + z = 0 with z(0) = 0, z(pi) = 1 has no solution.
  try {
    solve_tpbvp(ode_of({1.0, 0.0, 1.0}, 0.0), BoundaryData{{0.0}, {1.0}}, std::numbers::pi);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("condition"), std::string::npos) << what;
    EXPECT_NE(what.find("determinant"), std::string::npos) << what;
  }
}

TEST(SolveTpbvp, UnanchoredBasisOverflowsForFastModes) {
  const auto ode = derive_el(dc_motor_form(100.0));
  const BoundaryData bc{{0.0, 0.0}, {100.0, 0.0}};
  EXPECT_THROW(solve_tpbvp(ode, bc, 6.0, TpbvpOptions{1e12, Anchoring::kOrigin}), NumericalError);
  const auto sol = solve_tpbvp(ode, bc, 6.0);
  EXPECT_LT(sol.condition_estimate, 1e6);
}

TEST(SolveTpbvp, DcMotorResiduals) {
  const double y_f = 100.0;
  const auto ode = derive_el(dc_motor_form(y_f));
  const BoundaryData bc{{0.0, 0.0}, {y_f, 0.0}};
  const double T = 3.0;
  const auto sol = solve_tpbvp(ode, bc, T);
  for (int d = 0; d < 2; ++d) {
    EXPECT_LT(std::abs(sol.value(0.0, d) - bc.at0[static_cast<std::size_t>(d)]), 1e-9 * y_f);
    EXPECT_LT(std::abs(sol.value(T, d) - bc.atT[static_cast<std::size_t>(d)]), 1e-9 * y_f);
  }
  double coeff_norm = 0.0;
  for (double c : ode.coeffs) coeff_norm = std::max(coeff_norm, std::abs(c));
  const std::size_t n = quadrature_samples(sol);
  const auto traj = eval_solution(sol, n, 4);
  double residual = 0.0;
  double znorm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double acc = -ode.rhs;
    for (int d = 0; d <= 4; ++d) acc += ode.coeffs[static_cast<std::size_t>(d)] * traj[jet_channel_name(d)][k];
    residual = std::max(residual, std::abs(acc));
    znorm = std::max(znorm, std::abs(traj["z"][k]));
  }
  EXPECT_LE(residual, 1e-6 * coeff_norm * znorm);

  // u*(0+) is finite and the flat map reproduces it.
  auto jets = eval_solution(sol, 3001, 2);
  append_flat_variables(dc_motor_flat_map(DcMotorParams{}), jets);
  ASSERT_TRUE(jets.has("u_star"));
  EXPECT_TRUE(std::isfinite(jets["u_star"][0]));
  EXPECT_TRUE(jets.has("x2"));
}

TEST(SolveTpbvp, PropertyMatchesMatrixExponentialOracle) {
  check::Rng rng(67);
  for (int trial = 0; trial < 40; ++trial) {
    const int nu = rng.integer(1, 3);
    const QuadraticJetForm form(rng.spd(nu + 1, 0.3, 2.0),
                                Eigen::VectorXd::NullaryExpr(nu + 1, [&] { return rng.uniform(-2, 2); }),
                                0.0);
    const auto ode = derive_el(form);
    const BoundaryData bc{rng.vector(static_cast<std::size_t>(nu), -1, 1),
                          rng.vector(static_cast<std::size_t>(nu), -1, 1)};
    const double T = rng.uniform(0.3, 2.0);
    const auto sol = solve_tpbvp(ode, bc, T);
    const ExpmOracle oracle(ode, bc, T);
    for (double s : {0.0, 0.25, 0.5, 0.9, 1.0})
      for (int d = 0; d < nu; ++d) {
        const double want = oracle.value(s * T, d);
        EXPECT_NEAR(sol.value(s * T, d), want, 1e-7 * (1.0 + std::abs(want))) << trial;
      }
  }
}

TEST(SolveTpbvp, PropertyResidualsWithinTolerance) {
  check::Rng rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const int nu = rng.integer(1, 3);
    const QuadraticJetForm form(rng.spd(nu + 1, 0.05, 5.0),
                                Eigen::VectorXd::NullaryExpr(nu + 1, [&] { return rng.uniform(-5, 5); }),
                                0.0);
    const auto ode = derive_el(form);
    const BoundaryData bc{rng.vector(static_cast<std::size_t>(nu), -10, 10),
                          rng.vector(static_cast<std::size_t>(nu), -10, 10)};
    const double T = rng.uniform(0.5, 8.0);
    const auto sol = solve_tpbvp(ode, bc, T);
    double bc_norm = 1.0;
    for (double v : bc.at0) bc_norm = std::max(bc_norm, std::abs(v));
    for (double v : bc.atT) bc_norm = std::max(bc_norm, std::abs(v));
    for (int d = 0; d < nu; ++d) {
      EXPECT_LE(std::abs(sol.value(0.0, d) - bc.at0[static_cast<std::size_t>(d)]), 1e-9 * bc_norm);
      EXPECT_LE(std::abs(sol.value(T, d) - bc.atT[static_cast<std::size_t>(d)]), 1e-9 * bc_norm);
    }
    const auto traj = eval_solution(sol, 501, 2 * nu);
    double residual = 0.0;
    double znorm = 0.0;
    double cnorm = 0.0;
    for (double c : ode.coeffs) cnorm = std::max(cnorm, std::abs(c));
    for (std::size_t k = 0; k < traj.size(); ++k) {
      double acc = -ode.rhs;
      for (int d = 0; d <= 2 * nu; ++d) acc += ode.coeffs[static_cast<std::size_t>(d)] * traj[jet_channel_name(d)][k];
      residual = std::max(residual, std::abs(acc));
      znorm = std::max(znorm, std::abs(traj["z"][k]));
    }
    EXPECT_LE(residual, 1e-6 * cnorm * znorm) << trial;
  }
}

TEST(SolveTpbvp, PropertyBasisIndependence) {
  check::Rng rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    const int nu = rng.integer(1, 3);
    const QuadraticJetForm form(rng.spd(nu + 1, 0.3, 2.0),
                                Eigen::VectorXd::NullaryExpr(nu + 1, [&] { return rng.uniform(-2, 2); }),
                                0.0);
    const auto ode = derive_el(form);
    const BoundaryData bc{rng.vector(static_cast<std::size_t>(nu), -1, 1),
                          rng.vector(static_cast<std::size_t>(nu), -1, 1)};
    const double T = rng.uniform(0.2, 1.0);
    const auto a = solve_tpbvp(ode, bc, T, TpbvpOptions{1e12, Anchoring::kSplit});
    const auto b = solve_tpbvp(ode, bc, T, TpbvpOptions{1e12, Anchoring::kOrigin});
    for (double s : {0.1, 0.5, 0.8}) {
      const double za = a.value(s * T);
      EXPECT_NEAR(za, b.value(s * T), 1e-6 * std::max(1.0, std::abs(za)));
    }
  }
}

TEST(HorizonScan, PureVelocityCostIsMonotone) {
  const auto form = shifted_form({{1, 1.0, 0.0}});
  const HorizonProblem prob{derive_el(form), BoundaryData{{0.0}, {1.0}}, form};
  const auto scan = horizon_scan(prob, uniform_grid(0.5, 4.0, 0.5));
  ASSERT_EQ(scan.horizons.size(), 8u);
  for (std::size_t i = 0; i < scan.horizons.size(); ++i) {
    EXPECT_NEAR(scan.costs[i], 1.0 / scan.horizons[i], 1e-10);
    if (i > 0) EXPECT_LT(scan.costs[i], scan.costs[i - 1]);
  }
  EXPECT_FALSE(scan.bracketed);
  EXPECT_DOUBLE_EQ(scan.T0, 4.0);
}

TEST(HorizonScan, InteriorMinimumRefined) {
  // L = z'^2 + r with z(0) = 0, z(T) = 1: J(T) = 1/T + r T, minimum at 1/sqrt(r).
  QuadraticJetForm form = shifted_form({{1, 1.0, 0.0}});
  form.r = 0.3;
  const HorizonProblem prob{derive_el(form), BoundaryData{{0.0}, {1.0}}, form};
  const auto scan = horizon_scan(prob, uniform_grid(0.5, 6.0, 0.1));
  ASSERT_TRUE(scan.bracketed);
  const double T0 = 1.0 / std::sqrt(0.3);
  EXPECT_NEAR(scan.T0, T0, 2e-3 * T0);
  EXPECT_NEAR(scan.J0, 2.0 * std::sqrt(0.3), 1e-6);
}

TEST(HorizonScan, PropertyHomogeneityAndArgminInvariance) {
  const auto form1 = dc_motor_form(1.0);
  const HorizonProblem p1{derive_el(form1), BoundaryData{{0.0, 0.0}, {1.0, 0.0}}, form1};
  for (double lambda : {10.0, 100.0}) {
    const auto form = dc_motor_form(lambda);
    const HorizonProblem p{derive_el(form), p1.bc.scaled(lambda), form};
    for (double T : {0.8, 2.3, 4.0})
      EXPECT_NEAR(optimal_cost(p, T) / optimal_cost(p1, T), lambda * lambda, 1e-8 * lambda * lambda);
  }
  const auto grid = uniform_grid(0.5, 6.0, 0.1);
  const auto s1 = horizon_scan(p1, grid);
  const auto form10 = dc_motor_form(10.0);
  const auto s10 = horizon_scan(HorizonProblem{derive_el(form10), p1.bc.scaled(10.0), form10}, grid);
  EXPECT_NEAR(s1.T0, s10.T0, 1e-3 * s1.T0);
}

TEST(UniformGrid, InclusiveEnds) {
  const auto g = uniform_grid(0.5, 6.0, 0.1);
  ASSERT_EQ(g.size(), 56u);
  EXPECT_DOUBLE_EQ(g.front(), 0.5);
  EXPECT_DOUBLE_EQ(g.back(), 6.0);
}

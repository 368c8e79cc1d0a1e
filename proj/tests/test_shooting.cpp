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
#include <cmath>

#include <gtest/gtest.h>

#include "flatopt/errors.hpp"
#include "flatopt/shooting.hpp"
#include "test_support.hpp"
#include "variational.hpp"

using namespace flatopt;

namespace {

// y(t_end) from (y0, v0) by RK4 with the given step.
double terminal_value(const NonlinearElProblem& p, double v0, double h) {
  const auto steps = static_cast<int>(std::lround(p.t_end / h));
  double y = p.y0;
  double v = v0;
  const auto f = [&](double yy) { return nonlinear_el_rhs(yy, p); };
  for (int i = 0; i < steps; ++i) {
    const double k1y = v, k1v = f(y);
    const double k2y = v + 0.5 * h * k1v, k2v = f(y + 0.5 * h * k1y);
    const double k3y = v + 0.5 * h * k2v, k3v = f(y + 0.5 * h * k2y);
    const double k4y = v + h * k3v, k4v = f(y + h * k3y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return y;
}

}  // namespace

TEST(NonlinearElRhs, Examples) {
  NonlinearElProblem p;
  p.y_f = 0.0;
  EXPECT_EQ(nonlinear_el_rhs(0.0, p), 0.0);
  p.y_f = 1.0;
  EXPECT_DOUBLE_EQ(nonlinear_el_rhs(1.0, p), 0.75);
}

TEST(NonlinearElRhs, PropertyMonotoneInY) {
  check::Rng rng(79);
  for (int trial = 0; trial < 200; ++trial) {
    NonlinearElProblem p;
    p.K_param = rng.uniform(0.05, 100.0);
    p.T_param = rng.uniform(0.1, 5.0);
    p.y_f = rng.uniform(-2, 2);
    const double y = rng.uniform(-3, 3);
    EXPECT_LT(nonlinear_el_rhs(y, p), nonlinear_el_rhs(y + 0.01, p));
  }
}

TEST(Shoot, LinearSurrogateMatchesClosedForm) {
  const double y_f = 1.5;
  const auto res = shoot_second_order([&](double y) { return y - y_f; }, 0.1, 1.5, 3.0,
                                      ShootingOptions{});
  const double A = 0.1 - y_f;
  const double B = -A * std::cosh(3.0) / std::sinh(3.0);
  const auto& y = res.traj["y"];
  double worst = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double t = res.traj.time(k);
    worst = std::max(worst, std::abs(y[k] - (y_f + A * std::cosh(t) + B * std::sinh(t))));
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(res.v_star, B, 1e-6);
}

TEST(Shoot, AcademicInstance) {
  const NonlinearElProblem p;
  const auto res = shoot(p);
  EXPECT_LT(std::abs(res.traj["y"].back() - p.y_target), 1e-8);
  EXPECT_EQ(res.traj["y"].front(), p.y0);
  EXPECT_NEAR(res.v_star, 0.3264, 1e-3);
  EXPECT_LE(res.iterations, 100);
  ASSERT_TRUE(res.traj.has("u"));
  const double J = energy_cost(p, res.traj);
  EXPECT_NEAR(J, 1.11e3, 0.03 * 1.11e3);
}

TEST(Shoot, HalfStepReintegrationAgrees) {
  const NonlinearElProblem p;
  const auto res = shoot(p);
  EXPECT_LT(std::abs(terminal_value(p, res.v_star, 5e-4) - p.y_target), 1e-6);
}

TEST(Shoot, DegenerateConstantTarget) {
  NonlinearElProblem p;
  p.y0 = 1.5;
  p.y_target = 1.5;
  // The y^5 term makes every slope near zero blow up; the stationary path
  // first dives towards 0, so the bracket has to straddle that dive.
  ShootingOptions opt;
  opt.bracket = std::pair{-0.5, 0.5};
  EXPECT_THROW(shoot(p, opt), NumericalError);
  opt.bracket = std::pair{-1.9, -1.6};
  const auto res = shoot(p, opt);
  EXPECT_LT(std::abs(res.traj["y"].back() - 1.5), 1e-8);
  // The optimum beats holding y at the target.
  const double hold = p.t_end * std::pow(1.5 * 1.5 * 1.5 / p.K_param, 2);
  EXPECT_LT(energy_cost(p, res.traj), hold);
}

TEST(Shoot, FailureReportsMisses) {
  // y'' = 50 y^3 from y(0) = 1 blows up for every slope in the bracket.
  ShootingOptions opt;
  opt.bracket = std::pair{0.0, 1.0};
  try {
    shoot_second_order([](double y) { return 50.0 * y * y * y; }, 1.0, -10.0, 3.0, opt);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("miss"), std::string::npos);
  }
}

TEST(Shoot, PropertyVariationalStationarity) {
  const NonlinearElProblem p;
  const auto res = shoot(p);
  check::Rng rng(83);
  for (int i = 0; i < 20; ++i)
    EXPECT_LT(check::energy_variation_slope(p, res.traj, check::random_bump(rng, p.t_end, 1)), 1e-4);
}

TEST(CompareLagrangians, AcademicInstance) {
  const auto cmp = compare_lagrangians(NonlinearElProblem{});
  EXPECT_NEAR(cmp.J_energ_optimal, 1.11e3, 0.03 * 1.11e3);
  EXPECT_NEAR(cmp.J_energ_of_linear_plan, 2.05e3, 0.03 * 2.05e3);
  EXPECT_LT(cmp.J_energ_optimal, cmp.J_energ_of_linear_plan);
  EXPECT_NEAR(cmp.linear_plan["y"].front(), 0.1, 1e-12);
  EXPECT_NEAR(cmp.linear_plan["y"].back(), 1.5, 1e-12);
}

TEST(CompareLagrangians, LargerGainLowersBothCosts) {
  NonlinearElProblem p;
  const auto base = compare_lagrangians(p);
  p.K_param *= 10.0;
  const auto big = compare_lagrangians(p);
  EXPECT_LT(big.J_energ_optimal, base.J_energ_optimal);
  EXPECT_LT(big.J_energ_of_linear_plan, base.J_energ_of_linear_plan);
  EXPECT_LE(big.J_energ_optimal, big.J_energ_of_linear_plan);
}

TEST(CompareLagrangians, EqualEndpoints) {
  NonlinearElProblem p;
  p.y0 = 0.2;
  p.y_target = 0.2;
  p.y_f = 0.2;
  ShootingOptions opt;
  opt.bracket = std::pair{-0.2, 0.2};
  const auto cmp = compare_lagrangians(p, opt);
  // Both plans stay near the constant; y^3/K is tiny there.
  EXPECT_LT(cmp.J_energ_of_linear_plan, 1.0);
  EXPECT_LE(cmp.J_energ_optimal, cmp.J_energ_of_linear_plan);
  EXPECT_NEAR(cmp.J_energ_optimal, cmp.J_energ_of_linear_plan, 0.5 * cmp.J_energ_of_linear_plan + 1e-12);
}

TEST(NonlinearElProblem, Validation) {
  NonlinearElProblem p;
  p.T_param = 0.0;
  EXPECT_THROW(shoot(p), ConfigError);
  p = NonlinearElProblem{};
  p.K_param = 0.0;
  EXPECT_THROW(shoot(p), ConfigError);
  p = NonlinearElProblem{};
  p.t_end = -1.0;
  EXPECT_THROW(shoot(p), ConfigError);
}

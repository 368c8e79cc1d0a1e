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
#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "flatopt/cost.hpp"
#include "flatopt/tpbvp.hpp"

namespace flatopt {

// Energy-optimal transfer of T y' + y^3 = K u from y0 to y_target over
// [0, t_end]; y_f is the center of the (y_f - y)^2 term.
struct NonlinearElProblem {
  double T_param = 2.0;
  double K_param = 0.1;
  double y_f = 1.5;
  double t_end = 3.0;
  double y0 = 0.1;
  double y_target = 1.5;

  void validate() const;
};

// y'' from y + (3 y^5 - T^2 y'') / K^2 = y_f.
double nonlinear_el_rhs(double y, const NonlinearElProblem& p);

struct ShootingOptions {
  double step = 1e-3;
  int max_iterations = 100;
  double tolerance = 1e-8;
  // Initial slope bracket; defaults to (0, 2 (y_target - y0) / t_end).
  std::optional<std::pair<double, double>> bracket;
};

struct ShootingResult {
  Trajectory traj;  // channels y, y_dot, y_ddot (+ u for the plant problem)
  double v_star = 0.0;
  int iterations = 0;
};

// Solves y'' = accel(y) with y(0) = y0, y(t_end) = y_target by root finding on
// y'(0): bracketed secant/bisection when the terminal miss changes sign over
// the bracket, plain secant otherwise. Fixed-step RK4 integration.
ShootingResult shoot_second_order(const std::function<double(double)>& accel,
                                  double y0, double y_target, double t_end,
                                  const ShootingOptions& options);

ShootingResult shoot(const NonlinearElProblem& problem,
                     const ShootingOptions& options = {});

// u = (T y' + y^3) / K on each sample of a trajectory with y, y_dot.
std::vector<double> nonlinear_input(const Trajectory& traj, double T_param,
                                    double K_param);

// int (y_f - y)^2 + u^2 dt by Simpson's rule.
double energy_cost(const NonlinearElProblem& problem, const Trajectory& traj);

struct LagrangianComparison {
  double J_energ_optimal = 0.0;
  double J_energ_of_linear_plan = 0.0;
  ShootingResult optimal;
  Trajectory linear_plan;  // channels y, y_dot, u
};

// Energy cost of the shooting solution versus the plan minimizing
// (y_f - y)^2 + y'^2 under the same boundary data.
LagrangianComparison compare_lagrangians(const NonlinearElProblem& problem,
                                         const ShootingOptions& options = {});

}  // namespace flatopt

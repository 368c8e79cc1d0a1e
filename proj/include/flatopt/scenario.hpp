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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "flatopt/cost.hpp"
#include "flatopt/mfc.hpp"
#include "flatopt/shooting.hpp"
#include "flatopt/simulate.hpp"
#include "flatopt/tpbvp.hpp"

namespace flatopt {

enum class PlantType { kDcMotor, kCanonical, kTransfer, kNonlinear };

struct PlantConfig {
  PlantType type = PlantType::kDcMotor;
  DcMotorParams dc;
  NonlinearPlantParams nonlinear;
  std::vector<double> a;  // canonical: den coefficients a0..a_{n-1}
  double b = 1.0;
  std::vector<double> num;  // transfer: ascending coefficients
  std::vector<double> den;
  MismatchSpec mismatch;
  std::optional<std::pair<double, double>> u_bounds;
  std::vector<double> x0;       // LTI initial state (zeros when empty)
  std::optional<double> y0;     // nonlinear plant initial output
};

struct LqrCost {
  Eigen::MatrixXd Q;
  double R = 1.0;
};

struct CostConfig {
  std::optional<LqrCost> lqr;
  std::vector<JetWeight> jet;
  std::optional<double> input_weight;
};

struct HorizonGrid {
  double from = 0.5;
  double to = 6.0;
  double step = 0.1;
};

struct ControlConfig {
  int nu = 1;
  double alpha = 1.0;
  double kp = 0.0;  // normalized: du = -(F + kp dy + kd dy') / alpha
  double kd = 0.0;
  double tau = 0.1;
  double sampling = 0.01;
  int substeps = 10;
  bool kp_sign_converted = false;
};

struct ShootingConfig {
  double y0 = 0.1;
  double y_target = 1.5;
  double t_end = 3.0;
  double step = 1e-3;
  std::optional<std::pair<double, double>> bracket;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  PlantConfig plant;
  std::optional<CostConfig> cost;
  std::optional<BoundaryData> boundary;
  double horizon = 0.0;
  std::optional<HorizonGrid> scan;
  std::optional<ControlConfig> control;
  NoiseSpec noise;
  DisturbanceSpec disturbance;
  std::optional<ShootingConfig> shooting;
  std::string output_dir = "out";
  double plan_step = 1e-3;
  // Human-readable notes produced while loading (e.g. sign conversions).
  std::vector<std::string> notes;
};

// JSON scenario text. Errors are ConfigError naming the offending key path.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

bool is_linear_plant(const Scenario& sc);
// Nominal model of an LTI plant (before mismatch).
LtiSiso nominal_model(const Scenario& sc);
FlatMap scenario_flat_map(const Scenario& sc);
QuadraticJetForm scenario_cost(const Scenario& sc);
// Euler-Lagrange ODE of the cost block; errors name the cost path.
EulerLagrangeOde scenario_ode(const Scenario& sc);
HorizonProblem scenario_problem(const Scenario& sc);
NonlinearElProblem scenario_nonlinear_problem(const Scenario& sc);
ShootingOptions scenario_shooting_options(const Scenario& sc);

// First-order homeostat gain derived from the nominal model.
double alpha_from_formula(const Scenario& sc);

// Reference plan: linear TPBVP for LTI plants, shooting for the nonlinear one.
std::shared_ptr<const Reference> scenario_reference(const Scenario& sc);
// Plant with the scenario's mismatch, disturbance and initial state.
std::shared_ptr<const Plant> scenario_plant(const Scenario& sc);

struct LoopOverrides {
  bool alpha_from_formula = false;
  bool saturate = false;
  bool feedback = true;
};

ClosedLoopScenario scenario_closed_loop(const Scenario& sc,
                                        std::shared_ptr<const Reference> ref,
                                        const LoopOverrides& overrides = {});

}  // namespace flatopt

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

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flatopt/cost.hpp"
#include "flatopt/lti_model.hpp"
#include "flatopt/tpbvp.hpp"

namespace flatopt {

// Aggregate DC-motor constants:
//   x1' = a x2 - e tau_l,  x2' = -b x1 - c x2 + d u_dc u,  y = x1.
struct DcMotorParams {
  double a = 0.970;
  double b = 171.0;
  double c = 30.3;
  double d = 65.1;
  double e = 0.370;
  double u_dc = 500.0;

  void validate() const;
};

// Speed output transfer a d u_dc / (s^2 + c s + a b).
LtiSiso dc_motor_model(const DcMotorParams& p);
// x1 = y, x2 = y'/a, u = (y'' + c y' + a b y) / (a d u_dc).
FlatMap dc_motor_flat_map(const DcMotorParams& p);
// First-order homeostat gain a d u_dc / c.
double dc_motor_alpha_formula(const DcMotorParams& p);

// T y' + y^3 = K u.
struct NonlinearPlantParams {
  double T_param = 2.0;
  double K_param = 0.1;

  void validate() const;
};

// Multiplicative factors per named plant parameter.
struct MismatchSpec {
  std::map<std::string, double> factors;
};

DcMotorParams apply_mismatch(DcMotorParams p, const MismatchSpec& m);
NonlinearPlantParams apply_mismatch(NonlinearPlantParams p, const MismatchSpec& m);

struct DisturbanceSpec {
  enum class Kind { kNone, kSineBurst };
  Kind kind = Kind::kNone;
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
  double t_on = 0.0;
  double t_off = 0.0;

  // 300 sin(pi t) on (2, 3].
  static DisturbanceSpec LoadTorqueBurst();
  void validate() const;
};

// amplitude sin(frequency t) for t_on < t <= t_off, zero elsewhere.
double disturbance_value(const DisturbanceSpec& spec, double t);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Standard normal draws scaled by sigma. Marsaglia's polar method on top of
// mt19937_64 with a hand-rolled 53-bit uniform, so the sequence is fixed
// across standard library implementations.
class GaussianStream {
 public:
  explicit GaussianStream(const NoiseSpec& spec);
  double next();

 private:
  double uniform();

  double sigma_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> gaussian_stream(const NoiseSpec& spec, std::size_t count);

// One RK4 step with u and tau_l held over the step.
std::array<double, 2> step_dc_motor(const std::array<double, 2>& x, double u,
                                    double tau_l, const DcMotorParams& p,
                                    double h);
double step_nonlinear(double y, double u, const NonlinearPlantParams& p,
                      double h);
// Controllable canonical realization of an arbitrary strictly proper plant.
Eigen::VectorXd step_lti(const Eigen::VectorXd& x, double u, const LtiSiso& sys,
                         double h);
double lti_output(const Eigen::VectorXd& x, const LtiSiso& sys);

// Simulated plant advanced in zero-order-hold steps.
class Plant {
 public:
  virtual ~Plant() = default;
  virtual double output() const = 0;
  virtual void step(double u, double t, double h) = 0;
  virtual bool finite() const = 0;
  virtual std::unique_ptr<Plant> clone() const = 0;
};

class DcMotorPlant final : public Plant {
 public:
  DcMotorPlant(DcMotorParams params, DisturbanceSpec disturbance,
               std::array<double, 2> x0 = {0.0, 0.0});
  double output() const override { return x_[0]; }
  void step(double u, double t, double h) override;
  bool finite() const override;
  std::unique_ptr<Plant> clone() const override;
  const std::array<double, 2>& state() const { return x_; }

 private:
  DcMotorParams params_;
  DisturbanceSpec disturbance_;
  std::array<double, 2> x_;
};

class NonlinearPlant final : public Plant {
 public:
  NonlinearPlant(NonlinearPlantParams params, double y0);
  double output() const override { return y_; }
  void step(double u, double /*t*/, double h) override;
  bool finite() const override;
  std::unique_ptr<Plant> clone() const override;

 private:
  NonlinearPlantParams params_;
  double y_;
};

class LtiPlant final : public Plant {
 public:
  LtiPlant(LtiSiso sys, Eigen::VectorXd x0);
  double output() const override { return lti_output(x_, sys_); }
  void step(double u, double /*t*/, double h) override;
  bool finite() const override;
  std::unique_ptr<Plant> clone() const override;

 private:
  LtiSiso sys_;
  Eigen::VectorXd x_;
};

// Planned output/input pair the loop tracks.
class Reference {
 public:
  virtual ~Reference() = default;
  virtual double horizon() const = 0;
  virtual double y(double t) const = 0;
  virtual double y_dot(double t) const = 0;
  virtual double u(double t) const = 0;
  // Mean of u over [t0, t1], used as the held feedforward for a step.
  virtual double u_average(double t0, double t1) const = 0;
};

// Flat-output plan from the linear TPBVP; y = z and u = u_row . jet.
class FlatReference final : public Reference {
 public:
  FlatReference(BvpSolution sol, std::vector<double> u_row);
  double horizon() const override { return sol_.horizon(); }
  double y(double t) const override;
  double y_dot(double t) const override;
  double u(double t) const override;
  double u_average(double t0, double t1) const override;

 private:
  double clamp(double t) const;
  BvpSolution sol_;
  std::vector<double> u_row_;
};

// Sampled plan for the T y' + y^3 = K u plant, from channels "y" and
// "y_dot"; cubic Hermite interpolation between samples.
class NonlinearReference final : public Reference {
 public:
  NonlinearReference(Trajectory traj, NonlinearPlantParams model);
  double horizon() const override;
  double y(double t) const override;
  double y_dot(double t) const override;
  double u(double t) const override;
  double u_average(double t0, double t1) const override;

 private:
  double y3_integral(double t0, double t1) const;
  Trajectory traj_;
  NonlinearPlantParams model_;
};

}  // namespace flatopt

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

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "flatopt/cost.hpp"
#include "flatopt/simulate.hpp"

namespace flatopt {

// d^nu/dt^nu dy = F + alpha du with an estimation window tau.
struct Homeostat {
  int nu = 1;
  double alpha = 1.0;
  double tau = 0.1;

  void validate(double sampling) const;
};

struct Gains {
  double kp = 0.0;
  double kd = 0.0;
};

// Sliding window over the last tau seconds of (dy, du) samples taken every
// h seconds: tau/h + 1 samples spanning [t - tau, t].
class Window {
 public:
  Window(double tau, double h);

  void push(double dy, double du);
  bool full() const { return count_ == buffer_.size(); }
  std::size_t capacity() const { return buffer_.size(); }
  double tau() const { return tau_; }
  double step() const { return step_; }
  // k = 0 is the oldest sample.
  const std::pair<double, double>& at(std::size_t k) const;

 private:
  double tau_;
  double step_;
  std::vector<std::pair<double, double>> buffer_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

// Trapezoidal evaluation of the algebraic estimators; nullopt while the
// window is still filling.
std::optional<double> estimate_f_nu1(const Window& window, double alpha);
std::optional<double> estimate_f_nu2(const Window& window, double alpha);
std::optional<double> estimate_f(const Window& window, const Homeostat& homeostat);

// du = -(F_est + K_P dy) / alpha
double ip_control(double f_est, double dy, const Gains& gains,
                  const Homeostat& homeostat);
// du = -(F_est + K_P dy + K_D dy') / alpha
double ipd_control(double f_est, double dy, double dy_dot, const Gains& gains,
                   const Homeostat& homeostat);

struct ClosedLoopScenario {
  std::shared_ptr<const Reference> reference;
  std::shared_ptr<const Plant> plant;  // initial state; cloned per run
  double sampling = 0.01;
  int substeps = 10;
  double t_end = 0.0;  // 0 means the reference horizon
  Homeostat homeostat;
  Gains gains;
  bool feedback = true;
  NoiseSpec noise;
  std::optional<std::pair<double, double>> u_bounds;
  bool saturate = false;
};

struct TrackingMetrics {
  double rms_err = 0.0;
  double max_err = 0.0;
  double terminal_err = 0.0;
  double warmup_s = 0.0;
};

struct ClosedLoopResult {
  // Channels y_star, y_meas, y_true, u_star, u, F_est on the control grid.
  Trajectory channels;
  TrackingMetrics metrics;
  // Control instants with u outside u_bounds (before any saturation).
  int bound_violations = 0;
};

// Tracking error y_true - y_star statistics over [t_from, end].
TrackingMetrics tracking_metrics(const Trajectory& channels, double t_from);

ClosedLoopResult run_closed_loop(const ClosedLoopScenario& scenario);

}  // namespace flatopt

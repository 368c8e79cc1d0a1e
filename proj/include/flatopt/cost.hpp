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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "flatopt/lti_model.hpp"

namespace flatopt {

// Samples on a uniform time grid t_k = t0 + k * step, one or more named
// channels of equal length.
class Trajectory {
 public:
  Trajectory(double t0, double step, std::size_t samples);

  double t0() const { return t0_; }
  double step() const { return step_; }
  std::size_t size() const { return samples_; }
  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * step_; }
  std::vector<double> times() const;

  void set(const std::string& name, std::vector<double> values);
  const std::vector<double>& operator[](const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::pair<std::string, std::vector<double>>>& channels() const {
    return channels_;
  }

 private:
  double t0_;
  double step_;
  std::size_t samples_;
  std::vector<std::pair<std::string, std::vector<double>>> channels_;
};

// "z", "z_dot", "z_ddot", then "z_d3", "z_d4", ...
std::string jet_channel_name(int order);

// L(jet) = jet' P jet + q' jet + r over the jet (z, z', ..., z^(nu)).
struct QuadraticJetForm {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double r = 0.0;

  QuadraticJetForm() = default;
  QuadraticJetForm(Eigen::MatrixXd P, Eigen::VectorXd q, double r);
  static QuadraticJetForm Zero(int order);

  int order() const { return static_cast<int>(P.rows()) - 1; }
  double min_eigenvalue() const;
  // Smallest eigenvalue above rel_tol * ||P||.
  bool is_positive_definite(double rel_tol = 1e-13) const;

  // Pads the smaller operand with zero rows/columns.
  friend QuadraticJetForm operator+(const QuadraticJetForm& a,
                                    const QuadraticJetForm& b);
  friend QuadraticJetForm operator*(double s, const QuadraticJetForm& f);
};

struct JetWeight {
  int order = 0;
  double weight = 1.0;
  double center = 0.0;
};

// sum_mu w_mu (z^(mu) - chi_mu)^2, expanded. Repeated orders accumulate.
QuadraticJetForm shifted_form(const std::vector<JetWeight>& weights);

// weight * v^2 where v is the FlatMap variable `name` (typically "u").
QuadraticJetForm variable_penalty(const FlatMap& map, const std::string& name,
                                  double weight);

// x' Q x + R u^2 rewritten in the flat-output jet; order equals the plant order.
QuadraticJetForm lqr_to_jet_form(const FlatMap& map, const Eigen::MatrixXd& Q,
                                 double R);

double evaluate_lagrangian(const QuadraticJetForm& form,
                           std::span<const double> jet);

// Composite Simpson rule on uniform samples; an even sample count closes
// with a Simpson 3/8 panel. Needs at least 3 samples.
double simpson(std::span<const double> values, double step);

// Integral of the Lagrangian over a trajectory carrying jet channels up to
// the form's order.
double integrate_cost(const QuadraticJetForm& form, const Trajectory& traj);

}  // namespace flatopt

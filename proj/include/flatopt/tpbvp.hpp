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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "flatopt/cost.hpp"
#include "flatopt/euler_lagrange.hpp"
#include "flatopt/polynomial.hpp"

namespace flatopt {

// Roots of the characteristic polynomial with multiplicities.
std::vector<RootCluster> characteristic_roots(const EulerLagrangeOde& ode,
                                              double rel_tol = 1e-6);

enum class Trig { kNone, kCos, kSin };

// One real basis function (t - t_a)^power * exp(sigma (t - t_a)) times
// cos/sin(omega (t - t_a)), where root = sigma + i omega and t_a is 0 or the
// horizon.
struct BasisMode {
  std::complex<double> root;
  int power = 0;
  Trig trig = Trig::kNone;
  bool anchored_at_end = false;
};

enum class Anchoring {
  // Growing modes (Re > 0) are written in t - T so every basis function
  // stays bounded by a polynomial in T on [0, T].
  kSplit,
  // Every mode in t; only usable for short horizons.
  kOrigin,
};

class SolutionBasis {
 public:
  SolutionBasis(std::vector<BasisMode> modes, double horizon);

  const std::vector<BasisMode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  double horizon() const { return horizon_; }

  // deriv-th derivative of mode i at t.
  double value(std::size_t i, double t, int deriv) const;
  // An antiderivative of mode i evaluated at t.
  double antiderivative(std::size_t i, double t) const;
  // Largest |root| over all modes.
  double fastest_rate() const;

 private:
  std::vector<BasisMode> modes_;
  double horizon_;
};

SolutionBasis build_basis(const std::vector<RootCluster>& roots, double horizon,
                          Anchoring anchoring = Anchoring::kSplit);

// Constant particular solution z_p = rhs / p(0) (zero for homogeneous ODEs).
double particular_solution(const EulerLagrangeOde& ode);

// Derivatives of orders 0..nu-1 at t = 0 and t = T.
struct BoundaryData {
  std::vector<double> at0;
  std::vector<double> atT;

  BoundaryData scaled(double s) const;
};

struct BvpSolution {
  SolutionBasis basis;
  Eigen::VectorXd coefficients;
  double particular = 0.0;
  // 2-norm condition number of the row-equilibrated boundary matrix.
  double condition_estimate = 1.0;
  int determinant_sign = 1;

  double horizon() const { return basis.horizon(); }
  // z^(deriv)(t).
  double value(double t, int deriv = 0) const;
  // Integral of z over [t0, t1].
  double integral(double t0, double t1) const;
};

struct TpbvpOptions {
  double max_condition = 1e12;
  Anchoring anchoring = Anchoring::kSplit;
};

SolutionBasis basis_for(const EulerLagrangeOde& ode, double horizon,
                        Anchoring anchoring = Anchoring::kSplit);

BvpSolution solve_tpbvp(const EulerLagrangeOde& ode, const BoundaryData& bc,
                        double horizon, const TpbvpOptions& options = {});

// Jet channels z .. z^(max_deriv) on `samples` uniform points over [0, T],
// from closed-form mode derivatives.
Trajectory eval_solution(const BvpSolution& sol, std::size_t samples,
                         int max_deriv);

// Appends every FlatMap variable (u evaluated as "u_star") to a trajectory
// carrying the needed jet channels.
void append_flat_variables(const FlatMap& map, Trajectory& traj);

struct HorizonProblem {
  EulerLagrangeOde ode;
  BoundaryData bc;
  QuadraticJetForm form;
};

struct HorizonOptions {
  // Quadrature grid: step <= max_step and step * fastest_rate <= resolution.
  double max_step = 1e-3;
  double fast_mode_resolution = 0.5;
  std::size_t min_samples = 2001;
  std::size_t max_samples = 400001;
  double golden_rel_tol = 1e-3;
  TpbvpOptions tpbvp;
};

// Sample count used to integrate a horizon-T solution.
std::size_t quadrature_samples(const BvpSolution& sol,
                               const HorizonOptions& options = {});

// J(T) of the optimal trajectory for horizon T.
double optimal_cost(const HorizonProblem& problem, double horizon,
                    const HorizonOptions& options = {});

struct HorizonScan {
  std::vector<double> horizons;
  std::vector<double> costs;
  double T0 = 0.0;
  double J0 = 0.0;
  // False when the grid minimum sits on an end of the grid.
  bool bracketed = false;
};

HorizonScan horizon_scan(const HorizonProblem& problem,
                         const std::vector<double>& grid,
                         const HorizonOptions& options = {});

// Inclusive uniform grid from..to with the given step.
std::vector<double> uniform_grid(double from, double to, double step);

}  // namespace flatopt

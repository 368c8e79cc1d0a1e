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
#include "flatopt/shooting.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "flatopt/errors.hpp"

namespace flatopt {

void NonlinearElProblem::validate() const {
  if (!(T_param > 0.0)) throw ConfigError("plant time constant T must be > 0");
  if (K_param == 0.0) throw ConfigError("plant gain K must be nonzero");
  if (!(t_end > 0.0)) throw ConfigError("shooting horizon must be > 0");
}

double nonlinear_el_rhs(double y, const NonlinearElProblem& p) {
  const double y2 = y * y;
  return (p.K_param * p.K_param * (y - p.y_f) + 3.0 * y2 * y2 * y) /
         (p.T_param * p.T_param);
}

namespace {

constexpr double kBlowUp = 1e8;

struct Integration {
  std::vector<double> y;
  std::vector<double> v;
  bool blew_up = false;
};

Integration integrate(const std::function<double(double)>& accel, double y0,
                      double v0, std::size_t steps, double h, bool keep) {
  Integration out;
  if (keep) {
    out.y.reserve(steps + 1);
    out.v.reserve(steps + 1);
  }
  double y = y0;
  double v = v0;
  if (keep) {
    out.y.push_back(y);
    out.v.push_back(v);
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double k1y = v;
    const double k1v = accel(y);
    const double k2y = v + 0.5 * h * k1v;
    const double k2v = accel(y + 0.5 * h * k1y);
    const double k3y = v + 0.5 * h * k2v;
    const double k3v = accel(y + 0.5 * h * k2y);
    const double k4y = v + h * k3v;
    const double k4v = accel(y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!std::isfinite(y) || std::abs(y) > kBlowUp) {
      out.blew_up = true;
      if (!keep) out.y.push_back(std::isnan(y) ? 0.0 : y);
      return out;
    }
    if (keep) {
      out.y.push_back(y);
      out.v.push_back(v);
    }
  }
  if (!keep) out.y.push_back(y);
  return out;
}

}  // namespace

ShootingResult shoot_second_order(const std::function<double(double)>& accel,
                                  double y0, double y_target, double t_end,
                                  const ShootingOptions& opt) {
  if (!(t_end > 0.0) || !(opt.step > 0.0))
    throw ConfigError("shooting needs t_end > 0 and step > 0");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / opt.step));
  const double h = t_end / static_cast<double>(steps);

  // Terminal miss; a blow-up reports a saturated value carrying its sign.
  const auto miss = [&](double v0) {
    const Integration r = integrate(accel, y0, v0, steps, h, false);
    const double yend = r.y.back();
    if (r.blew_up) return std::copysign(std::numeric_limits<double>::max(), yend);
    return yend - y_target;
  };
  const auto [lo, hi] = opt.bracket.value_or(
      std::pair<double, double>{0.0, 2.0 * (y_target - y0) / t_end});

  double a = lo;
  double b = (hi == lo) ? lo + 1.0 : hi;
  double fa = miss(a);
  double fb = miss(b);
  const double fa0 = fa;
  const double fb0 = fb;
  int it = 0;
  double v = std::abs(fa) < std::abs(fb) ? a : b;
  double fv = std::min(std::abs(fa), std::abs(fb));

  if (fv >= opt.tolerance) {
    if ((fa < 0.0) != (fb < 0.0)) {
      // Safeguarded false position: fall back to bisection whenever the
      // secant point hugs an end of the bracket.
      for (it = 1; it <= opt.max_iterations; ++it) {
        double x = a - fa * (b - a) / (fb - fa);
        const double width = b - a;
        if (!std::isfinite(x) || std::abs(x - a) < 0.05 * std::abs(width) ||
            std::abs(b - x) < 0.05 * std::abs(width))
          x = 0.5 * (a + b);
        const double fx = miss(x);
        v = x;
        fv = fx;
        if (std::abs(fx) < opt.tolerance) break;
        if ((fx < 0.0) == (fa < 0.0)) {
          a = x;
          fa = fx;
        } else {
          b = x;
          fb = fx;
        }
      }
    } else {
      for (it = 1; it <= opt.max_iterations; ++it) {
        const double x = b - fb * (b - a) / (fb - fa);
        if (!std::isfinite(x)) break;
        a = b;
        fa = fb;
        b = x;
        fb = miss(b);
        v = b;
        fv = fb;
        if (std::abs(fb) < opt.tolerance) break;
      }
    }
    if (!(std::abs(fv) < opt.tolerance)) {
      std::ostringstream msg;
      msg << "shooting did not converge: terminal miss " << fa0 << " at y'(0) = "
          << lo << " and " << fb0 << " at y'(0) = " << hi;
      throw NumericalError(msg.str());
    }
  }

  const Integration path = integrate(accel, y0, v, steps, h, true);
  if (path.blew_up) throw NumericalError("shooting trajectory blew up");
  ShootingResult res{Trajectory(0.0, h, steps + 1), v, it};
  std::vector<double> acc(path.y.size());
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = accel(path.y[k]);
  res.traj.set("y", path.y);
  res.traj.set("y_dot", path.v);
  res.traj.set("y_ddot", std::move(acc));
  return res;
}

std::vector<double> nonlinear_input(const Trajectory& traj, double T_param,
                                    double K_param) {
  const auto& y = traj["y"];
  const auto& v = traj["y_dot"];
  std::vector<double> u(traj.size());
  for (std::size_t k = 0; k < u.size(); ++k)
    u[k] = (T_param * v[k] + y[k] * y[k] * y[k]) / K_param;
  return u;
}

ShootingResult shoot(const NonlinearElProblem& problem,
                     const ShootingOptions& options) {
  problem.validate();
  ShootingResult res = shoot_second_order(
      [&](double y) { return nonlinear_el_rhs(y, problem); }, problem.y0,
      problem.y_target, problem.t_end, options);
  res.traj.set("u", nonlinear_input(res.traj, problem.T_param, problem.K_param));
  return res;
}

double energy_cost(const NonlinearElProblem& problem, const Trajectory& traj) {
  const auto& y = traj["y"];
  const std::vector<double> u =
      nonlinear_input(traj, problem.T_param, problem.K_param);
  std::vector<double> integrand(traj.size());
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    const double e = problem.y_f - y[k];
    integrand[k] = e * e + u[k] * u[k];
  }
  return simpson(integrand, traj.step());
}

LagrangianComparison compare_lagrangians(const NonlinearElProblem& problem,
                                         const ShootingOptions& options) {
  LagrangianComparison out{0.0, 0.0, shoot(problem, options),
                           Trajectory(0.0, 1.0, 0)};
  out.J_energ_optimal = energy_cost(problem, out.optimal.traj);

  const QuadraticJetForm linear =
      shifted_form({{0, 1.0, problem.y_f}, {1, 1.0, 0.0}});
  const BvpSolution sol = solve_tpbvp(derive_el(linear),
                                      {{problem.y0}, {problem.y_target}},
                                      problem.t_end);
  const Trajectory jets = eval_solution(sol, out.optimal.traj.size(), 1);
  Trajectory plan(0.0, jets.step(), jets.size());
  plan.set("y", jets["z"]);
  plan.set("y_dot", jets["z_dot"]);
  plan.set("u", nonlinear_input(plan, problem.T_param, problem.K_param));
  out.J_energ_of_linear_plan = energy_cost(problem, plan);
  out.linear_plan = std::move(plan);
  return out;
}

}  // namespace flatopt

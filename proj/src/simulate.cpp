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
#include "flatopt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flatopt/errors.hpp"

namespace flatopt {

void DcMotorParams::validate() const {
  for (double v : {a, b, c, d, e, u_dc})
    if (!(v > 0.0)) throw ConfigError("DC motor parameters must all be > 0");
}

LtiSiso dc_motor_model(const DcMotorParams& p) {
  p.validate();
  return LtiSiso(RealPolynomial{p.a * p.d * p.u_dc},
                 RealPolynomial{p.a * p.b, p.c, 1.0});
}

FlatMap dc_motor_flat_map(const DcMotorParams& p) {
  p.validate();
  const double g = p.a * p.d * p.u_dc;
  return FlatMap({{"x1", {1.0}},
                  {"x2", {0.0, 1.0 / p.a}},
                  {"u", {p.a * p.b / g, p.c / g, 1.0 / g}}});
}

double dc_motor_alpha_formula(const DcMotorParams& p) {
  return p.a * p.d * p.u_dc / p.c;
}

void NonlinearPlantParams::validate() const {
  if (!(T_param > 0.0)) throw ConfigError("plant time constant T must be > 0");
  if (K_param == 0.0 || !std::isfinite(K_param))
    throw ConfigError("plant gain K must be nonzero");
}

namespace {

double factor(const MismatchSpec& m, const std::string& name) {
  const auto it = m.factors.find(name);
  if (it == m.factors.end()) return 1.0;
  if (!(it->second > 0.0))
    throw ConfigError("mismatch factor for '" + name + "' must be > 0");
  return it->second;
}

void check_names(const MismatchSpec& m, std::initializer_list<const char*> known) {
  for (const auto& [name, f] : m.factors) {
    (void)f;
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return name == k; }))
      throw ConfigError("unknown mismatch parameter '" + name + "'");
  }
}

}  // namespace

DcMotorParams apply_mismatch(DcMotorParams p, const MismatchSpec& m) {
  check_names(m, {"a", "b", "c", "d", "e", "u_dc"});
  p.a *= factor(m, "a");
  p.b *= factor(m, "b");
  p.c *= factor(m, "c");
  p.d *= factor(m, "d");
  p.e *= factor(m, "e");
  p.u_dc *= factor(m, "u_dc");
  return p;
}

NonlinearPlantParams apply_mismatch(NonlinearPlantParams p, const MismatchSpec& m) {
  check_names(m, {"T", "K"});
  p.T_param *= factor(m, "T");
  p.K_param *= factor(m, "K");
  return p;
}

DisturbanceSpec DisturbanceSpec::LoadTorqueBurst() {
  return {Kind::kSineBurst, 300.0, std::numbers::pi, 2.0, 3.0};
}

void DisturbanceSpec::validate() const {
  if (kind == Kind::kSineBurst && !(t_on <= t_off))
    throw ConfigError("disturbance window needs t_on <= t_off");
}

double disturbance_value(const DisturbanceSpec& spec, double t) {
  if (spec.kind == DisturbanceSpec::Kind::kNone) return 0.0;
  if (t <= spec.t_on || t > spec.t_off) return 0.0;
  return spec.amplitude * std::sin(spec.frequency * t);
}

GaussianStream::GaussianStream(const NoiseSpec& spec)
    : sigma_(spec.sigma), engine_(spec.seed) {
  if (!(spec.sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
}

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return sigma_ * spare_;
  }
  double u1 = 0.0;
  double u2 = 0.0;
  double s = 0.0;
  do {
    u1 = 2.0 * uniform() - 1.0;
    u2 = 2.0 * uniform() - 1.0;
    s = u1 * u1 + u2 * u2;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = u2 * m;
  has_spare_ = true;
  return sigma_ * u1 * m;
}

std::vector<double> gaussian_stream(const NoiseSpec& spec, std::size_t count) {
  GaussianStream g(spec);
  std::vector<double> out(count);
  for (double& v : out) v = g.next();
  return out;
}

std::array<double, 2> step_dc_motor(const std::array<double, 2>& x, double u,
                                    double tau_l, const DcMotorParams& p,
                                    double h) {
  const auto f = [&](const std::array<double, 2>& s) -> std::array<double, 2> {
    return {p.a * s[1] - p.e * tau_l,
            -p.b * s[0] - p.c * s[1] + p.d * p.u_dc * u};
  };
  const auto add = [](const std::array<double, 2>& s, double k,
                      const std::array<double, 2>& d) -> std::array<double, 2> {
    return {s[0] + k * d[0], s[1] + k * d[1]};
  };
  const auto k1 = f(x);
  const auto k2 = f(add(x, 0.5 * h, k1));
  const auto k3 = f(add(x, 0.5 * h, k2));
  const auto k4 = f(add(x, h, k3));
  return {x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

double step_nonlinear(double y, double u, const NonlinearPlantParams& p,
                      double h) {
  const auto f = [&](double v) { return (p.K_param * u - v * v * v) / p.T_param; };
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * h * k1);
  const double k3 = f(y + 0.5 * h * k2);
  const double k4 = f(y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd step_lti(const Eigen::VectorXd& x, double u, const LtiSiso& sys,
                         double h) {
  const int n = sys.order();
  const auto f = [&](const Eigen::VectorXd& s) {
    Eigen::VectorXd d(n);
    for (int i = 0; i + 1 < n; ++i) d(i) = s(i + 1);
    double last = u;
    for (int i = 0; i < n; ++i) last -= sys.den()[i] * s(i);
    d(n - 1) = last;
    return d;
  };
  const Eigen::VectorXd k1 = f(x);
  const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double lti_output(const Eigen::VectorXd& x, const LtiSiso& sys) {
  double y = 0.0;
  for (int i = 0; i <= sys.num().degree(); ++i) y += sys.num()[i] * x(i);
  return y;
}

DcMotorPlant::DcMotorPlant(DcMotorParams params, DisturbanceSpec disturbance,
                           std::array<double, 2> x0)
    : params_(params), disturbance_(disturbance), x_(x0) {
  params_.validate();
  disturbance_.validate();
}

void DcMotorPlant::step(double u, double t, double h) {
  x_ = step_dc_motor(x_, u, disturbance_value(disturbance_, t), params_, h);
}

bool DcMotorPlant::finite() const {
  return std::isfinite(x_[0]) && std::isfinite(x_[1]);
}

std::unique_ptr<Plant> DcMotorPlant::clone() const {
  return std::make_unique<DcMotorPlant>(*this);
}

NonlinearPlant::NonlinearPlant(NonlinearPlantParams params, double y0)
    : params_(params), y_(y0) {
  params_.validate();
}

void NonlinearPlant::step(double u, double, double h) {
  y_ = step_nonlinear(y_, u, params_, h);
}

bool NonlinearPlant::finite() const { return std::isfinite(y_); }

std::unique_ptr<Plant> NonlinearPlant::clone() const {
  return std::make_unique<NonlinearPlant>(*this);
}

LtiPlant::LtiPlant(LtiSiso sys, Eigen::VectorXd x0)
    : sys_(std::move(sys)), x_(std::move(x0)) {
  if (x_.size() != sys_.order())
    throw ConfigError("initial state size does not match plant order");
}

void LtiPlant::step(double u, double, double h) { x_ = step_lti(x_, u, sys_, h); }

bool LtiPlant::finite() const { return x_.allFinite(); }

std::unique_ptr<Plant> LtiPlant::clone() const {
  return std::make_unique<LtiPlant>(*this);
}

FlatReference::FlatReference(BvpSolution sol, std::vector<double> u_row)
    : sol_(std::move(sol)), u_row_(std::move(u_row)) {}

double FlatReference::clamp(double t) const {
  return std::clamp(t, 0.0, sol_.horizon());
}

double FlatReference::y(double t) const { return sol_.value(clamp(t), 0); }

double FlatReference::y_dot(double t) const {
  if (t > sol_.horizon()) return 0.0;
  return sol_.value(clamp(t), 1);
}

double FlatReference::u(double t) const {
  const double tc = clamp(t);
  double acc = 0.0;
  for (std::size_t k = 0; k < u_row_.size(); ++k)
    if (u_row_[k] != 0.0) acc += u_row_[k] * sol_.value(tc, static_cast<int>(k));
  return acc;
}

double FlatReference::u_average(double t0, double t1) const {
  // Past the horizon the plan holds its final value.
  if (t0 >= sol_.horizon()) return u(sol_.horizon());
  const double a = clamp(t0);
  const double b = clamp(t1);
  if (!(b > a)) return u(a);
  // int u = row0 int z + sum_{k>=1} row_k [z^(k-1)] exactly.
  double acc = u_row_.empty() ? 0.0 : u_row_[0] * sol_.integral(a, b);
  for (std::size_t k = 1; k < u_row_.size(); ++k) {
    if (u_row_[k] == 0.0) continue;
    const int d = static_cast<int>(k) - 1;
    acc += u_row_[k] * (sol_.value(b, d) - sol_.value(a, d));
  }
  double held = acc;
  if (t1 > b) held += u(sol_.horizon()) * (t1 - b);
  return held / (t1 - t0);
}

NonlinearReference::NonlinearReference(Trajectory traj, NonlinearPlantParams model)
    : traj_(std::move(traj)), model_(model) {
  model_.validate();
  if (!traj_.has("y") || !traj_.has("y_dot"))
    throw ConfigError("nonlinear reference needs 'y' and 'y_dot' channels");
  if (traj_.size() < 2) throw ConfigError("nonlinear reference needs >= 2 samples");
}

double NonlinearReference::horizon() const {
  return traj_.time(traj_.size() - 1);
}

namespace {

struct HermiteSpan {
  std::size_t i;
  double theta;
};

HermiteSpan locate(const Trajectory& traj, double t) {
  const std::size_t last = traj.size() - 1;
  const double x = (t - traj.t0()) / traj.step();
  if (x <= 0.0) return {0, 0.0};
  if (x >= static_cast<double>(last)) return {last - 1, 1.0};
  const auto i = std::min(static_cast<std::size_t>(x), last - 1);
  return {i, x - static_cast<double>(i)};
}

}  // namespace

double NonlinearReference::y(double t) const {
  const auto [i, th] = locate(traj_, t);
  const auto& y = traj_["y"];
  const auto& v = traj_["y_dot"];
  const double h = traj_.step();
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  return h00 * y[i] + h10 * h * v[i] + h01 * y[i + 1] + h11 * h * v[i + 1];
}

double NonlinearReference::y_dot(double t) const {
  if (t > horizon()) return 0.0;
  const auto [i, th] = locate(traj_, t);
  const auto& y = traj_["y"];
  const auto& v = traj_["y_dot"];
  const double h = traj_.step();
  const double d00 = 6 * th * (th - 1);
  const double d10 = (1 - th) * (1 - 3 * th);
  const double d01 = -d00;
  const double d11 = th * (3 * th - 2);
  return (d00 * y[i] + d01 * y[i + 1]) / h + d10 * v[i] + d11 * v[i + 1];
}

double NonlinearReference::u(double t) const {
  const double yy = y(t);
  return (model_.T_param * y_dot(t) + yy * yy * yy) / model_.K_param;
}

double NonlinearReference::y3_integral(double t0, double t1) const {
  const int pieces =
      std::max(1, static_cast<int>(std::ceil((t1 - t0) / traj_.step() - 1e-9)));
  const double w = (t1 - t0) / pieces;
  double acc = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double a = t0 + k * w;
    const double ya = y(a);
    const double ym = y(a + 0.5 * w);
    const double yb = y(a + w);
    acc += w / 6.0 * (ya * ya * ya + 4.0 * ym * ym * ym + yb * yb * yb);
  }
  return acc;
}

double NonlinearReference::u_average(double t0, double t1) const {
  const double end = horizon();
  if (t0 >= end) return u(end);
  const double b = std::min(t1, end);
  double acc = (model_.T_param * (y(b) - y(t0)) + y3_integral(t0, b)) / model_.K_param;
  if (t1 > b) acc += u(end) * (t1 - b);
  return acc / (t1 - t0);
}

}  // namespace flatopt

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
#include "flatopt/cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flatopt/errors.hpp"

namespace flatopt {

Trajectory::Trajectory(double t0, double step, std::size_t samples)
    : t0_(t0), step_(step), samples_(samples) {
  if (!(step > 0.0)) throw ConfigError("trajectory time step must be > 0");
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t(samples_);
  for (std::size_t k = 0; k < samples_; ++k) t[k] = time(k);
  return t;
}

void Trajectory::set(const std::string& name, std::vector<double> values) {
  if (values.size() != samples_)
    throw std::invalid_argument("channel '" + name + "' has wrong length");
  for (auto& [n, v] : channels_) {
    if (n == name) {
      v = std::move(values);
      return;
    }
  }
  channels_.emplace_back(name, std::move(values));
}

const std::vector<double>& Trajectory::operator[](const std::string& name) const {
  for (const auto& [n, v] : channels_)
    if (n == name) return v;
  throw std::out_of_range("trajectory has no channel '" + name + "'");
}

bool Trajectory::has(const std::string& name) const {
  return std::any_of(channels_.begin(), channels_.end(),
                     [&](const auto& c) { return c.first == name; });
}

std::string jet_channel_name(int order) {
  switch (order) {
    case 0: return "z";
    case 1: return "z_dot";
    case 2: return "z_ddot";
    default: return "z_d" + std::to_string(order);
  }
}

QuadraticJetForm::QuadraticJetForm(Eigen::MatrixXd P_, Eigen::VectorXd q_, double r_)
    : P(std::move(P_)), q(std::move(q_)), r(r_) {
  if (P.rows() != P.cols() || P.rows() < 1 || q.size() != P.rows())
    throw ConfigError("quadratic form dimensions are inconsistent");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("quadratic form matrix P is not symmetric");
  P = 0.5 * (P + P.transpose()).eval();
}

QuadraticJetForm QuadraticJetForm::Zero(int order) {
  return {Eigen::MatrixXd::Zero(order + 1, order + 1),
          Eigen::VectorXd::Zero(order + 1), 0.0};
}

double QuadraticJetForm::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool QuadraticJetForm::is_positive_definite(double rel_tol) const {
  const double norm = P.cwiseAbs().maxCoeff();
  return norm > 0.0 && min_eigenvalue() > rel_tol * norm;
}

QuadraticJetForm operator+(const QuadraticJetForm& a, const QuadraticJetForm& b) {
  const int n = std::max(a.order(), b.order()) + 1;
  QuadraticJetForm out = QuadraticJetForm::Zero(n - 1);
  out.P.topLeftCorner(a.P.rows(), a.P.cols()) += a.P;
  out.P.topLeftCorner(b.P.rows(), b.P.cols()) += b.P;
  out.q.head(a.q.size()) += a.q;
  out.q.head(b.q.size()) += b.q;
  out.r = a.r + b.r;
  return out;
}

QuadraticJetForm operator*(double s, const QuadraticJetForm& f) {
  return {s * f.P, s * f.q, s * f.r};
}

QuadraticJetForm shifted_form(const std::vector<JetWeight>& weights) {
  if (weights.empty()) throw ConfigError("shifted form needs at least one term");
  int nu = 0;
  for (const auto& w : weights) {
    if (w.order < 0) throw ConfigError("jet weight order must be >= 0");
    if (!(w.weight > 0.0)) throw ConfigError("jet weights must be > 0");
    nu = std::max(nu, w.order);
  }
  QuadraticJetForm f = QuadraticJetForm::Zero(nu);
  for (const auto& w : weights) {
    f.P(w.order, w.order) += w.weight;
    f.q(w.order) += -2.0 * w.weight * w.center;
    f.r += w.weight * w.center * w.center;
  }
  return f;
}

namespace {

Eigen::VectorXd padded(const std::vector<double>& row, int size) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
  for (std::size_t k = 0; k < row.size(); ++k) v(static_cast<Eigen::Index>(k)) = row[k];
  return v;
}

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

QuadraticJetForm variable_penalty(const FlatMap& map, const std::string& name,
                                  double weight) {
  if (!(weight > 0.0)) throw ConfigError("variable penalty weight must be > 0");
  const auto& row = map.row(name);
  const Eigen::VectorXd v = padded(row, static_cast<int>(row.size()));
  return {weight * v * v.transpose(), Eigen::VectorXd::Zero(v.size()), 0.0};
}

QuadraticJetForm lqr_to_jet_form(const FlatMap& map, const Eigen::MatrixXd& Q,
                                 double R) {
  const int n = static_cast<int>(Q.rows());
  if (Q.cols() != n) throw ConfigError("Q must be square");
  for (int i = 1; i <= n; ++i)
    if (!map.contains("x" + std::to_string(i)))
      throw ConfigError("Q dimension exceeds the number of state rows");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw ConfigError("Q must be symmetric");
  const double qmin = smallest_eigenvalue(Q);
  if (!(qmin > 0.0)) {
    std::ostringstream msg;
    msg << "Q is not positive-definite (smallest eigenvalue " << qmin << ")";
    throw ConfigError(msg.str());
  }
  if (!(R > 0.0)) throw ConfigError("R must be > 0");

  const int size = map.max_order() + 1;
  Eigen::MatrixXd rows(n, size);
  for (int i = 0; i < n; ++i)
    rows.row(i) = padded(map.row("x" + std::to_string(i + 1)), size).transpose();
  const Eigen::VectorXd u = padded(map.row("u"), size);
  Eigen::MatrixXd P = rows.transpose() * Q * rows + R * u * u.transpose();
  P = 0.5 * (P + P.transpose());
  return {std::move(P), Eigen::VectorXd::Zero(size), 0.0};
}

double evaluate_lagrangian(const QuadraticJetForm& form,
                           std::span<const double> jet) {
  const int m = form.order() + 1;
  if (static_cast<int>(jet.size()) < m)
    throw ConfigError("jet too short: need derivatives up to order " +
                      std::to_string(form.order()));
  double acc = form.r;
  for (int j = 0; j < m; ++j) {
    double row = 0.0;
    for (int k = 0; k < m; ++k) row += form.P(j, k) * jet[k];
    acc += jet[j] * (row + form.q(j));
  }
  return acc;
}

double simpson(std::span<const double> v, double step) {
  const std::size_t n = v.size();
  if (n < 3) throw ConfigError("Simpson quadrature needs at least 3 samples");
  std::size_t simpson_end = n - 1;  // index of last point in the 1/3 part
  double tail = 0.0;
  if ((n - 1) % 2 == 1) {
    // 3/8 rule on the last three intervals.
    simpson_end = n - 4;
    tail = 3.0 * step / 8.0 *
           (v[n - 4] + 3.0 * v[n - 3] + 3.0 * v[n - 2] + v[n - 1]);
  }
  double acc = 0.0;
  if (simpson_end > 0) {
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t k = 1; k < simpson_end; ++k) (k % 2 ? odd : even) += v[k];
    acc = step / 3.0 * (v[0] + 4.0 * odd + 2.0 * even + v[simpson_end]);
  }
  return acc + tail;
}

double integrate_cost(const QuadraticJetForm& form, const Trajectory& traj) {
  const int m = form.order() + 1;
  std::vector<const std::vector<double>*> jet_channels;
  for (int k = 0; k < m; ++k) {
    const std::string name = jet_channel_name(k);
    if (!traj.has(name))
      throw ConfigError("trajectory lacks jet channel '" + name + "'");
    jet_channels.push_back(&traj[name]);
  }
  std::vector<double> integrand(traj.size());
  std::vector<double> jet(m);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (int k = 0; k < m; ++k) jet[k] = (*jet_channels[k])[i];
    integrand[i] = evaluate_lagrangian(form, jet);
  }
  return simpson(integrand, traj.step());
}

}  // namespace flatopt

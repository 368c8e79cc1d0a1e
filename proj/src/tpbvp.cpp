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
#include "flatopt/tpbvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flatopt/errors.hpp"

namespace flatopt {

namespace {

double falling_factorial(int n, int i) {
  double f = 1.0;
  for (int j = 0; j < i; ++j) f *= static_cast<double>(n - j);
  return f;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * static_cast<double>(n - k + j) / j;
  return b;
}

// d^k/ds^k [s^p e^{lambda s}] = e^{lambda s} sum_i C(k,i) p!/(p-i)! s^{p-i} lambda^{k-i}.
template <typename Scalar>
Scalar mode_derivative(Scalar lambda, int power, double s, int k, Scalar e) {
  Scalar acc = 0.0;
  const int top = std::min(k, power);
  for (int i = 0; i <= top; ++i) {
    acc += binomial(k, i) * falling_factorial(power, i) *
           std::pow(s, power - i) * std::pow(lambda, k - i);
  }
  return acc * e;
}

// Fills out[0..max_deriv] with derivatives of one mode at t.
void mode_jet(const BasisMode& m, double horizon, double t, int max_deriv,
              double* out) {
  const double s = m.anchored_at_end ? t - horizon : t;
  if (m.trig == Trig::kNone) {
    const double lambda = m.root.real();
    const double e = std::exp(lambda * s);
    if (m.power == 0) {
      double f = e;
      for (int k = 0; k <= max_deriv; ++k, f *= lambda) out[k] = f;
      return;
    }
    for (int k = 0; k <= max_deriv; ++k)
      out[k] = mode_derivative<double>(lambda, m.power, s, k, e);
    return;
  }
  const std::complex<double> lambda = m.root;
  const std::complex<double> e = std::exp(lambda * s);
  for (int k = 0; k <= max_deriv; ++k) {
    const std::complex<double> v =
        mode_derivative<std::complex<double>>(lambda, m.power, s, k, e);
    out[k] = (m.trig == Trig::kCos) ? v.real() : v.imag();
  }
}

}  // namespace

std::vector<RootCluster> characteristic_roots(const EulerLagrangeOde& ode,
                                              double rel_tol) {
  const RealPolynomial p = ode.characteristic_polynomial();
  if (p.is_zero()) throw ConfigError("characteristic polynomial is zero");
  return cluster_roots(roots(p), rel_tol);
}

SolutionBasis::SolutionBasis(std::vector<BasisMode> modes, double horizon)
    : modes_(std::move(modes)), horizon_(horizon) {}

double SolutionBasis::value(std::size_t i, double t, int deriv) const {
  double buf[32];
  if (deriv < 0 || deriv >= 32) throw std::out_of_range("derivative order");
  mode_jet(modes_.at(i), horizon_, t, deriv, buf);
  return buf[deriv];
}

double SolutionBasis::antiderivative(std::size_t i, double t) const {
  const BasisMode& m = modes_.at(i);
  const double s = m.anchored_at_end ? t - horizon_ : t;
  if (m.root == std::complex<double>(0.0, 0.0))
    return std::pow(s, m.power + 1) / (m.power + 1);
  // int s^p e^{ls} ds = e^{ls} sum_i (-1)^i p!/(p-i)! s^{p-i} / l^{i+1}.
  const std::complex<double> lambda = m.root;
  std::complex<double> acc = 0.0;
  for (int i = 0; i <= m.power; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    acc += sign * falling_factorial(m.power, i) * std::pow(s, m.power - i) /
           std::pow(lambda, i + 1);
  }
  acc *= std::exp(lambda * s);
  return m.trig == Trig::kSin ? acc.imag() : acc.real();
}

double SolutionBasis::fastest_rate() const {
  double r = 0.0;
  for (const auto& m : modes_) r = std::max(r, std::abs(m.root));
  return r;
}

SolutionBasis build_basis(const std::vector<RootCluster>& clusters,
                          double horizon, Anchoring anchoring) {
  double scale = 0.0;
  for (const auto& c : clusters) scale = std::max(scale, std::abs(c.root));
  const double snap = 1e-12 * std::max(1.0, scale);

  std::vector<BasisMode> modes;
  int expected = 0;
  for (const auto& c : clusters) {
    expected += c.multiplicity;
    std::complex<double> r = c.root;
    if (std::abs(r.imag()) <= snap) r.imag(0.0);
    if (std::abs(r.real()) <= snap) r.real(0.0);
    if (r.imag() < 0.0) continue;  // covered by its conjugate
    const bool at_end = anchoring == Anchoring::kSplit && r.real() > 0.0;
    for (int p = 0; p < c.multiplicity; ++p) {
      if (r.imag() == 0.0) {
        modes.push_back({r, p, Trig::kNone, at_end});
      } else {
        modes.push_back({r, p, Trig::kCos, at_end});
        modes.push_back({r, p, Trig::kSin, at_end});
      }
    }
  }
  if (static_cast<int>(modes.size()) != expected) {
    std::ostringstream msg;
    msg << "root set is not closed under conjugation: " << modes.size()
        << " real basis functions for " << expected << " roots";
    throw NumericalError(msg.str());
  }
  return SolutionBasis(std::move(modes), horizon);
}

SolutionBasis basis_for(const EulerLagrangeOde& ode, double horizon,
                        Anchoring anchoring) {
  return build_basis(characteristic_roots(ode), horizon, anchoring);
}

double particular_solution(const EulerLagrangeOde& ode) {
  if (ode.rhs == 0.0) return 0.0;
  if (ode.coeffs.empty() || ode.coeffs[0] == 0.0)
    throw NumericalError(
        "p(0) = 0 with a nonzero right-hand side: no constant particular "
        "solution exists");
  return ode.rhs / ode.coeffs[0];
}

BoundaryData BoundaryData::scaled(double s) const {
  BoundaryData out = *this;
  for (double& v : out.at0) v *= s;
  for (double& v : out.atT) v *= s;
  return out;
}

double BvpSolution::value(double t, int deriv) const {
  double acc = (deriv == 0) ? particular : 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    acc += coefficients(static_cast<Eigen::Index>(i)) * basis.value(i, t, deriv);
  return acc;
}

double BvpSolution::integral(double t0, double t1) const {
  double acc = particular * (t1 - t0);
  for (std::size_t i = 0; i < basis.size(); ++i)
    acc += coefficients(static_cast<Eigen::Index>(i)) *
           (basis.antiderivative(i, t1) - basis.antiderivative(i, t0));
  return acc;
}

BvpSolution solve_tpbvp(const EulerLagrangeOde& ode, const BoundaryData& bc,
                        double horizon, const TpbvpOptions& options) {
  if (!(horizon > 0.0)) throw ConfigError("horizon T must be > 0");
  if (ode.order() % 2 != 0)
    throw ConfigError("Euler-Lagrange ODE must have even order");
  const int nu = ode.order() / 2;
  if (static_cast<int>(bc.at0.size()) != nu ||
      static_cast<int>(bc.atT.size()) != nu) {
    throw ConfigError("boundary data must list " + std::to_string(nu) +
                      " values at each endpoint");
  }
  SolutionBasis basis = basis_for(ode, horizon, options.anchoring);
  const double zp = particular_solution(ode);
  const int n = 2 * nu;

  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < nu; ++k) {
    for (int j = 0; j < n; ++j) {
      M(k, j) = basis.value(j, 0.0, k);
      M(nu + k, j) = basis.value(j, horizon, k);
    }
    rhs(k) = bc.at0[k] - (k == 0 ? zp : 0.0);
    rhs(nu + k) = bc.atT[k] - (k == 0 ? zp : 0.0);
  }

  BvpSolution sol{std::move(basis), Eigen::VectorXd::Zero(n), zp, 1.0, 1};
  if (n == 0) return sol;

  for (int i = 0; i < n; ++i) {
    const double m = M.row(i).cwiseAbs().maxCoeff();
    if (m > 0.0) {
      M.row(i) /= m;
      rhs(i) /= m;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1)
                                      : std::numeric_limits<double>::infinity();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  double sign = lu.permutationP().determinant();
  for (int i = 0; i < n; ++i) {
    const double d = lu.matrixLU()(i, i);
    sign *= (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  sol.condition_estimate = cond;
  sol.determinant_sign = static_cast<int>(sign);
  if (!std::isfinite(cond) || cond > options.max_condition) {
    std::ostringstream msg;
    msg << "boundary matrix is singular or ill-conditioned at T = " << horizon
        << " (condition estimate " << cond << ", determinant sign "
        << sol.determinant_sign << ")";
    throw NumericalError(msg.str());
  }
  sol.coefficients = M.colPivHouseholderQr().solve(rhs);
  return sol;
}

Trajectory eval_solution(const BvpSolution& sol, std::size_t samples,
                         int max_deriv) {
  if (samples < 2) throw ConfigError("need at least 2 samples");
  if (max_deriv < 0 || max_deriv >= 32)
    throw ConfigError("derivative order out of range");
  const double T = sol.horizon();
  const double step = T / static_cast<double>(samples - 1);
  Trajectory traj(0.0, step, samples);
  std::vector<std::vector<double>> jets(max_deriv + 1,
                                        std::vector<double>(samples, 0.0));
  double buf[32];
  const auto& modes = sol.basis.modes();
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = (s + 1 == samples) ? T : traj.time(s);
    jets[0][s] = sol.particular;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      mode_jet(modes[i], T, t, max_deriv, buf);
      const double c = sol.coefficients(static_cast<Eigen::Index>(i));
      for (int k = 0; k <= max_deriv; ++k) jets[k][s] += c * buf[k];
    }
  }
  for (int k = 0; k <= max_deriv; ++k)
    traj.set(jet_channel_name(k), std::move(jets[k]));
  return traj;
}

void append_flat_variables(const FlatMap& map, Trajectory& traj) {
  for (const auto& [name, row] : map.rows()) {
    std::vector<double> v(traj.size(), 0.0);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] == 0.0) continue;
      const auto& jet = traj[jet_channel_name(static_cast<int>(k))];
      for (std::size_t s = 0; s < v.size(); ++s) v[s] += row[k] * jet[s];
    }
    traj.set(name == "u" ? "u_star" : name, std::move(v));
  }
}

std::size_t quadrature_samples(const BvpSolution& sol,
                               const HorizonOptions& options) {
  const double T = sol.horizon();
  double step = options.max_step;
  const double rate = sol.basis.fastest_rate();
  if (rate > 0.0) step = std::min(step, options.fast_mode_resolution / rate);
  std::size_t n = static_cast<std::size_t>(std::ceil(T / step)) + 1;
  n = std::clamp(n, options.min_samples, options.max_samples);
  if (n % 2 == 0) ++n;  // odd count keeps the pure 1/3 Simpson rule
  return n;
}

double optimal_cost(const HorizonProblem& problem, double horizon,
                    const HorizonOptions& options) {
  const BvpSolution sol =
      solve_tpbvp(problem.ode, problem.bc, horizon, options.tpbvp);
  const Trajectory traj = eval_solution(sol, quadrature_samples(sol, options),
                                        problem.form.order());
  return integrate_cost(problem.form, traj);
}

HorizonScan horizon_scan(const HorizonProblem& problem,
                         const std::vector<double>& grid,
                         const HorizonOptions& options) {
  if (grid.empty()) throw ConfigError("horizon grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ConfigError("horizon grid must be strictly increasing");

  HorizonScan scan;
  scan.horizons = grid;
  scan.costs.reserve(grid.size());
  for (double T : grid) scan.costs.push_back(optimal_cost(problem, T, options));

  const auto best = static_cast<std::size_t>(
      std::min_element(scan.costs.begin(), scan.costs.end()) - scan.costs.begin());
  scan.T0 = grid[best];
  scan.J0 = scan.costs[best];
  scan.bracketed = best > 0 && best + 1 < grid.size();
  if (!scan.bracketed) return scan;

  // Golden-section search on the bracketing neighbours.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid[best - 1];
  double b = grid[best + 1];
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = optimal_cost(problem, c, options);
  double fd = optimal_cost(problem, d, options);
  while (b - a > options.golden_rel_tol * 0.5 * (a + b)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = optimal_cost(problem, c, options);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = optimal_cost(problem, d, options);
    }
  }
  const double tm = 0.5 * (a + b);
  const double fm = optimal_cost(problem, tm, options);
  if (fm < scan.J0) {
    scan.T0 = tm;
    scan.J0 = fm;
  }
  return scan;
}

std::vector<double> uniform_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw ConfigError("invalid grid bounds");
  const auto n =
      static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = from + static_cast<double>(k) * step;
  return g;
}

}  // namespace flatopt

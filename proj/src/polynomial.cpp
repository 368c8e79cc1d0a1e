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
#include "flatopt/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "flatopt/errors.hpp"

namespace flatopt {

RealPolynomial::RealPolynomial(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)) {
  trim();
}

RealPolynomial::RealPolynomial(std::initializer_list<double> coeffs)
    : coeffs_(coeffs) {
  trim();
}

RealPolynomial RealPolynomial::FromRoots(const std::vector<double>& roots,
                                         double leading) {
  RealPolynomial p{leading};
  for (double r : roots) p = p * RealPolynomial{-r, 1.0};
  return p;
}

void RealPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double RealPolynomial::operator[](int k) const {
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[k];
}

double RealPolynomial::norm_inf() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double RealPolynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::complex<double> RealPolynomial::operator()(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

RealPolynomial RealPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return RealPolynomial(std::move(d));
}

RealPolynomial RealPolynomial::monic() const {
  if (is_zero()) return {};
  return (1.0 / leading()) * *this;
}

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[int(k)] + b[int(k)];
  return RealPolynomial(std::move(c));
}

RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b) {
  return a + (-1.0) * b;
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
      c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return RealPolynomial(std::move(c));
}

RealPolynomial operator*(double s, const RealPolynomial& p) {
  std::vector<double> c = p.coeffs_;
  for (double& x : c) x *= s;
  return RealPolynomial(std::move(c));
}

DivisionResult divide(const RealPolynomial& num, const RealPolynomial& den,
                      double rel_tol) {
  if (den.is_zero()) throw std::invalid_argument("polynomial division by zero");
  std::vector<double> r = num.coeffs();
  const int dn = den.degree();
  const int nn = num.degree();
  if (nn < dn) return {RealPolynomial{}, num};
  std::vector<double> q(nn - dn + 1, 0.0);
  for (int k = nn - dn; k >= 0; --k) {
    const double f = r[k + dn] / den.leading();
    q[k] = f;
    for (int j = 0; j <= dn; ++j) r[k + j] -= f * den[j];
    r[k + dn] = 0.0;
  }
  r.resize(dn);
  const double floor = rel_tol * num.norm_inf();
  for (double& c : r)
    if (std::abs(c) <= floor) c = 0.0;
  return {RealPolynomial(std::move(q)), RealPolynomial(std::move(r))};
}

RealPolynomial gcd(const RealPolynomial& a, const RealPolynomial& b,
                   double rel_tol) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  RealPolynomial x = (1.0 / a.norm_inf()) * a;
  RealPolynomial y = (1.0 / b.norm_inf()) * b;
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    RealPolynomial r = divide(x, y).remainder;
    // Unit-norm operands make the absolute threshold a relative one.
    if (r.norm_inf() <= rel_tol) r = RealPolynomial{};
    x = std::move(y);
    y = r.is_zero() ? r : (1.0 / r.norm_inf()) * r;
  }
  return x.monic();
}

namespace {

// Parlett-Reinsch style diagonal balancing by powers of two.
void balance(Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  bool changed = true;
  while (changed) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double row = m.row(i).lpNorm<1>() - std::abs(m(i, i));
      const double col = m.col(i).lpNorm<1>() - std::abs(m(i, i));
      if (row == 0.0 || col == 0.0) continue;
      int exponent = 0;
      std::frexp(row / col, &exponent);
      exponent /= 2;
      if (exponent == 0) continue;
      const double scaled_col = std::ldexp(col, exponent);
      const double scaled_row = std::ldexp(row, -exponent);
      if (scaled_col + scaled_row < 0.95 * (col + row)) {
        m.col(i) *= std::ldexp(1.0, exponent);
        m.row(i) *= std::ldexp(1.0, -exponent);
        changed = true;
      }
    }
  }
}

std::complex<double> polish(const RealPolynomial& p, const RealPolynomial& dp,
                            std::complex<double> r) {
  double residual = std::abs(p(r));
  for (int it = 0; it < 4 && residual > 0.0; ++it) {
    const std::complex<double> slope = dp(r);
    if (std::abs(slope) == 0.0) break;
    const std::complex<double> next = r - p(r) / slope;
    const double next_residual = std::abs(p(next));
    if (!(next_residual < residual)) break;
    r = next;
    residual = next_residual;
  }
  return r;
}

}  // namespace

std::vector<std::complex<double>> roots(const RealPolynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("roots of the zero polynomial");
  const int n = p.degree();
  std::vector<std::complex<double>> out;
  if (n == 0) return out;

  // Zero roots are split off exactly.
  int zeros = 0;
  while (p[zeros] == 0.0) ++zeros;
  const int m = n - zeros;
  out.assign(zeros, {0.0, 0.0});
  if (m == 0) return out;

  std::vector<double> reduced(p.coeffs().begin() + zeros, p.coeffs().end());
  const RealPolynomial q(reduced);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) companion(i, m - 1) = -q[i] / q.leading();
  balance(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("companion-matrix eigenvalue iteration failed");
  const RealPolynomial dq = q.derivative();
  for (Eigen::Index i = 0; i < m; ++i)
    out.push_back(polish(q, dq, solver.eigenvalues()(i)));
  return out;
}

std::vector<RootCluster> cluster_roots(
    const std::vector<std::complex<double>>& roots, double rel_tol) {
  std::vector<RootCluster> clusters;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::complex<double> sum = roots[i];
    int count = 1;
    const double tol = rel_tol * std::max(1.0, std::abs(roots[i]));
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - roots[i]) <= tol) {
        used[j] = true;
        sum += roots[j];
        ++count;
      }
    }
    clusters.push_back({sum / static_cast<double>(count), count});
  }
  return clusters;
}

}  // namespace flatopt

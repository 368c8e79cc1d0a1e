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
#include "flatopt/lti_model.hpp"

#include <algorithm>
#include <sstream>

#include "flatopt/errors.hpp"

namespace flatopt {

LtiSiso::LtiSiso(RealPolynomial num, RealPolynomial den) {
  if (den.degree() < 1)
    throw ConfigError("LTI denominator must have degree >= 1");
  if (num.is_zero()) throw ConfigError("LTI numerator is identically zero");
  if (num.degree() >= den.degree())
    throw ConfigError("LTI transfer function must be strictly proper");
  const double lead = den.leading();
  den_ = den.monic();
  num_ = (1.0 / lead) * num;
}

LtiSiso make_canonical(const std::vector<double>& a, double b) {
  if (a.empty()) throw ConfigError("canonical form needs n >= 1 coefficients");
  if (b == 0.0)
    throw ConfigError("canonical form input gain b must be nonzero");
  std::vector<double> den = a;
  den.push_back(1.0);
  return LtiSiso(RealPolynomial{b}, RealPolynomial(std::move(den)));
}

bool is_controllable(const LtiSiso& sys, double rel_tol) {
  return gcd(sys.num(), sys.den(), rel_tol).degree() == 0;
}

bool is_minimum_phase(const LtiSiso& sys) {
  if (sys.num().degree() == 0) return true;
  const auto zs = roots(sys.num());
  return std::all_of(zs.begin(), zs.end(),
                     [](const auto& z) { return z.real() < 0.0; });
}

bool is_stable(const LtiSiso& sys) {
  const auto ps = roots(sys.den());
  return std::all_of(ps.begin(), ps.end(),
                     [](const auto& p) { return p.real() < 0.0; });
}

FlatMap::FlatMap(std::vector<std::pair<std::string, std::vector<double>>> rows)
    : rows_(std::move(rows)) {}

const std::vector<double>& FlatMap::row(const std::string& name) const {
  for (const auto& [n, r] : rows_)
    if (n == name) return r;
  throw ConfigError("flat map has no variable named '" + name + "'");
}

bool FlatMap::contains(const std::string& name) const {
  return std::any_of(rows_.begin(), rows_.end(),
                     [&](const auto& e) { return e.first == name; });
}

std::vector<std::string> FlatMap::names() const {
  std::vector<std::string> out;
  for (const auto& e : rows_) out.push_back(e.first);
  return out;
}

int FlatMap::max_order() const {
  int m = 0;
  for (const auto& e : rows_) m = std::max(m, static_cast<int>(e.second.size()) - 1);
  return m;
}

FlatMap flat_parameterization(const LtiSiso& sys) {
  if (!sys.is_canonical()) {
    std::ostringstream msg;
    msg << "output is not flat: numerator has degree " << sys.num().degree()
        << " with roots";
    for (const auto& z : roots(sys.num())) msg << ' ' << z;
    throw ConfigError(msg.str());
  }
  const int n = sys.order();
  const double b = sys.num()[0];
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (int k = 0; k < n; ++k) {
    std::vector<double> r(k + 1, 0.0);
    r[k] = 1.0;
    rows.emplace_back("x" + std::to_string(k + 1), std::move(r));
  }
  std::vector<double> u(n + 1);
  for (int k = 0; k <= n; ++k) u[k] = sys.den()[k] / b;
  rows.emplace_back("u", std::move(u));
  return FlatMap(std::move(rows));
}

double evaluate_row(std::span<const double> row, std::span<const double> jet) {
  if (jet.size() < row.size())
    throw ConfigError("jet too short: need derivatives up to order " +
                      std::to_string(row.size() - 1));
  double acc = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * jet[k];
  return acc;
}

double evaluate_variable(const FlatMap& map, const std::string& name,
                         std::span<const double> jet) {
  return evaluate_row(map.row(name), jet);
}

}  // namespace flatopt

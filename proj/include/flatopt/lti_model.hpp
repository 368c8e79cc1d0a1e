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

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flatopt/polynomial.hpp"

namespace flatopt {

// Single-input single-output LTI plant y = num(s)/den(s) u with a monic
// denominator of degree n >= 1 and deg(num) < n.
class LtiSiso {
 public:
  // Normalizes `den` to monic form (num is scaled accordingly).
  LtiSiso(RealPolynomial num, RealPolynomial den);

  const RealPolynomial& num() const { return num_; }
  const RealPolynomial& den() const { return den_; }
  int order() const { return den_.degree(); }
  bool is_canonical() const { return num_.degree() == 0; }

 private:
  RealPolynomial num_;
  RealPolynomial den_;
};

// Controllable canonical form x1' = x2, ..., xn' = -a0 x1 - ... - a_{n-1} xn + b u.
LtiSiso make_canonical(const std::vector<double>& a, double b);

bool is_controllable(const LtiSiso& sys, double rel_tol = 1e-9);
bool is_minimum_phase(const LtiSiso& sys);
bool is_stable(const LtiSiso& sys);

// Linear differential operators expressing system variables in terms of the
// flat output z: variable = sum_k row[k] * z^(k).
class FlatMap {
 public:
  FlatMap() = default;
  explicit FlatMap(std::vector<std::pair<std::string, std::vector<double>>> rows);

  const std::vector<double>& row(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  const std::vector<std::pair<std::string, std::vector<double>>>& rows() const {
    return rows_;
  }

  // Largest derivative order appearing in any row.
  int max_order() const;

 private:
  std::vector<std::pair<std::string, std::vector<double>>> rows_;
};

// Rows x1..xn (derivative selectors) and u = (den(d/dt) z) / b.
FlatMap flat_parameterization(const LtiSiso& sys);

// Inner product of a row with a jet (z, z', z'', ...).
double evaluate_row(std::span<const double> row, std::span<const double> jet);
double evaluate_variable(const FlatMap& map, const std::string& name,
                         std::span<const double> jet);

}  // namespace flatopt

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

#include <vector>

#include "flatopt/cost.hpp"
#include "flatopt/polynomial.hpp"

namespace flatopt {

// Linear constant-coefficient ODE sum_k coeffs[k] z^(k) = rhs, stored with
// the leading (highest-order) coefficient normalized to 1. `scale` is the
// leading coefficient before normalization, so scale * coeffs is the raw
// Euler-Lagrange operator.
struct EulerLagrangeOde {
  std::vector<double> coeffs;
  double rhs = 0.0;
  double scale = 1.0;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  std::vector<double> raw_coeffs() const;
  double raw_rhs() const { return scale * rhs; }
  RealPolynomial characteristic_polynomial() const {
    return RealPolynomial(coeffs);
  }
};

// Stationarity condition of J = int L dt for a quadratic jet Lagrangian.
// P must be positive semi-definite with P(nu, nu) > 0; the result has order
// 2 * nu.
EulerLagrangeOde derive_el(const QuadraticJetForm& form);

}  // namespace flatopt

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
#include "flatopt/euler_lagrange.hpp"

#include <sstream>

#include "flatopt/errors.hpp"

namespace flatopt {

namespace {
constexpr double kDefiniteTol = 1e-13;
}  // namespace

std::vector<double> EulerLagrangeOde::raw_coeffs() const {
  std::vector<double> out = coeffs;
  for (double& c : out) c *= scale;
  return out;
}

EulerLagrangeOde derive_el(const QuadraticJetForm& form) {
  // Semi-definite forms such as L = z'^2 are fine as long as the top
  // derivative carries weight; indefinite ones are not.
  const double norm = form.P.cwiseAbs().maxCoeff();
  const double lambda_min = form.min_eigenvalue();
  if (!(norm > 0.0) || lambda_min < -kDefiniteTol * norm) {
    std::ostringstream msg;
    msg << "Lagrangian is indefinite (smallest eigenvalue of P is " << lambda_min
        << ")";
    throw ConfigError(msg.str());
  }
  const int nu = form.order();
  if (!(form.P(nu, nu) > kDefiniteTol * norm)) {
    std::ostringstream msg;
    msg << "Lagrangian has no weight on the highest derivative z^(" << nu
        << "); the Euler-Lagrange equation would drop order";
    throw ConfigError(msg.str());
  }
  std::vector<double> raw(2 * nu + 1, 0.0);
  // dL/dz^(j) contributes (-1)^j d^j/dt^j (2 sum_k P_jk z^(k)). The (j,k)
  // and (k,j) terms are combined so odd orders cancel exactly.
  for (int j = 0; j <= nu; ++j) {
    const double sj = (j % 2 == 0) ? 1.0 : -1.0;
    raw[2 * j] += 2.0 * sj * form.P(j, j);
    for (int k = j + 1; k <= nu; ++k) {
      const double sk = (k % 2 == 0) ? 1.0 : -1.0;
      raw[j + k] += 2.0 * (sj + sk) * form.P(j, k);
    }
  }
  // Only the order-0 linear term survives differentiation.
  const double raw_rhs = -form.q(0);

  EulerLagrangeOde ode;
  ode.scale = raw.back();
  ode.coeffs = raw;
  for (double& c : ode.coeffs) c /= ode.scale;
  ode.coeffs.back() = 1.0;
  ode.rhs = raw_rhs / ode.scale;
  return ode;
}

}  // namespace flatopt

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
#include <initializer_list>
#include <vector>

namespace flatopt {

// Real univariate polynomial, coefficients stored in ascending degree order
// so that coeffs()[k] multiplies s^k. Trailing zeros are stripped on
// construction; the zero polynomial has an empty coefficient list.
class RealPolynomial {
 public:
  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<double> coeffs);
  RealPolynomial(std::initializer_list<double> coeffs);

  // Product of (s - r) over the given real roots, scaled by `leading`.
  static RealPolynomial FromRoots(const std::vector<double>& roots,
                                  double leading = 1.0);

  const std::vector<double>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
  double operator[](int k) const;
  double norm_inf() const;

  double operator()(double s) const;
  std::complex<double> operator()(std::complex<double> s) const;

  RealPolynomial derivative() const;
  RealPolynomial monic() const;

  friend RealPolynomial operator+(const RealPolynomial& a,
                                  const RealPolynomial& b);
  friend RealPolynomial operator-(const RealPolynomial& a,
                                  const RealPolynomial& b);
  friend RealPolynomial operator*(const RealPolynomial& a,
                                  const RealPolynomial& b);
  friend RealPolynomial operator*(double s, const RealPolynomial& p);

 private:
  void trim();
  std::vector<double> coeffs_;
};

struct DivisionResult {
  RealPolynomial quotient;
  RealPolynomial remainder;
};

// Euclidean division. Remainder coefficients below `rel_tol` times the
// dividend's infinity norm are flushed to zero.
DivisionResult divide(const RealPolynomial& num, const RealPolynomial& den,
                      double rel_tol = 0.0);

// Monic greatest common divisor by the Euclidean algorithm. A remainder is
// treated as zero when its infinity norm falls below `rel_tol` relative to
// the (normalized) operands.
RealPolynomial gcd(const RealPolynomial& a, const RealPolynomial& b,
                   double rel_tol = 1e-9);

// All complex roots, computed as eigenvalues of the balanced companion
// matrix and polished with a few Newton steps.
std::vector<std::complex<double>> roots(const RealPolynomial& p);

struct RootCluster {
  std::complex<double> root;
  int multiplicity = 1;
};

// Groups roots lying within rel_tol * max(1, |root|) of each other; the
// cluster representative is the mean of its members.
std::vector<RootCluster> cluster_roots(
    const std::vector<std::complex<double>>& roots, double rel_tol = 1e-6);

}  // namespace flatopt

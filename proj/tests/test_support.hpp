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
// Shared helpers for the unit tests: seeded generators and small oracles.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace flatopt::check {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  // Symmetric positive-definite matrix with eigenvalues in [lo, hi].
  Eigen::MatrixXd spd(int n, double lo = 0.5, double hi = 3.0) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = uniform(-1.0, 1.0);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    return q * d.asDiagonal() * q.transpose();
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Derivatives 0..max_order of the polynomial sum c_k t^k at t.
inline std::vector<double> poly_jet(const std::vector<double>& c, double t,
                                    int max_order) {
  std::vector<double> jet(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int d = 0; d <= max_order; ++d) {
    double acc = 0.0;
    for (std::size_t k = static_cast<std::size_t>(d); k < c.size(); ++k) {
      double fall = 1.0;
      for (int j = 0; j < d; ++j) fall *= static_cast<double>(k - static_cast<std::size_t>(j));
      acc += c[k] * fall * std::pow(t, static_cast<double>(k) - d);
    }
    jet[static_cast<std::size_t>(d)] = acc;
  }
  return jet;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace flatopt::check

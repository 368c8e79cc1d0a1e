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
#include "flatopt/mfc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flatopt/errors.hpp"

namespace flatopt {

void Homeostat::validate(double sampling) const {
  if (nu != 1 && nu != 2) throw ConfigError("homeostat order nu must be 1 or 2");
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw ConfigError("homeostat gain alpha must be nonzero");
  const double ratio = tau / sampling;
  if (!(tau > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio ||
      std::round(ratio) < 2.0)
    throw ConfigError(
        "estimation window tau must be an integer multiple (>= 2) of the "
        "sampling period");
}

Window::Window(double tau, double h) : tau_(tau), step_(h) {
  if (!(h > 0.0)) throw ConfigError("sampling period must be > 0");
  const double ratio = tau / h;
  const double n = std::round(ratio);
  if (!(tau > 0.0) || n < 2.0 || std::abs(ratio - n) > 1e-9 * ratio)
    throw ConfigError("window length must be an integer multiple (>= 2) of h");
  buffer_.resize(static_cast<std::size_t>(n) + 1);
}

void Window::push(double dy, double du) {
  buffer_[head_] = {dy, du};
  head_ = (head_ + 1) % buffer_.size();
  count_ = std::min(count_ + 1, buffer_.size());
}

const std::pair<double, double>& Window::at(std::size_t k) const {
  // Oldest element sits at head_ once the buffer has wrapped.
  const std::size_t start = full() ? head_ : 0;
  return buffer_[(start + k) % buffer_.size()];
}

std::optional<double> estimate_f_nu1(const Window& w, double alpha) {
  if (!w.full()) return std::nullopt;
  const double tau = w.tau();
  const double h = w.step();
  const std::size_t n = w.capacity();
  // int_0^tau [(tau - 2s) dy + s (tau - s) alpha du] ds = -tau^3 F / 6
  double integral = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) * h;
    const auto [dy, du] = w.at(k);
    const double g = (tau - 2.0 * s) * dy + s * (tau - s) * alpha * du;
    integral += (k == 0 || k + 1 == n) ? 0.5 * g : g;
  }
  integral *= h;
  return -6.0 / (tau * tau * tau) * integral;
}

std::optional<double> estimate_f_nu2(const Window& w, double alpha) {
  if (!w.full()) return std::nullopt;
  const double tau = w.tau();
  const double h = w.step();
  const std::size_t n = w.capacity();
  double integral = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) * h;
    const double r = tau - s;
    const auto [dy, du] = w.at(k);
    const double g = (r * r - 4.0 * r * s + s * s) * dy -
                     0.5 * r * r * s * s * alpha * du;
    integral += (k == 0 || k + 1 == n) ? 0.5 * g : g;
  }
  integral *= h;
  return 60.0 / std::pow(tau, 5) * integral;
}

std::optional<double> estimate_f(const Window& window, const Homeostat& homeostat) {
  return homeostat.nu == 1 ? estimate_f_nu1(window, homeostat.alpha)
                           : estimate_f_nu2(window, homeostat.alpha);
}

double ip_control(double f_est, double dy, const Gains& gains,
                  const Homeostat& homeostat) {
  return -(f_est + gains.kp * dy) / homeostat.alpha;
}

double ipd_control(double f_est, double dy, double dy_dot, const Gains& gains,
                   const Homeostat& homeostat) {
  return -(f_est + gains.kp * dy + gains.kd * dy_dot) / homeostat.alpha;
}

TrackingMetrics tracking_metrics(const Trajectory& ch, double t_from) {
  const auto& ys = ch["y_star"];
  const auto& yt = ch["y_true"];
  TrackingMetrics m;
  m.warmup_s = t_from;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < ch.size(); ++k) {
    if (ch.time(k) < t_from - 1e-9) continue;
    const double e = yt[k] - ys[k];
    sum += e * e;
    m.max_err = std::max(m.max_err, std::abs(e));
    ++count;
  }
  m.rms_err = count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
  m.terminal_err = ch.size() ? std::abs(yt.back() - ys.back()) : 0.0;
  return m;
}

ClosedLoopResult run_closed_loop(const ClosedLoopScenario& sc) {
  if (!sc.reference || !sc.plant)
    throw ConfigError("closed loop needs a reference and a plant");
  if (!(sc.sampling > 0.0) || sc.substeps < 1)
    throw ConfigError("invalid sampling configuration");
  sc.homeostat.validate(sc.sampling);
  if (sc.u_bounds && !(sc.u_bounds->first < sc.u_bounds->second))
    throw ConfigError("u bounds must satisfy lower < upper");

  const Reference& ref = *sc.reference;
  const double t_end = sc.t_end > 0.0 ? sc.t_end : ref.horizon();
  const auto n = static_cast<std::size_t>(std::llround(t_end / sc.sampling));
  const double h = sc.sampling;
  const double hs = h / sc.substeps;

  std::unique_ptr<Plant> plant = sc.plant->clone();
  Window window(sc.homeostat.tau, h);
  GaussianStream noise(sc.noise);

  std::vector<double> y_star(n + 1), y_meas(n + 1), y_true(n + 1),
      u_star(n + 1), u_log(n + 1), f_log(n + 1, 0.0);
  ClosedLoopResult result{Trajectory(0.0, h, n + 1), {}, 0};

  const auto clamp_u = [&](double u) {
    if (sc.saturate && sc.u_bounds)
      return std::clamp(u, sc.u_bounds->first, sc.u_bounds->second);
    return u;
  };

  double prev_du = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * h;
    const double yt = plant->output();
    if (!plant->finite() || std::abs(yt) > 1e12) {
      std::ostringstream msg;
      msg << "closed loop diverged at t = " << t << " s";
      throw NumericalError(msg.str());
    }
    const double ym = yt + noise.next();
    const double ys = ref.y(t);
    const double dy = ym - ys;

    double du = 0.0;
    if (sc.feedback) {
      window.push(dy, prev_du);
      if (const auto f = estimate_f(window, sc.homeostat)) {
        f_log[k] = *f;
        if (sc.homeostat.nu == 1) {
          du = ip_control(*f, dy, sc.gains, sc.homeostat);
        } else {
          // Second-order backward difference of the measurement.
          double dy_dot = 0.0;
          if (k >= 2) {
            const double ym_dot =
                (3.0 * ym - 4.0 * y_meas[k - 1] + y_meas[k - 2]) / (2.0 * h);
            dy_dot = ym_dot - ref.y_dot(t);
          }
          du = ipd_control(*f, dy, dy_dot, sc.gains, sc.homeostat);
        }
      }
    }

    const double us = ref.u(t);
    const double u_cmd = us + du;
    if (sc.u_bounds && (u_cmd < sc.u_bounds->first || u_cmd > sc.u_bounds->second))
      ++result.bound_violations;
    y_star[k] = ys;
    y_meas[k] = ym;
    y_true[k] = yt;
    u_star[k] = us;
    u_log[k] = clamp_u(u_cmd);
    if (k == n) break;

    for (int i = 0; i < sc.substeps; ++i) {
      const double t0 = t + i * hs;
      plant->step(clamp_u(ref.u_average(t0, t0 + hs) + du), t0, hs);
    }
    prev_du = du;
  }

  result.channels.set("y_star", std::move(y_star));
  result.channels.set("y_meas", std::move(y_meas));
  result.channels.set("y_true", std::move(y_true));
  result.channels.set("u_star", std::move(u_star));
  result.channels.set("u", std::move(u_log));
  result.channels.set("F_est", std::move(f_log));
  result.metrics = tracking_metrics(result.channels, sc.homeostat.tau);
  return result;
}

}  // namespace flatopt

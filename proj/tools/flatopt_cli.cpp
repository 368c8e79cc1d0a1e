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
// Scenario-driven command line front end.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "flatopt/errors.hpp"
#include "flatopt/euler_lagrange.hpp"
#include "flatopt/io.hpp"
#include "flatopt/mfc.hpp"
#include "flatopt/scenario.hpp"
#include "flatopt/shooting.hpp"
#include "flatopt/tpbvp.hpp"

namespace {

using flatopt::format_double;
using nlohmann::ordered_json;

struct Options {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool saturate = false;
  bool alpha_from_formula = false;
};

flatopt::Scenario load(const Options& o) {
  flatopt::Scenario sc = flatopt::load_scenario(o.scenario);
  if (o.seed) {
    sc.seed = *o.seed;
    sc.noise.seed = *o.seed;
  }
  if (!o.out.empty()) sc.output_dir = o.out;
  for (const auto& n : sc.notes) std::cerr << "note: " << n << '\n';
  std::filesystem::create_directories(sc.output_dir);
  return sc;
}

std::string out_path(const flatopt::Scenario& sc, const std::string& file) {
  return (std::filesystem::path(sc.output_dir) / file).string();
}

void write_json(const flatopt::Scenario& sc, const std::string& file,
                ordered_json j) {
  ordered_json doc;
  doc["schema_version"] = flatopt::kSchemaVersion;
  doc["scenario"] = sc.name;
  doc.update(j);
  flatopt::write_text_file(out_path(sc, file), doc.dump(2) + "\n");
  std::cout << "wrote " << out_path(sc, file) << '\n';
}

std::string derivative_symbol(int k) {
  if (k <= 3) return "z" + std::string(static_cast<std::size_t>(k), '\'');
  return "z^(" + std::to_string(k) + ")";
}

// Highest-order term first, unit coefficients elided: "z'' - z = 0".
std::string format_ode(const flatopt::EulerLagrangeOde& ode) {
  std::ostringstream os;
  bool first = true;
  for (int k = ode.order(); k >= 0; --k) {
    const double c = ode.coeffs[static_cast<std::size_t>(k)];
    if (c == 0.0) continue;
    const double mag = std::abs(c);
    if (first) {
      if (c < 0.0) os << "-";
    } else {
      os << (c < 0.0 ? " - " : " + ");
    }
    if (mag != 1.0) os << format_double(mag) << " ";
    os << derivative_symbol(k);
    first = false;
  }
  if (first) os << "0";
  os << " = " << format_double(ode.rhs == 0.0 ? 0.0 : ode.rhs);
  return os.str();
}

ordered_json metrics_json(const flatopt::TrackingMetrics& m) {
  return {{"rms_err", m.rms_err},
          {"max_err", m.max_err},
          {"terminal_err", m.terminal_err},
          {"warmup_s", m.warmup_s}};
}

double plan_horizon(const flatopt::Scenario& sc,
                    const flatopt::HorizonProblem& prob) {
  if (sc.horizon > 0.0) return sc.horizon;
  if (!sc.scan)
    throw flatopt::ConfigError("horizon: needs T or a scan grid");
  const auto scan = flatopt::horizon_scan(
      prob, flatopt::uniform_grid(sc.scan->from, sc.scan->to, sc.scan->step));
  return scan.T0;
}

std::size_t grid_samples(double horizon, double step) {
  std::size_t n = static_cast<std::size_t>(std::ceil(horizon / step)) + 1;
  return std::max<std::size_t>(n | 1U, 3);
}

int cmd_derive(const Options& o) {
  const auto sc = load(o);
  const auto ode = flatopt::scenario_ode(sc);
  std::cout << format_ode(ode) << '\n';
  ordered_json roots = ordered_json::array();
  for (const auto& c : flatopt::characteristic_roots(ode))
    roots.push_back({{"re", c.root.real()},
                     {"im", c.root.imag()},
                     {"multiplicity", c.multiplicity}});
  write_json(sc, "derive.json",
             {{"order", ode.order()},
              {"equation", format_ode(ode)},
              {"coeffs", ode.coeffs},
              {"raw_coeffs", ode.raw_coeffs()},
              {"rhs", ode.rhs},
              {"scale", ode.scale},
              {"roots", roots}});
  return 0;
}

int cmd_plan(const Options& o) {
  const auto sc = load(o);
  if (!flatopt::is_linear_plant(sc)) {
    const auto res = flatopt::shoot(flatopt::scenario_nonlinear_problem(sc),
                                    flatopt::scenario_shooting_options(sc));
    flatopt::Trajectory traj = res.traj;
    flatopt::write_csv_file(out_path(sc, "plan.csv"), traj);
    write_json(sc, "plan.json",
               {{"T", sc.shooting->t_end},
                {"v_star", res.v_star},
                {"J", flatopt::energy_cost(flatopt::scenario_nonlinear_problem(sc),
                                           res.traj)}});
    return 0;
  }
  const auto prob = flatopt::scenario_problem(sc);
  const double T = plan_horizon(sc, prob);
  const auto sol = flatopt::solve_tpbvp(prob.ode, prob.bc, T);
  const auto map = flatopt::scenario_flat_map(sc);
  const int nu = prob.form.order();
  const int max_deriv = std::max(nu, map.max_order());
  flatopt::Trajectory traj =
      flatopt::eval_solution(sol, grid_samples(T, sc.plan_step), max_deriv);
  flatopt::append_flat_variables(map, traj);
  flatopt::write_csv_file(out_path(sc, "plan.csv"), traj);
  write_json(sc, "plan.json",
             {{"T", T},
              {"J", flatopt::optimal_cost(prob, T)},
              {"condition_estimate", sol.condition_estimate},
              {"samples", traj.size()}});
  return 0;
}

int cmd_horizon(const Options& o) {
  const auto sc = load(o);
  if (!sc.scan) throw flatopt::ConfigError("horizon.scan: block is required");
  const auto prob = flatopt::scenario_problem(sc);
  const auto scan = flatopt::horizon_scan(
      prob, flatopt::uniform_grid(sc.scan->from, sc.scan->to, sc.scan->step));
  std::ostringstream csv;
  csv << "T,J\n";
  for (std::size_t i = 0; i < scan.horizons.size(); ++i)
    csv << format_double(scan.horizons[i]) << ',' << format_double(scan.costs[i])
        << '\n';
  flatopt::write_text_file(out_path(sc, "horizon.csv"), csv.str());
  std::cout << "T0 = " << format_double(scan.T0) << ", J0 = "
            << format_double(scan.J0) << (scan.bracketed ? "" : " (not bracketed)")
            << '\n';
  write_json(sc, "horizon.json",
             {{"T0", scan.T0}, {"J0", scan.J0}, {"bracketed", scan.bracketed}});
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto sc = load(o);
  const auto ref = flatopt::scenario_reference(sc);
  flatopt::LoopOverrides ov;
  ov.alpha_from_formula = o.alpha_from_formula;
  ov.saturate = o.saturate;
  const auto loop = flatopt::scenario_closed_loop(sc, ref, ov);
  const auto closed = flatopt::run_closed_loop(loop);
  auto open_cfg = loop;
  open_cfg.feedback = false;
  const auto open = flatopt::run_closed_loop(open_cfg);
  flatopt::write_csv_file(out_path(sc, "closed_loop.csv"), closed.channels);
  std::cout << "rms_err = " << format_double(closed.metrics.rms_err)
            << " (open loop " << format_double(open.metrics.rms_err) << ")\n";
  write_json(sc, "simulate.json",
             {{"alpha", loop.homeostat.alpha},
              {"kp", loop.gains.kp},
              {"kd", loop.gains.kd},
              {"tau", loop.homeostat.tau},
              {"seed", sc.seed},
              {"metrics", metrics_json(closed.metrics)},
              {"open_loop_metrics", metrics_json(open.metrics)},
              {"bound_violations", closed.bound_violations},
              {"saturate", o.saturate},
              {"notes", sc.notes}});
  return 0;
}

int cmd_shoot(const Options& o) {
  const auto sc = load(o);
  const auto prob = flatopt::scenario_nonlinear_problem(sc);
  const auto cmp =
      flatopt::compare_lagrangians(prob, flatopt::scenario_shooting_options(sc));
  flatopt::write_csv_file(out_path(sc, "shoot.csv"), cmp.optimal.traj);
  std::cout << "v* = " << format_double(cmp.optimal.v_star) << '\n';
  write_json(sc, "shoot.json",
             {{"v_star", cmp.optimal.v_star},
              {"iterations", cmp.optimal.iterations},
              {"J_energ", cmp.J_energ_optimal},
              {"J_energ_linear_plan", cmp.J_energ_of_linear_plan}});
  return 0;
}

int cmd_compare(const Options& o) {
  const auto sc = load(o);
  const auto prob = flatopt::scenario_nonlinear_problem(sc);
  const auto cmp =
      flatopt::compare_lagrangians(prob, flatopt::scenario_shooting_options(sc));
  flatopt::write_csv_file(out_path(sc, "compare_linear_plan.csv"), cmp.linear_plan);
  std::cout << "J_energ(shooting) = " << format_double(cmp.J_energ_optimal)
            << ", J_energ(linear plan) = "
            << format_double(cmp.J_energ_of_linear_plan) << '\n';
  write_json(sc, "compare.json",
             {{"J_energ_optimal", cmp.J_energ_optimal},
              {"J_energ_linear_plan", cmp.J_energ_of_linear_plan},
              {"v_star", cmp.optimal.v_star},
              {"optimal_dominates",
               cmp.J_energ_optimal < cmp.J_energ_of_linear_plan}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat-output trajectory planning and model-free tracking"};
  app.require_subcommand(1);
  Options opts;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opts.scenario, "scenario JSON file")->required();
    sub->add_option("--out", opts.out, "output directory (overrides the scenario)");
    sub->add_option("--seed", opts.seed, "noise seed (overrides the scenario)");
    sub->add_flag("--saturate", opts.saturate, "clip u to plant.u_bounds");
    sub->add_flag("--alpha-from-formula", opts.alpha_from_formula,
                  "use the model-derived homeostat gain");
  };

  std::function<int(const Options&)> action;
  const auto sub = [&](const char* name, const char* help,
                       int (*fn)(const Options&)) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s);
    s->callback([&action, fn] { action = fn; });
  };
  sub("derive", "print the Euler-Lagrange ODE", cmd_derive);
  sub("plan", "optimal open-loop trajectory", cmd_plan);
  sub("horizon", "scan J(T) and locate the optimal horizon", cmd_horizon);
  sub("simulate", "closed-loop tracking with the intelligent controller", cmd_simulate);
  sub("shoot", "nonlinear Euler-Lagrange plan by shooting", cmd_shoot);
  sub("compare", "energy cost of shooting versus linear-Lagrangian plans", cmd_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return action(opts);
  } catch (const flatopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const flatopt::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

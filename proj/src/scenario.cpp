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
#include "flatopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "flatopt/errors.hpp"

namespace flatopt {

namespace {

using nlohmann::json;

// JSON node paired with its dotted path for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const std::string& key) const {
    return j_.is_object() && j_.contains(key);
  }
  Node operator[](const std::string& key) const {
    if (!has(key)) fail(child(key), "is required");
    return {j_.at(key), child(key)};
  }
  std::optional<Node> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return Node(j_.at(key), child(key));
  }
  Node at(std::size_t i) const {
    return {j_.at(i), path_ + "[" + std::to_string(i) + "]"};
  }
  std::size_t size() const { return j_.size(); }

  double number() const {
    if (!j_.is_number()) fail(path_, "must be a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail(path_, "must be finite");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail(path_, "must be > 0");
    return v;
  }
  int integer() const {
    if (!j_.is_number_integer()) fail(path_, "must be an integer");
    return j_.get<int>();
  }
  std::string string() const {
    if (!j_.is_string()) fail(path_, "must be a string");
    return j_.get<std::string>();
  }
  std::vector<double> numbers() const {
    if (!j_.is_array()) fail(path_, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.push_back(at(i).number());
    return out;
  }
  std::pair<double, double> pair() const {
    const auto v = numbers();
    if (v.size() != 2) fail(path_, "must have exactly two entries");
    return {v[0], v[1]};
  }
  bool is_array() const { return j_.is_array(); }
  bool is_number() const { return j_.is_number(); }
  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

 private:
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json& j_;
  std::string path_;
};

double number_or(const Node& n, const std::string& key, double fallback) {
  const auto c = n.opt(key);
  return c ? c->number() : fallback;
}

PlantConfig parse_plant(const Node& n) {
  PlantConfig p;
  const std::string type = n["type"].string();
  if (type == "dc_motor") {
    p.type = PlantType::kDcMotor;
    if (const auto params = n.opt("params")) {
      p.dc.a = number_or(*params, "a", p.dc.a);
      p.dc.b = number_or(*params, "b", p.dc.b);
      p.dc.c = number_or(*params, "c", p.dc.c);
      p.dc.d = number_or(*params, "d", p.dc.d);
      p.dc.e = number_or(*params, "e", p.dc.e);
      p.dc.u_dc = number_or(*params, "u_dc", p.dc.u_dc);
    }
    try {
      p.dc.validate();
    } catch (const ConfigError& e) {
      Node::fail(n.path() + ".params", e.what());
    }
  } else if (type == "canonical") {
    p.type = PlantType::kCanonical;
    p.a = n["a"].numbers();
    p.b = n["b"].number();
    if (p.a.empty()) Node::fail(n.path() + ".a", "must not be empty");
    if (p.b == 0.0) Node::fail(n.path() + ".b", "must be nonzero");
  } else if (type == "transfer") {
    p.type = PlantType::kTransfer;
    p.num = n["num"].numbers();
    p.den = n["den"].numbers();
  } else if (type == "nonlinear") {
    p.type = PlantType::kNonlinear;
    if (const auto params = n.opt("params")) {
      p.nonlinear.T_param = number_or(*params, "T", p.nonlinear.T_param);
      p.nonlinear.K_param = number_or(*params, "K", p.nonlinear.K_param);
    }
    try {
      p.nonlinear.validate();
    } catch (const ConfigError& e) {
      Node::fail(n.path() + ".params", e.what());
    }
    if (const auto y0 = n.opt("y0")) p.y0 = y0->number();
  } else {
    Node::fail(n.path() + ".type",
               "unknown plant type '" + type +
                   "' (expected dc_motor, canonical, transfer or nonlinear)");
  }
  if (const auto m = n.opt("mismatch")) {
    if (!m->raw().is_object()) Node::fail(m->path(), "must be an object");
    for (const auto& [key, value] : m->raw().items()) {
      (void)value;
      p.mismatch.factors[key] = (*m)[key].positive();
    }
  }
  if (const auto b = n.opt("u_bounds")) p.u_bounds = b->pair();
  if (const auto x0 = n.opt("x0")) p.x0 = x0->numbers();
  return p;
}

CostConfig parse_cost(const Node& n) {
  CostConfig c;
  if (const auto lqr = n.opt("lqr")) {
    const Node q = (*lqr)["Q"];
    if (!q.is_array() || q.size() == 0) Node::fail(q.path(), "must be a square matrix");
    const auto dim = static_cast<Eigen::Index>(q.size());
    LqrCost cost{Eigen::MatrixXd(dim, dim), (*lqr)["R"].number()};
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto row = q.at(static_cast<std::size_t>(i)).numbers();
      if (static_cast<Eigen::Index>(row.size()) != dim)
        Node::fail(q.path(), "must be a square matrix");
      for (Eigen::Index j = 0; j < dim; ++j) cost.Q(i, j) = row[static_cast<std::size_t>(j)];
    }
    c.lqr = std::move(cost);
  }
  if (const auto jet = n.opt("jet")) {
    if (!jet->is_array()) Node::fail(jet->path(), "must be an array");
    for (std::size_t i = 0; i < jet->size(); ++i) {
      const Node t = jet->at(i);
      JetWeight w;
      w.order = t["order"].integer();
      w.weight = t["weight"].positive();
      w.center = number_or(t, "center", 0.0);
      if (w.order < 0) Node::fail(t.path() + ".order", "must be >= 0");
      c.jet.push_back(w);
    }
  }
  if (const auto iw = n.opt("input_weight")) c.input_weight = iw->positive();
  if (!c.lqr && c.jet.empty() && !c.input_weight)
    Node::fail(n.path(), "needs at least one of lqr, jet, input_weight");
  return c;
}

ControlConfig parse_control(const Node& n) {
  ControlConfig c;
  c.nu = n.has("nu") ? n["nu"].integer() : 1;
  if (c.nu != 1 && c.nu != 2) Node::fail(n.path() + ".nu", "must be 1 or 2");
  c.alpha = n["alpha"].number();
  if (c.alpha == 0.0) Node::fail(n.path() + ".alpha", "must be nonzero");
  c.kp = n["kp"].number();
  c.kd = number_or(n, "kd", 0.0);
  c.tau = n["tau"].positive();
  c.sampling = n["sampling"].positive();
  c.substeps = n.has("substeps") ? n["substeps"].integer() : 10;
  if (c.substeps < 1) Node::fail(n.path() + ".substeps", "must be >= 1");
  const double ratio = c.tau / c.sampling;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 2)
    Node::fail(n.path() + ".tau", "must be an integer multiple (>= 2) of sampling");
  const std::string sign = n.has("kp_sign") ? n["kp_sign"].string() : "minus";
  if (sign == "plus") {
    // u = u* + (-F + K_P dy) / alpha is the same law with the gains negated.
    c.kp = -c.kp;
    c.kd = -c.kd;
    c.kp_sign_converted = true;
  } else if (sign != "minus") {
    Node::fail(n.path() + ".kp_sign", "must be 'minus' or 'plus'");
  }
  return c;
}

DisturbanceSpec parse_disturbance(const Node& n) {
  DisturbanceSpec d;
  const std::string kind = n["kind"].string();
  if (kind == "none") return d;
  if (kind != "sine_burst")
    Node::fail(n.path() + ".kind", "must be 'none' or 'sine_burst'");
  d.kind = DisturbanceSpec::Kind::kSineBurst;
  d.amplitude = n["amplitude"].number();
  d.frequency = n["frequency"].number();
  d.t_on = n["t_on"].number();
  d.t_off = n["t_off"].number();
  if (!(d.t_on <= d.t_off)) Node::fail(n.path(), "needs t_on <= t_off");
  return d;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  const Node root(j, "");
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  if (root.has("schema_version") && root["schema_version"].integer() != 1)
    Node::fail("schema_version", "unsupported (expected 1)");

  Scenario sc;
  sc.name = root.has("name") ? root["name"].string() : "scenario";
  if (root.has("seed")) {
    const int seed = root["seed"].integer();
    if (seed < 0) Node::fail("seed", "must be >= 0");
    sc.seed = static_cast<std::uint64_t>(seed);
  }
  sc.plant = parse_plant(root["plant"]);
  if (const auto c = root.opt("cost")) sc.cost = parse_cost(*c);
  if (const auto b = root.opt("boundary"))
    sc.boundary = BoundaryData{(*b)["at0"].numbers(), (*b)["atT"].numbers()};
  if (const auto h = root.opt("horizon")) {
    if (h->has("T")) sc.horizon = (*h)["T"].positive();
    if (const auto s = h->opt("scan")) {
      HorizonGrid g{(*s)["from"].positive(), (*s)["to"].positive(),
                    (*s)["step"].positive()};
      if (!(g.to > g.from)) Node::fail(s->path(), "needs to > from");
      sc.scan = g;
    }
  }
  if (const auto c = root.opt("control")) {
    sc.control = parse_control(*c);
    if (sc.control->kp_sign_converted) {
      std::ostringstream note;
      note << "control.kp: converted '+K_P' sign convention to K_P = "
           << sc.control->kp << " for du = -(F + K_P dy)/alpha";
      sc.notes.push_back(note.str());
    }
  }
  if (const auto n = root.opt("noise")) {
    sc.noise.sigma = number_or(*n, "sigma", 0.0);
    if (sc.noise.sigma < 0.0) Node::fail("noise.sigma", "must be >= 0");
  }
  sc.noise.seed = sc.seed;
  if (const auto d = root.opt("disturbance")) sc.disturbance = parse_disturbance(*d);
  if (const auto s = root.opt("shooting")) {
    ShootingConfig cfg;
    cfg.y0 = (*s)["y0"].number();
    cfg.y_target = (*s)["y_target"].number();
    cfg.t_end = (*s)["t_end"].positive();
    cfg.step = number_or(*s, "step", cfg.step);
    if (!(cfg.step > 0.0)) Node::fail("shooting.step", "must be > 0");
    if (const auto br = s->opt("bracket")) cfg.bracket = br->pair();
    sc.shooting = cfg;
  }
  if (const auto o = root.opt("output")) {
    if (o->has("dir")) sc.output_dir = (*o)["dir"].string();
    if (o->has("plan_step")) sc.plan_step = (*o)["plan_step"].positive();
  }

  // Cross-block consistency.
  if (sc.cost && sc.boundary && is_linear_plant(sc)) {
    const int nu = scenario_cost(sc).order();
    if (static_cast<int>(sc.boundary->at0.size()) != nu ||
        static_cast<int>(sc.boundary->atT.size()) != nu)
      Node::fail("boundary", "must list " + std::to_string(nu) +
                                 " values (derivative orders 0.." +
                                 std::to_string(nu - 1) + ") at each endpoint");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

bool is_linear_plant(const Scenario& sc) {
  return sc.plant.type != PlantType::kNonlinear;
}

LtiSiso nominal_model(const Scenario& sc) {
  switch (sc.plant.type) {
    case PlantType::kDcMotor: return dc_motor_model(sc.plant.dc);
    case PlantType::kCanonical: return make_canonical(sc.plant.a, sc.plant.b);
    case PlantType::kTransfer:
      return LtiSiso(RealPolynomial(sc.plant.num), RealPolynomial(sc.plant.den));
    case PlantType::kNonlinear: break;
  }
  throw ConfigError("plant.type: the nonlinear plant has no LTI model");
}

FlatMap scenario_flat_map(const Scenario& sc) {
  if (sc.plant.type == PlantType::kDcMotor) return dc_motor_flat_map(sc.plant.dc);
  return flat_parameterization(nominal_model(sc));
}

QuadraticJetForm scenario_cost(const Scenario& sc) {
  if (!sc.cost) throw ConfigError("cost: block is required");
  const CostConfig& c = *sc.cost;
  std::optional<QuadraticJetForm> form;
  const auto add = [&](const QuadraticJetForm& f) { form = form ? *form + f : f; };
  if (c.lqr || c.input_weight) {
    const FlatMap map = scenario_flat_map(sc);
    if (c.lqr) {
      try {
        add(lqr_to_jet_form(map, c.lqr->Q, c.lqr->R));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("cost.lqr: ") + e.what());
      }
    }
    if (c.input_weight) add(variable_penalty(map, "u", *c.input_weight));
  }
  if (!c.jet.empty()) add(shifted_form(c.jet));
  return *form;
}

EulerLagrangeOde scenario_ode(const Scenario& sc) {
  try {
    return derive_el(scenario_cost(sc));
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("cost", 0) == 0) throw;
    throw ConfigError("cost: " + what);
  }
}

HorizonProblem scenario_problem(const Scenario& sc) {
  if (!sc.boundary) throw ConfigError("boundary: block is required");
  EulerLagrangeOde ode = scenario_ode(sc);
  return {std::move(ode), *sc.boundary, scenario_cost(sc)};
}

NonlinearElProblem scenario_nonlinear_problem(const Scenario& sc) {
  if (sc.plant.type != PlantType::kNonlinear)
    throw ConfigError("plant.type: shooting needs the nonlinear plant");
  if (!sc.shooting) throw ConfigError("shooting: block is required");
  NonlinearElProblem p;
  p.T_param = sc.plant.nonlinear.T_param;
  p.K_param = sc.plant.nonlinear.K_param;
  p.y0 = sc.shooting->y0;
  p.y_target = sc.shooting->y_target;
  p.y_f = sc.shooting->y_target;
  p.t_end = sc.shooting->t_end;
  return p;
}

ShootingOptions scenario_shooting_options(const Scenario& sc) {
  ShootingOptions o;
  if (sc.shooting) {
    o.step = sc.shooting->step;
    o.bracket = sc.shooting->bracket;
  }
  return o;
}

double alpha_from_formula(const Scenario& sc) {
  const int nu = sc.control ? sc.control->nu : 1;
  switch (sc.plant.type) {
    case PlantType::kDcMotor:
      if (nu == 1) return dc_motor_alpha_formula(sc.plant.dc);
      break;
    case PlantType::kNonlinear:
      return sc.plant.nonlinear.K_param / sc.plant.nonlinear.T_param;
    default:
      break;
  }
  // b0 / a_nu of the nominal transfer function.
  const LtiSiso m = nominal_model(sc);
  const double a_nu = m.den()[nu];
  if (a_nu == 0.0)
    throw ConfigError("control.nu: denominator coefficient a_nu is zero");
  return m.num()[0] / a_nu;
}

std::shared_ptr<const Reference> scenario_reference(const Scenario& sc) {
  if (sc.plant.type == PlantType::kNonlinear) {
    const NonlinearElProblem p = scenario_nonlinear_problem(sc);
    ShootingResult res = shoot(p, scenario_shooting_options(sc));
    return std::make_shared<NonlinearReference>(std::move(res.traj),
                                                sc.plant.nonlinear);
  }
  if (!(sc.horizon > 0.0)) throw ConfigError("horizon.T: is required");
  const HorizonProblem prob = scenario_problem(sc);
  BvpSolution sol = solve_tpbvp(prob.ode, prob.bc, sc.horizon);
  return std::make_shared<FlatReference>(std::move(sol),
                                         scenario_flat_map(sc).row("u"));
}

std::shared_ptr<const Plant> scenario_plant(const Scenario& sc) {
  switch (sc.plant.type) {
    case PlantType::kDcMotor: {
      std::array<double, 2> x0{0.0, 0.0};
      if (!sc.plant.x0.empty()) {
        if (sc.plant.x0.size() != 2) throw ConfigError("plant.x0: must have 2 entries");
        x0 = {sc.plant.x0[0], sc.plant.x0[1]};
      }
      return std::make_shared<DcMotorPlant>(
          apply_mismatch(sc.plant.dc, sc.plant.mismatch), sc.disturbance, x0);
    }
    case PlantType::kNonlinear: {
      const double y0 = sc.plant.y0.value_or(sc.shooting ? sc.shooting->y0 : 0.0);
      return std::make_shared<NonlinearPlant>(
          apply_mismatch(sc.plant.nonlinear, sc.plant.mismatch), y0);
    }
    case PlantType::kCanonical:
    case PlantType::kTransfer: {
      if (!sc.plant.mismatch.factors.empty())
        throw ConfigError("plant.mismatch: only supported for dc_motor and nonlinear plants");
      const LtiSiso m = nominal_model(sc);
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m.order());
      if (!sc.plant.x0.empty()) {
        if (static_cast<int>(sc.plant.x0.size()) != m.order())
          throw ConfigError("plant.x0: size must equal the plant order");
        for (int i = 0; i < m.order(); ++i) x0(i) = sc.plant.x0[static_cast<std::size_t>(i)];
      }
      return std::make_shared<LtiPlant>(m, x0);
    }
  }
  throw ConfigError("plant.type: unsupported");
}

ClosedLoopScenario scenario_closed_loop(const Scenario& sc,
                                        std::shared_ptr<const Reference> ref,
                                        const LoopOverrides& overrides) {
  if (!sc.control) throw ConfigError("control: block is required");
  const ControlConfig& c = *sc.control;
  ClosedLoopScenario loop;
  loop.reference = std::move(ref);
  loop.plant = scenario_plant(sc);
  loop.sampling = c.sampling;
  loop.substeps = c.substeps;
  loop.homeostat = {c.nu, overrides.alpha_from_formula ? alpha_from_formula(sc) : c.alpha,
                    c.tau};
  loop.gains = {c.kp, c.kd};
  loop.feedback = overrides.feedback;
  loop.noise = sc.noise;
  loop.u_bounds = sc.plant.u_bounds;
  loop.saturate = overrides.saturate;
  return loop;
}

}  // namespace flatopt

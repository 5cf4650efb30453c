#include "crf/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace crf::cli {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += "\n  - " + p;
  return s;
}

json scalar_to_json(const std::string& s, bool quoted) {
  if (quoted) return s;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s.empty() || s == "~" || s == "null") return nullptr;
  long long i = 0;
  auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ei == std::errc() && pi == s.data() + s.size()) return i;
  double d = 0.0;
  auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ed == std::errc() && pd == s.data() + s.size()) return d;
  return s;
}

json to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return scalar_to_json(n.Scalar(), n.Tag() == "!");
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(to_json(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = to_json(kv.second);
      return o;
    }
  }
  return nullptr;
}

// Typed access that records problems instead of throwing.
class Reader {
 public:
  std::vector<std::string> errors;

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    errors.push_back(path + ": expected a mapping");
    return false;
  }

  void only(const json& j, const std::string& path, const std::set<std::string>& keys) {
    if (!j.is_object()) return;
    for (const auto& [k, v] : j.items())
      if (!keys.count(k)) errors.push_back(path + "." + k + ": unknown field");
  }

  double number(const json& j, const char* key, double def, const std::string& path) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) {
      errors.push_back(path + "." + key + ": expected a number");
      return def;
    }
    return j[key].get<double>();
  }

  long integer(const json& j, const char* key, long def, const std::string& path) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer()) {
      errors.push_back(path + "." + key + ": expected an integer");
      return def;
    }
    return j[key].get<long>();
  }

  bool boolean(const json& j, const char* key, bool def, const std::string& path) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean()) {
      errors.push_back(path + "." + key + ": expected true or false");
      return def;
    }
    return j[key].get<bool>();
  }

  std::string string(const json& j, const char* key, const std::string& def, const std::string& path) {
    if (!j.contains(key)) return def;
    if (!j[key].is_string()) {
      errors.push_back(path + "." + key + ": expected a string");
      return def;
    }
    return j[key].get<std::string>();
  }

  void positive(double v, const std::string& what) {
    if (!(v > 0.0)) errors.push_back(what + ": must be > 0");
  }

  std::optional<MetricRef> metric(const json& j, const std::string& path) {
    MetricRef m;
    if (j.is_string()) {
      m.key = j.get<std::string>();
    } else if (object(j, path)) {
      only(j, path, {"key", "params"});
      m.key = string(j, "key", "", path);
      if (m.key.empty()) errors.push_back(path + ".key: missing");
      if (j.contains("params")) {
        if (object(j["params"], path + ".params"))
          for (const auto& [k, v] : j["params"].items()) {
            if (v.is_number())
              m.params[k] = v.get<double>();
            else
              errors.push_back(path + ".params." + k + ": expected a number");
          }
      }
    } else {
      return std::nullopt;
    }
    if (m.key.empty()) return std::nullopt;
    const auto* e = geom::find_metric(m.key);
    if (!e) {
      errors.push_back(path + ": unknown metric key '" + m.key + "'");
      return std::nullopt;
    }
    bool params_ok = true;
    for (const auto& [k, v] : m.params)
      if (k != "scale" && !e->defaults.count(k)) {
        errors.push_back(path + ".params." + k + ": metric '" + m.key + "' has no such parameter");
        params_ok = false;
      }
    if (!params_ok) return std::nullopt;
    try {
      m.build();
    } catch (const Error& ex) {
      errors.push_back(path + ": " + ex.what());
      return std::nullopt;
    }
    return m;
  }
};

json metric_echo(const MetricRef& m) {
  json p = json::object();
  const auto* e = geom::find_metric(m.key);
  if (e)
    for (const auto& [k, v] : e->defaults) p[k] = v;
  for (const auto& [k, v] : m.params) p[k] = v;
  return {{"key", m.key}, {"params", p}};
}

// Requirements of each check on the run.
enum Needs { kNone, kFlow, kNormalized };
Needs needs(const std::string& check) {
  static const std::set<std::string> flow = {"exact_tracking", "trace_barrier", "scalar_lower_bound",
                                             "scalar_evolution", "trace_heat_residual"};
  static const std::set<std::string> norm = {"potential_monotonicity", "ke_convergence"};
  if (flow.count(check)) return kFlow;
  if (norm.count(check)) return kNormalized;
  return kNone;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> p)
    : ConfigError("invalid config:" + join(p)), problems(std::move(p)) {}

const json& check_defaults() {
  static const json d = {
      {"exact_tracking", {{"tolerance", 1e-8}, {"einstein_constant", "boundary"}}},
      {"trace_barrier", {{"tolerance", 1e-10}}},
      {"scalar_lower_bound", {{"tolerance", 1e-2}}},
      {"scalar_evolution", {{"tolerance", 1e-10}, {"identity_tolerance", "off"}}},
      {"potential_monotonicity", {{"tolerance", 1e-8}, {"dt_slack", "max_step"}}},
      {"ke_convergence", {{"threshold", 1e-3}, {"r_limit", 0.9}, {"tail_noise", 1e-10}}},
      {"trace_heat_residual", {{"tolerance", 1e-4}, {"r_limit", "off"}}},
      {"chen_oracle", {{"tolerance", 1e-6}}},
      {"uniqueness_F",
       {{"tolerance", 1e-10},
        {"ke_tolerance", 1e-8},
        {"samples", 200},
        {"r_max", 0.9},
        {"omega1", {{"key", "poincare-ke"}, {"params", json::object()}}},
        {"omega2", {{"key", "poincare-ke-mobius"}, {"params", {{"a", 0.3}}}}}}},
      {"cutoff_properties", {{"tau", 0.1}, {"derivative_order", 4}, {"points", 10000}, {"tolerance", 0.0}}}};
  return d;
}

json load_yaml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return to_json(YAML::Load(in));
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

ScenarioConfig load_config(const std::string& path) { return parse_config(load_yaml(path), path); }

ScenarioConfig parse_config(const json& doc, const std::string& source) {
  Reader r;
  ScenarioConfig c;
  c.source = source;
  if (!r.object(doc, "config")) throw ConfigValidationError(r.errors);
  r.only(doc, "config", {"scenario", "seed", "metric", "reference", "exact_ke", "grid", "flow",
                         "barrier", "checks", "output"});
  c.name = r.string(doc, "scenario", "", "config");
  if (c.name.empty()) r.errors.push_back("config.scenario: missing scenario name");
  const long seed = r.integer(doc, "seed", 0, "config");
  if (seed < 0) r.errors.push_back("config.seed: must be >= 0");
  c.seed = static_cast<std::uint64_t>(std::max(0L, seed));

  const bool flow_on = !doc.contains("flow") || !doc["flow"].is_object() || !doc["flow"].contains("enabled") ||
                       doc["flow"]["enabled"] != false;
  if (!doc.contains("metric")) {
    if (flow_on) r.errors.push_back("config.metric: missing initial metric");
  } else if (auto m = r.metric(doc["metric"], "config.metric")) {
    c.metric = *m;
  }
  if (doc.contains("reference")) c.reference = r.metric(doc["reference"], "config.reference");
  if (doc.contains("exact_ke")) c.exact_ke = r.metric(doc["exact_ke"], "config.exact_ke");

  if (doc.contains("grid") && r.object(doc["grid"], "config.grid")) {
    const json& g = doc["grid"];
    r.only(g, "config.grid", {"kind", "r_max", "lo", "hi", "nodes"});
    c.grid.kind = r.string(g, "kind", c.grid.kind, "config.grid");
    c.grid.r_max = r.number(g, "r_max", c.grid.r_max, "config.grid");
    c.grid.lo = r.number(g, "lo", c.grid.lo, "config.grid");
    c.grid.hi = r.number(g, "hi", c.grid.hi, "config.grid");
    c.grid.nodes = static_cast<int>(r.integer(g, "nodes", c.grid.nodes, "config.grid"));
  }
  if (c.grid.kind != "chart" && c.grid.kind != "radial" && c.grid.kind != "box")
    r.errors.push_back("config.grid.kind: expected chart, radial or box, got '" + c.grid.kind + "'");
  if (c.grid.nodes != 0 && c.grid.nodes < 8) r.errors.push_back("config.grid.nodes: need at least 8");
  if (c.grid.kind == "radial") r.positive(c.grid.r_max, "config.grid.r_max");
  if (c.grid.kind == "box" && !(c.grid.hi > c.grid.lo)) r.errors.push_back("config.grid: need hi > lo");
  if (c.grid.kind != "chart" && c.grid.nodes == 0)
    r.errors.push_back("config.grid.nodes: required for radial and box grids");

  FlowConfig& f = c.flow;
  if (doc.contains("flow") && r.object(doc["flow"], "config.flow")) {
    const json& j = doc["flow"];
    const std::string p = "config.flow";
    r.only(j, p, {"enabled", "horizon", "frame_interval", "dt", "safety", "exec", "form", "max_steps",
                  "expect_breakdown", "boundary", "normalized"});
    f.enabled = r.boolean(j, "enabled", f.enabled, p);
    f.horizon = r.number(j, "horizon", f.horizon, p);
    f.frame_interval = r.number(j, "frame_interval", f.frame_interval, p);
    if (j.contains("dt") && j["dt"].is_string()) {
      if (j["dt"] != "cfl") r.errors.push_back(p + ".dt: expected a number or 'cfl'");
    } else {
      f.dt = r.number(j, "dt", f.dt, p);
    }
    f.safety = r.number(j, "safety", f.safety, p);
    f.exec = r.string(j, "exec", f.exec, p);
    f.form = r.string(j, "form", f.form, p);
    f.max_steps = r.integer(j, "max_steps", f.max_steps, p);
    f.expect_breakdown = r.boolean(j, "expect_breakdown", f.expect_breakdown, p);
    if (j.contains("boundary") && r.object(j["boundary"], p + ".boundary")) {
      const json& b = j["boundary"];
      r.only(b, p + ".boundary", {"kind", "model", "einstein_constant"});
      f.boundary.kind = r.string(b, "kind", f.boundary.kind, p + ".boundary");
      if (b.contains("model")) f.boundary.model = r.metric(b["model"], p + ".boundary.model");
      f.boundary.einstein_constant =
          r.number(b, "einstein_constant", f.boundary.einstein_constant, p + ".boundary");
    }
    if (j.contains("normalized") && r.object(j["normalized"], p + ".normalized")) {
      const json& nj = j["normalized"];
      r.only(nj, p + ".normalized", {"enabled", "start", "horizon", "frame_interval"});
      f.normalized.start = r.string(nj, "start", f.normalized.start, p + ".normalized");
      f.normalized.enabled = r.boolean(nj, "enabled", true, p + ".normalized");
      f.normalized.horizon = r.number(nj, "horizon", f.normalized.horizon, p + ".normalized");
      f.normalized.frame_interval =
          r.number(nj, "frame_interval", f.normalized.frame_interval, p + ".normalized");
    }
  }
  if (f.enabled) {
    r.positive(f.horizon, "config.flow.horizon");
    r.positive(f.frame_interval, "config.flow.frame_interval");
    r.positive(f.safety, "config.flow.safety");
    if (f.dt < 0.0) r.errors.push_back("config.flow.dt: must be >= 0 or 'cfl'");
    if (f.max_steps <= 0) r.errors.push_back("config.flow.max_steps: must be > 0");
    if (f.exec != "serial" && f.exec != "parallel")
      r.errors.push_back("config.flow.exec: expected serial or parallel, got '" + f.exec + "'");
    if (f.form != "metric" && f.form != "potential")
      r.errors.push_back("config.flow.form: expected metric or potential, got '" + f.form + "'");
    const auto& bk = f.boundary.kind;
    if (bk != "auto" && bk != "periodic" && bk != "dirichlet" && bk != "extrapolate")
      r.errors.push_back("config.flow.boundary.kind: expected auto, periodic, dirichlet or extrapolate, got '" + bk + "'");
    if (f.normalized.enabled) {
      r.positive(f.normalized.horizon, "config.flow.normalized.horizon");
      r.positive(f.normalized.frame_interval, "config.flow.normalized.frame_interval");
      if (f.normalized.start != "after_flow" && f.normalized.start != "initial")
        r.errors.push_back("config.flow.normalized.start: expected after_flow or initial, got '" + f.normalized.start + "'");
      if (f.normalized.start == "after_flow" && f.horizon > 1.0)
        r.errors.push_back("config.flow.horizon: normalized runs start from t = 1, so the horizon must be <= 1");
      if (f.form != "metric") r.errors.push_back("config.flow.form: normalized runs use the metric form");
    }
  }

  est::BarrierConfig& b = c.barrier;
  if (doc.contains("barrier") && r.object(doc["barrier"], "config.barrier")) {
    const json& j = doc["barrier"];
    const std::string p = "config.barrier";
    r.only(j, p, {"n", "alpha", "beta", "k", "kappa0", "rate", "c1", "c2", "T"});
    b.n = static_cast<int>(r.integer(j, "n", b.n, p));
    if (j.contains("alpha") && j["alpha"].is_string()) {
      if (j["alpha"] != "measure") r.errors.push_back(p + ".alpha: expected a number or 'measure'");
    } else if (j.contains("alpha")) {
      c.measure_alpha = false;
      b.alpha = r.number(j, "alpha", b.alpha, p);
    }
    b.beta = r.number(j, "beta", b.beta, p);
    b.k = r.number(j, "k", b.k, p);
    b.kappa0 = r.number(j, "kappa0", b.kappa0, p);
    b.s_override = r.number(j, "rate", b.s_override, p);
    b.c1 = r.number(j, "c1", b.c1, p);
    b.c2 = r.number(j, "c2", b.c2, p);
    b.T = r.number(j, "T", b.T, p);
  }
  if (!c.metric.key.empty()) b.n = c.metric.build()->dim();
  try {
    est::BarrierConfig probe = b;
    if (c.measure_alpha) probe.alpha = 1.0;
    probe.validate();
  } catch (const ConfigError& e) {
    r.errors.push_back(std::string("config.") + e.what());
  }

  if (doc.contains("checks")) {
    if (!doc["checks"].is_array()) {
      r.errors.push_back("config.checks: expected a list");
    } else {
      for (std::size_t k = 0; k < doc["checks"].size(); ++k) {
        const json& j = doc["checks"][k];
        const std::string p = "config.checks[" + std::to_string(k) + "]";
        CheckConfig cc;
        json body;
        if (j.is_string()) {
          cc.name = j.get<std::string>();
          body = json::object();
        } else if (r.object(j, p)) {
          cc.name = r.string(j, "name", "", p);
          body = j;
        } else {
          continue;
        }
        if (!check_defaults().contains(cc.name)) {
          r.errors.push_back(p + ": unknown check '" + cc.name + "'");
          continue;
        }
        const std::string expect = r.string(body, "expect", "pass", p);
        if (expect != "pass" && expect != "fail") r.errors.push_back(p + ".expect: expected pass or fail");
        cc.expect_pass = expect != "fail";
        cc.params = check_defaults()[cc.name];
        for (const auto& [key, v] : body.items()) {
          if (key == "name" || key == "expect") continue;
          if (!cc.params.contains(key)) {
            r.errors.push_back(p + "." + key + ": check '" + cc.name + "' has no such parameter");
            continue;
          }
          const json& d = cc.params[key];
          if (d.is_object()) {
            if (r.metric(v, p + "." + key)) cc.params[key] = v.is_string() ? json{{"key", v}, {"params", json::object()}} : v;
          } else if (d.is_string() && v.is_string()) {
            if (v != d) r.errors.push_back(p + "." + key + ": expected a number or '" + d.get<std::string>() + "'");
          } else if (!v.is_number()) {
            r.errors.push_back(p + "." + key + ": expected a number");
          } else {
            cc.params[key] = v;
          }
        }
        const Needs nd = needs(cc.name);
        if (nd != kNone && !f.enabled)
          r.errors.push_back(p + ": check '" + cc.name + "' needs flow.enabled");
        if (nd == kNormalized && !f.normalized.enabled)
          r.errors.push_back(p + ": check '" + cc.name + "' needs flow.normalized");
        c.checks.push_back(std::move(cc));
      }
    }
  }

  c.output_dir = c.name;
  if (doc.contains("output") && r.object(doc["output"], "config.output")) {
    r.only(doc["output"], "config.output", {"dir"});
    c.output_dir = r.string(doc["output"], "dir", c.output_dir, "config.output");
  }
  if (!r.errors.empty()) throw ConfigValidationError(r.errors);
  return c;
}

json ScenarioConfig::echo() const {
  json checks_j = json::array();
  for (const auto& ck : checks)
    checks_j.push_back({{"name", ck.name}, {"expect", ck.expect_pass ? "pass" : "fail"}, {"params", ck.params}});
  json bnd = {{"kind", flow.boundary.kind}, {"einstein_constant", flow.boundary.einstein_constant}};
  bnd["model"] = flow.boundary.model ? metric_echo(*flow.boundary.model) : json(nullptr);
  json bar = barrier.to_json();
  if (measure_alpha) bar["alpha"] = "measure";
  return {{"scenario", name},
          {"seed", seed},
          {"metric", metric.key.empty() ? json(nullptr) : metric_echo(metric)},
          {"reference", reference ? metric_echo(*reference) : json(nullptr)},
          {"exact_ke", exact_ke ? metric_echo(*exact_ke) : json(nullptr)},
          {"grid", {{"kind", grid.kind}, {"r_max", grid.r_max}, {"lo", grid.lo}, {"hi", grid.hi}, {"nodes", grid.nodes}}},
          {"flow",
           {{"enabled", flow.enabled},
            {"horizon", flow.horizon},
            {"frame_interval", flow.frame_interval},
            {"dt", flow.dt > 0.0 ? json(flow.dt) : json("cfl")},
            {"safety", flow.safety},
            {"exec", flow.exec},
            {"form", flow.form},
            {"max_steps", flow.max_steps},
            {"expect_breakdown", flow.expect_breakdown},
            {"boundary", bnd},
            {"normalized",
             {{"enabled", flow.normalized.enabled},
              {"start", flow.normalized.start},
              {"horizon", flow.normalized.horizon},
              {"frame_interval", flow.normalized.frame_interval}}}}},
          {"barrier", bar},
          {"checks", checks_j},
          {"output", {{"dir", output_dir}}}};
}

}  // namespace crf::cli

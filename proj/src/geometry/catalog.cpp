#include "crf/geometry/catalog.hpp"

#include "crf/geometry/models.hpp"

namespace crf::geom {

namespace {

int dim_param(const MetricParams& p, const char* name) {
  const double v = p.at(name);
  if (v != 1.0 && v != 2.0 && v != 3.0) throw ConfigError(std::string(name) + " must be 1, 2 or 3");
  return static_cast<int>(v);
}

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> c;
  c.push_back({"euclidean", "flat metric on C^n", {{"n", 1}},
               [](const MetricParams& p) { return euclidean(dim_param(p, "n")); }});
  c.push_back({"poincare-disk", "(1 - |z|^2)^{-2}, Ric = -2g", {},
               [](const MetricParams&) { return poincare_disk(); }});
  c.push_back({"poincare-ke", "2 (1 - |z|^2)^{-2}, Ric = -g", {},
               [](const MetricParams&) { return poincare_ke(); }});
  c.push_back({"poincare-ke-mobius", "pullback of poincare-ke by z -> (z - a)/(1 - a z)", {{"a", 0.3}},
               [](const MetricParams& p) {
                 return pullback_n1(poincare_ke(), mobius(cd(p.at("a"), 0.0)), "poincare-ke-mobius");
               }});
  c.push_back({"bergman-ball", "ddbar(-log(1 - |z|^2)) on the unit ball, Ric = -(n+1)g", {{"n", 2}},
               [](const MetricParams& p) { return bergman_ball(dim_param(p, "n")); }});
  c.push_back({"torsion-example", "g11 = 1, g22 = 1 + |z1|^2 on C^2 (non-Kahler)", {},
               [](const MetricParams&) { return torsion_example_1(); }});
  c.push_back({"fubini-study-cap", "(1 + |z|^2)^{-2} on a disk, Ric = +2g", {},
               [](const MetricParams&) { return fubini_study_cap(); }});
  c.push_back({"perturbed-poincare", "(1 + eps b(|z|^2)) (1 - |z|^2)^{-2}, bump supported on rho < rho_b",
               {{"eps", 0.1}, {"rho_b", 0.5}},
               [](const MetricParams& p) { return perturbed_poincare(p.at("eps"), p.at("rho_b")); }});
  c.push_back({"flat-torus", "flat metric on the torus [0, 2pi)^{2n}", {{"n", 1}},
               [](const MetricParams& p) { return flat_torus(dim_param(p, "n")); }});
  c.push_back({"bumpy-torus", "1 + a sin x sin y on the 2-torus", {{"amplitude", 0.3}},
               [](const MetricParams& p) { return bumpy_torus(p.at("amplitude")); }});
  c.push_back({"hermitian-torus", "non-Kahler metric on the 4-torus", {{"a", 0.3}, {"b", 0.2}},
               [](const MetricParams& p) { return hermitian_torus(p.at("a"), p.at("b")); }});
  c.push_back({"hermitian-plane", "hermitian-torus coefficients on C^2", {{"a", 0.3}, {"b", 0.2}},
               [](const MetricParams& p) { return hermitian_plane(p.at("a"), p.at("b")); }});
  return c;
}

}  // namespace

const std::vector<CatalogEntry>& metric_catalog() {
  static const std::vector<CatalogEntry> c = build();
  return c;
}

const CatalogEntry* find_metric(const std::string& key) {
  for (const auto& e : metric_catalog())
    if (e.key == key) return &e;
  return nullptr;
}

MetricPtr make_metric(const std::string& key, const MetricParams& params) {
  const CatalogEntry* e = find_metric(key);
  if (!e) throw ConfigError("unknown metric key '" + key + "' (see list-metrics)");
  MetricParams p = e->defaults;
  double scale = 1.0;
  for (const auto& [name, value] : params) {
    if (name == "scale") {
      scale = value;
      continue;
    }
    if (!p.count(name)) throw ConfigError("metric '" + key + "' has no parameter '" + name + "'");
    p[name] = value;
  }
  if (!(scale > 0.0)) throw ConfigError("metric '" + key + "': scale must be positive");
  MetricPtr m = e->make(p);
  if (scale != 1.0) m = std::make_shared<ScaledMetric>(m, scale);
  return m;
}

}  // namespace crf::geom

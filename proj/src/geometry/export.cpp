#include "crf/geometry/export.hpp"

namespace crf::geom {

namespace {

nlohmann::json point_json(const Point& z) {
  auto a = nlohmann::json::array();
  for (int i = 0; i < z.size(); ++i) a.push_back({z(i).real(), z(i).imag()});
  return a;
}

nlohmann::json record(const nlohmann::json& p, std::vector<int> idx, cd v) {
  return {{"point", p}, {"component-index", idx}, {"re", v.real()}, {"im", v.imag()}};
}

}  // namespace

nlohmann::json tensor_records(const Point& z, const Tensor3& t) {
  const auto p = point_json(z);
  auto out = nlohmann::json::array();
  const int n = t.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out.push_back(record(p, {i, j, k}, t(i, j, k)));
  return out;
}

nlohmann::json tensor_records(const Point& z, const Tensor4& t) {
  const auto p = point_json(z);
  auto out = nlohmann::json::array();
  const int n = t.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out.push_back(record(p, {i, j, k, l}, t(i, j, k, l)));
  return out;
}

nlohmann::json tensor_records(const Point& z, const CMat& m) {
  const auto p = point_json(z);
  auto out = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(record(p, {i, j}, m(i, j)));
  return out;
}

nlohmann::json package_records(const CurvaturePackage& pkg) {
  nlohmann::json j;
  j["connection"] = tensor_records(pkg.point, pkg.connection);
  j["torsion"] = tensor_records(pkg.point, pkg.torsion_lower);
  if (pkg.has_curvature) {
    j["curvature"] = tensor_records(pkg.point, pkg.curvature);
    j["ricci"] = tensor_records(pkg.point, pkg.ricci);
  }
  return j;
}

}  // namespace crf::geom

#pragma once

#include <json.hpp>

#include "crf/geometry/curvature.hpp"

namespace crf::geom {

/// Records {point, component-index, re, im} for every entry of the tensor.
nlohmann::json tensor_records(const Point& z, const Tensor3& t);
nlohmann::json tensor_records(const Point& z, const Tensor4& t);
nlohmann::json tensor_records(const Point& z, const CMat& m);

/// Named tensors of a package: connection, torsion, curvature, ricci.
nlohmann::json package_records(const CurvaturePackage& pkg);

}  // namespace crf::geom

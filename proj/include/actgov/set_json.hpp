#pragma once

#include <json.hpp>

#include "actgov/polytope.hpp"

namespace actgov {

/// {"dim": n, "parts": [{"A": [[...]], "b": [...], "strict": [...]}]}
nlohmann::json set_to_json(const PolyUnion& S);
/// Throws ParseError on malformed input.
PolyUnion set_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Mat& M);
nlohmann::json vector_to_json(const Vec& v);
/// A row-major array of rows. `cols` < 0 accepts any consistent width.
Mat matrix_from_json(const nlohmann::json& j, int cols = -1);
Vec vector_from_json(const nlohmann::json& j);

}  // namespace actgov

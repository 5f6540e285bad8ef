#include "actgov/set_json.hpp"

#include <string>

#include "actgov/error.hpp"

namespace actgov {

using nlohmann::json;

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Mat matrix_from_json(const json& j, int cols) {
  if (!j.is_array()) fail(ErrorKind::kParseError, "matrix must be an array of rows");
  const int rows = static_cast<int>(j.size());
  if (rows > 0) {
    if (!j[0].is_array()) fail(ErrorKind::kParseError, "matrix rows must be arrays");
    const int width = static_cast<int>(j[0].size());
    if (cols >= 0 && width != cols) {
      fail(ErrorKind::kParseError, "matrix has " + std::to_string(width) +
                                       " columns, expected " + std::to_string(cols));
    }
    cols = width;
  }
  Mat M(rows, cols < 0 ? 0 : cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols) {
      fail(ErrorKind::kParseError, "ragged matrix row " + std::to_string(i));
    }
    for (int k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) fail(ErrorKind::kParseError, "matrix entry is not a number");
      M(i, k) = j[i][k].get<double>();
    }
  }
  return M;
}

Vec vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorKind::kParseError, "vector must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorKind::kParseError, "vector entry is not a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

json set_to_json(const PolyUnion& S) {
  json parts = json::array();
  for (const Polytope& p : S) {
    json strict = json::array();
    for (int i = 0; i < p.rows(); ++i) strict.push_back(static_cast<bool>(p.strict(i)));
    parts.push_back({{"A", matrix_to_json(p.A())},
                     {"b", vector_to_json(p.b())},
                     {"strict", std::move(strict)}});
  }
  return {{"dim", S.dim()}, {"parts", std::move(parts)}};
}

PolyUnion set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("parts")) {
    fail(ErrorKind::kParseError, "set JSON needs \"dim\" and \"parts\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() <= 0) {
    fail(ErrorKind::kParseError, "set dimension must be a positive integer");
  }
  const int dim = j["dim"].get<int>();
  if (!j["parts"].is_array()) fail(ErrorKind::kParseError, "\"parts\" must be an array");
  PolyUnion out(dim);
  for (const json& part : j["parts"]) {
    if (!part.contains("A") || !part.contains("b")) {
      fail(ErrorKind::kParseError, "set part needs \"A\" and \"b\"");
    }
    Mat A = matrix_from_json(part["A"], dim);
    Vec b = vector_from_json(part["b"]);
    if (b.size() != A.rows()) fail(ErrorKind::kParseError, "set part row count mismatch");
    std::vector<bool> strict(A.rows(), false);
    if (part.contains("strict")) {
      const json& s = part["strict"];
      if (!s.is_array() || s.size() != static_cast<size_t>(A.rows())) {
        fail(ErrorKind::kParseError, "\"strict\" must match the row count");
      }
      for (size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_boolean()) fail(ErrorKind::kParseError, "strict flag is not boolean");
        strict[i] = s[i].get<bool>();
      }
    }
    out.add(Polytope(std::move(A), std::move(b), std::move(strict)));
  }
  return out;
}

}  // namespace actgov

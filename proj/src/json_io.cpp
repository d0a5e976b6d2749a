#include "hybrid/json_io.hpp"

#include <fstream>
#include <sstream>

namespace hybrid::io {

namespace {

cplx entry_from_json(const json& e, const std::string& field) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ConfigError(field, "matrix entries must be numbers or [re, im] pairs");
}

std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

CMatrix matrix_from_json(const json& value, const std::string& field) {
  if (!value.is_array()) throw ConfigError(field, "expected a row-major array of rows");
  const auto rows = static_cast<Eigen::Index>(value.size());
  if (rows == 0) return CMatrix(0, 0);
  if (!value[0].is_array()) throw ConfigError(field, "expected a row-major array of rows");
  const auto cols = static_cast<Eigen::Index>(value[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = value[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(field, "row " + std::to_string(r) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)], field);
    }
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json parse_document(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("", what + ": parse error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CMatrix load_matrix_file(const std::string& path) {
  const std::string text = read_file(path);
  const json doc = parse_document(text, path);
  if (doc.is_object()) {
    if (!doc.contains("matrix")) throw ConfigError("matrix", "missing key");
    return matrix_from_json(doc.at("matrix"), "matrix");
  }
  return matrix_from_json(doc, "matrix");
}

}  // namespace hybrid::io

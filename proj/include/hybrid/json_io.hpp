#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "hybrid/types.hpp"

namespace hybrid::io {

using json = nlohmann::json;

// Matrices are row-major nested arrays; each entry is either a plain number
// or an [re, im] pair. Output always uses [re, im] pairs.

CMatrix matrix_from_json(const json& value, const std::string& field);
json matrix_to_json(const CMatrix& m);
json vector_to_json(const RVector& v);
json complex_to_json(cplx z);

/// Reads a matrix document (the shared matrix file format).
CMatrix load_matrix_file(const std::string& path);

/// Parses a JSON document; malformed input raises ConfigError with
/// "line L, column C" in the message.
json parse_document(std::string_view text, const std::string& what);

std::string read_file(const std::string& path);

}  // namespace hybrid::io

#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "orbitcert/types.hpp"

namespace orbitcert {

// `.cmat` text format: line 1 "rows cols", then rows*cols lines "re im"
// in row-major order, locale-independent decimal.
ComplexMatrix read_cmat(std::istream& in);
ComplexMatrix read_cmat_file(const std::string& path);
void write_cmat(std::ostream& out, const Matrix& m);
void write_cmat_file(const std::string& path, const Matrix& m);

// {"rows", "cols", "entries": [[re, im], ...]} row-major.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace orbitcert

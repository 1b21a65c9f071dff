#pragma once

#include "sparsedep/generators.hpp"

#include <istream>
#include <stdexcept>
#include <string>

namespace sparsedep {

class MatrixMarketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structure of a square coordinate-format matrix; values are ignored.
// Symmetric, skew-symmetric and hermitian files are expanded to both
// triangles. Explicit zeros count as entries.
Pattern read_matrix_market(std::istream& in, const std::string& name = "<stream>");
Pattern read_matrix_market(const std::string& path);

// A path, or a fixture name resolved as <path>.mtx when <path> does not exist.
std::string resolve_matrix_path(const std::string& path);

}  // namespace sparsedep

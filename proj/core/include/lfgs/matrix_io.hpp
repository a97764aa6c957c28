#pragma once

#include <iosfwd>
#include <string>

#include "lfgs/geodesic.hpp"

namespace lfgs {

// Shared matrix text format: first line "n p", then n lines of p decimal
// values with 17 significant digits.

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

void save_matrix(const std::string& filename, const Matrix& m);
Matrix load_matrix(const std::string& filename);

// A stored point failing the manifold tolerance on load is rejected.
StiefelPoint load_point(const std::string& filename);
void save_point(const std::string& filename, const StiefelPoint& x);

// Path file: header "m n p", then m stacked matrices in the shared format.
void write_path(std::ostream& os, const PiecewisePath& path);
PiecewisePath read_path(std::istream& is);
void save_path(const std::string& filename, const PiecewisePath& path);
PiecewisePath load_path(const std::string& filename);

}  // namespace lfgs

#ifndef KRYDOM_IO_HPP
#define KRYDOM_IO_HPP

#include <string>

#include "krydom/matrix_core.hpp"

namespace krydom::io {

enum class MatrixMarketFormat { Array, Coordinate };

/// Reads `matrix array|coordinate real general|symmetric` files.
Matrix read_matrix_market(const std::string& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_matrix_market(const Matrix& A, const std::string& path,
                         MatrixMarketFormat format = MatrixMarketFormat::Array);

/// Dense numeric CSV, one row per line, comma separated.
Matrix read_csv(const std::string& path);

/// Formats a double with 17 significant digits (shared by all writers).
std::string format_double(double v);

}  // namespace krydom::io

#endif

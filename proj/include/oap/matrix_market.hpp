#ifndef OAP_MATRIX_MARKET_HPP
#define OAP_MATRIX_MARKET_HPP

// Matrix Market exchange format, real general only:
//   "%%MatrixMarket matrix coordinate real general" -> CSR operator
//   "%%MatrixMarket matrix array real general"      -> dense operator / vector
// Files use 1-based indices and column-major array order; values are
// written with 17 significant digits so that a read-back is exact.

#include <iosfwd>
#include <string>

#include "oap/linear_operator.hpp"

namespace oap::mm {

LinearOperator<double> read_matrix(std::istream& in);
LinearOperator<double> read_matrix(const std::string& path);

/// Reads an n x 1 (or 1 x n) array, or a coordinate matrix with one column.
Vector<double> read_vector(std::istream& in);
Vector<double> read_vector(const std::string& path);

/// CSR operators are written in coordinate format, dense ones as arrays.
void write_matrix(std::ostream& out, const LinearOperator<double>& A);
void write_matrix(const std::string& path, const LinearOperator<double>& A);

void write_vector(std::ostream& out, const Vector<double>& v);
void write_vector(const std::string& path, const Vector<double>& v);

}  // namespace oap::mm

#endif  // OAP_MATRIX_MARKET_HPP

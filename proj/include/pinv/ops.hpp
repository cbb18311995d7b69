#pragma once

#include "pinv/matrix.hpp"

#include <cstddef>
#include <cstdint>

namespace pinv {

// Fundamental matrix arithmetic. Results take the backend of the left-hand
// operand; every loop walks rows in the same order for both backends, so the
// arithmetic (and therefore the bits) never depends on the layout.

DenseMatrix transpose(const DenseMatrix& a);

/// r*A + s*B elementwise. Throws DimensionMismatch unless A and B agree.
DenseMatrix linear_combine(double r, const DenseMatrix& a, double s, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(double r, const DenseMatrix& a);

/// Standard product, accumulated left to right in binary64.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// A^p * B^q by repeated multiplication. A zero exponent contributes the
/// identity; any exponent other than 1 needs a square operand (NonSquarePower).
DenseMatrix power_product(const DenseMatrix& a, std::uint32_t p, const DenseMatrix& b, std::uint32_t q);

/// Column k (0-based) as an m x 1 matrix.
DenseMatrix column(const DenseMatrix& a, std::size_t k);

/// The first k columns as an m x k matrix.
DenseMatrix leading_columns(const DenseMatrix& a, std::size_t k);

/// Top-left k x k block.
DenseMatrix leading_block(const DenseMatrix& a, std::size_t k);

/// Stack `bottom` (1 x a.cols()) under `a`.
DenseMatrix append_row(const DenseMatrix& a, const DenseMatrix& bottom);

/// Value of a 1 x 1 matrix.
double scalar(const DenseMatrix& a);

} // namespace pinv

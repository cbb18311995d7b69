#pragma once

#include "pinv/matrix.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pinv {

/**
 * Coordinate-format sparse matrix: three parallel vectors of 0-based row
 * indices, column indices and nonzero values, sorted by (row, col) with no
 * duplicates and no stored zeros.
 */
struct SparseCoo {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_idx;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    std::size_t nnz() const noexcept { return values.size(); }

    /// Throws LengthMismatch, IndexOutOfRange, NonFinite or ParseError
    /// (unsorted, duplicate or stored zero).
    void validate() const;

    /// Sorts entries and rejects duplicates; zeros are dropped.
    static SparseCoo from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<std::size_t> row_idx,
                                   std::vector<std::size_t> col_idx,
                                   std::vector<double> values);

    friend bool operator==(const SparseCoo&, const SparseCoo&) = default;
};

/// Entries with |value| <= zero_tol are dropped.
SparseCoo dense_to_coo(const DenseMatrix& a, double zero_tol = 0.0);
DenseMatrix coo_to_dense(const SparseCoo& s, Backend backend = Backend::Flat);

/// The three component strings stored for a COO matrix (sparse flags 1, 2, 3).
struct CooStrings {
    std::string row_idx;
    std::string col_idx;
    std::string values;
};

CooStrings to_coo_strings(const SparseCoo& s);
SparseCoo from_coo_strings(const CooStrings& strings, std::size_t rows, std::size_t cols);

} // namespace pinv

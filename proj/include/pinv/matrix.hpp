#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pinv {

/// Element layout of a DenseMatrix. Both layouts are row-major and every
/// operation produces bit-identical results for either one.
enum class Backend {
    Flat,   ///< one contiguous buffer of rows*cols values
    Nested, ///< one buffer per row
};

const char* backend_name(Backend backend);

/**
 * Real m x n matrix in binary64. Dimensions are at least 1 x 1 and every
 * element is finite. Value type: copies are deep, and the const interface is
 * safe to share between threads.
 */
class DenseMatrix {
public:
    /// Zero matrix. Throws DimensionMismatch for a zero dimension.
    DenseMatrix(std::size_t rows, std::size_t cols, Backend backend = Backend::Flat);

    /// Row-major values; throws LengthMismatch if values.size() != rows*cols
    /// and NonFinite on NaN/Inf.
    static DenseMatrix from_row_major(std::size_t rows, std::size_t cols,
                                      std::span<const double> values,
                                      Backend backend = Backend::Flat);

    /// Throws RaggedRows when the rows differ in length.
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows,
                                 Backend backend = Backend::Flat);
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                 Backend backend = Backend::Flat);

    static DenseMatrix identity(std::size_t n, Backend backend = Backend::Flat);
    static DenseMatrix diagonal(std::span<const double> diag, Backend backend = Backend::Flat);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return rows_ * cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    Backend backend() const noexcept { return backend_; }

    double operator()(std::size_t i, std::size_t j) const { return row(i)[j]; }
    double& operator()(std::size_t i, std::size_t j) { return row(i)[j]; }

    std::span<const double> row(std::size_t i) const;
    std::span<double> row(std::size_t i);

    std::vector<double> to_row_major() const;
    DenseMatrix with_backend(Backend backend) const;

    /// Throws NonFinite if any element is NaN or infinite.
    void require_finite() const;

    /// Numeric equality of dimensions and elements (backend is ignored).
    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b);

private:
    std::size_t rows_;
    std::size_t cols_;
    Backend backend_;
    std::vector<double> flat_;
    std::vector<std::vector<double>> nested_;
};

/// Same dimensions and the same bit pattern in every element.
bool bit_identical(const DenseMatrix& a, const DenseMatrix& b);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);

} // namespace pinv

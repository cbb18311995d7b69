#include "pinv/matrix.hpp"

#include "pinv/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace pinv {

const char* backend_name(Backend backend)
{
    return backend == Backend::Flat ? "flat" : "nested";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Backend backend)
    : rows_(rows), cols_(cols), backend_(backend)
{
    if (rows == 0 || cols == 0)
        throw Error(ErrorCode::DimensionMismatch,
                    "matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    if (backend_ == Backend::Flat)
        flat_.assign(rows * cols, 0.0);
    else
        nested_.assign(rows, std::vector<double>(cols, 0.0));
}

DenseMatrix DenseMatrix::from_row_major(std::size_t rows, std::size_t cols,
                                        std::span<const double> values, Backend backend)
{
    if (values.size() != rows * cols)
        throw Error(ErrorCode::LengthMismatch,
                    "expected " + std::to_string(rows * cols) + " elements, got " +
                        std::to_string(values.size()));
    DenseMatrix out(rows, cols, backend);
    for (std::size_t i = 0; i < rows; ++i)
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i * cols), cols, out.row(i).begin());
    out.require_finite();
    return out;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows,
                                   Backend backend)
{
    std::vector<std::vector<double>> tmp;
    for (const auto& r : rows)
        tmp.emplace_back(r);
    return from_rows(tmp, backend);
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows, Backend backend)
{
    if (rows.empty() || rows.front().empty())
        throw Error(ErrorCode::Empty, "matrix has no elements");
    const std::size_t cols = rows.front().size();
    DenseMatrix out(rows.size(), cols, backend);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw Error(ErrorCode::RaggedRows, "row " + std::to_string(i) + " has " +
                                                   std::to_string(rows[i].size()) +
                                                   " elements, expected " + std::to_string(cols));
        std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
    }
    out.require_finite();
    return out;
}

DenseMatrix DenseMatrix::identity(std::size_t n, Backend backend)
{
    DenseMatrix out(n, n, backend);
    for (std::size_t i = 0; i < n; ++i)
        out(i, i) = 1.0;
    return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag, Backend backend)
{
    DenseMatrix out(diag.size(), diag.size(), backend);
    for (std::size_t i = 0; i < diag.size(); ++i)
        out(i, i) = diag[i];
    out.require_finite();
    return out;
}

std::span<const double> DenseMatrix::row(std::size_t i) const
{
    if (backend_ == Backend::Flat)
        return std::span<const double>(flat_).subspan(i * cols_, cols_);
    return nested_[i];
}

std::span<double> DenseMatrix::row(std::size_t i)
{
    if (backend_ == Backend::Flat)
        return std::span<double>(flat_).subspan(i * cols_, cols_);
    return nested_[i];
}

std::vector<double> DenseMatrix::to_row_major() const
{
    if (backend_ == Backend::Flat)
        return flat_;
    std::vector<double> out;
    out.reserve(size());
    for (const auto& r : nested_)
        out.insert(out.end(), r.begin(), r.end());
    return out;
}

DenseMatrix DenseMatrix::with_backend(Backend backend) const
{
    if (backend == backend_)
        return *this;
    DenseMatrix out(rows_, cols_, backend);
    for (std::size_t i = 0; i < rows_; ++i)
        std::copy_n(row(i).begin(), cols_, out.row(i).begin());
    return out;
}

void DenseMatrix::require_finite() const
{
    for (std::size_t i = 0; i < rows_; ++i)
        for (double v : row(i))
            if (!std::isfinite(v))
                throw Error(ErrorCode::NonFinite, "matrix element in row " + std::to_string(i) +
                                                      " is not finite");
}

bool operator==(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        return false;
    for (std::size_t i = 0; i < a.rows_; ++i)
        if (!std::equal(a.row(i).begin(), a.row(i).end(), b.row(i).begin()))
            return false;
    return true;
}

bool bit_identical(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        auto rb = b.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (std::bit_cast<std::uint64_t>(ra[j]) != std::bit_cast<std::uint64_t>(rb[j]))
                return false;
    }
    return true;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::DimensionMismatch, "max_abs_diff: shapes differ");
    double out = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out = std::max(out, std::abs(a(i, j) - b(i, j)));
    return out;
}

double max_abs(const DenseMatrix& a)
{
    double out = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double v : a.row(i))
            out = std::max(out, std::abs(v));
    return out;
}

double frobenius_norm(const DenseMatrix& a)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double v : a.row(i))
            sum += v * v;
    return std::sqrt(sum);
}

} // namespace pinv

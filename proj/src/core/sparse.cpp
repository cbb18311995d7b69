#include "pinv/sparse.hpp"

#include "pinv/error.hpp"
#include "pinv/format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pinv {

void SparseCoo::validate() const
{
    if (row_idx.size() != values.size() || col_idx.size() != values.size())
        throw Error(ErrorCode::LengthMismatch, "COO vectors differ in length");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (row_idx[i] >= rows || col_idx[i] >= cols)
            throw Error(ErrorCode::IndexOutOfRange,
                        "COO entry (" + std::to_string(row_idx[i]) + "," +
                            std::to_string(col_idx[i]) + ") outside " + dimension_string(rows, cols));
        if (!std::isfinite(values[i]))
            throw Error(ErrorCode::NonFinite, "COO value is not finite");
        if (values[i] == 0.0)
            throw Error(ErrorCode::ParseError, "COO stores an explicit zero");
        if (i > 0) {
            const bool ordered = row_idx[i - 1] < row_idx[i] ||
                                 (row_idx[i - 1] == row_idx[i] && col_idx[i - 1] < col_idx[i]);
            if (!ordered)
                throw Error(ErrorCode::ParseError, "COO entries unsorted or duplicated");
        }
    }
}

SparseCoo SparseCoo::from_triplets(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_idx,
                                   std::vector<std::size_t> col_idx, std::vector<double> values)
{
    if (rows == 0 || cols == 0)
        throw Error(ErrorCode::DimensionMismatch, "COO dimensions must be positive");
    if (row_idx.size() != values.size() || col_idx.size() != values.size())
        throw Error(ErrorCode::LengthMismatch, "COO vectors differ in length");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(row_idx[a], col_idx[a]) < std::pair(row_idx[b], col_idx[b]);
    });
    SparseCoo out{rows, cols, {}, {}, {}};
    for (std::size_t n = 0; n < order.size(); ++n) {
        const std::size_t i = order[n];
        if (n > 0 && row_idx[i] == row_idx[order[n - 1]] && col_idx[i] == col_idx[order[n - 1]])
            throw Error(ErrorCode::ParseError, "duplicate COO coordinate");
        if (values[i] == 0.0)
            continue;
        out.row_idx.push_back(row_idx[i]);
        out.col_idx.push_back(col_idx[i]);
        out.values.push_back(values[i]);
    }
    out.validate();
    return out;
}

SparseCoo dense_to_coo(const DenseMatrix& a, double zero_tol)
{
    SparseCoo out{a.rows(), a.cols(), {}, {}, {}};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (std::abs(r[j]) <= zero_tol)
                continue;
            out.row_idx.push_back(i);
            out.col_idx.push_back(j);
            out.values.push_back(r[j]);
        }
    }
    return out;
}

DenseMatrix coo_to_dense(const SparseCoo& s, Backend backend)
{
    s.validate();
    DenseMatrix out(s.rows, s.cols, backend);
    for (std::size_t i = 0; i < s.nnz(); ++i)
        out(s.row_idx[i], s.col_idx[i]) = s.values[i];
    return out;
}

namespace {

std::string join_indices(const std::vector<std::size_t>& idx)
{
    std::string out;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i)
            out.push_back(',');
        out += std::to_string(idx[i]);
    }
    return out;
}

std::vector<std::size_t> split_indices(const std::string& text)
{
    std::vector<std::size_t> out;
    for (double v : split_numbers(text)) {
        if (v < 0 || v != std::floor(v))
            throw Error(ErrorCode::ParseError, "COO index is not a non-negative integer");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

} // namespace

CooStrings to_coo_strings(const SparseCoo& s)
{
    return {join_indices(s.row_idx), join_indices(s.col_idx), join_numbers(s.values)};
}

SparseCoo from_coo_strings(const CooStrings& strings, std::size_t rows, std::size_t cols)
{
    SparseCoo out{rows, cols, split_indices(strings.row_idx), split_indices(strings.col_idx),
                  split_numbers(strings.values)};
    out.validate();
    return out;
}

} // namespace pinv

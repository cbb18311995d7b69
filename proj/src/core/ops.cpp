#include "pinv/ops.hpp"

#include "pinv/error.hpp"

#include <algorithm>
#include <string>

namespace pinv {

namespace {

std::string shape(const DenseMatrix& a)
{
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(op) + ": operands are " + shape(a) + " and " + shape(b));
}

} // namespace

DenseMatrix transpose(const DenseMatrix& a)
{
    DenseMatrix out(a.cols(), a.rows(), a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto src = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(j, i) = src[j];
    }
    return out;
}

DenseMatrix linear_combine(double r, const DenseMatrix& a, double s, const DenseMatrix& b)
{
    require_same_shape(a, b, "linear_combine");
    DenseMatrix out(a.rows(), a.cols(), a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        auto rb = b.row(i);
        auto ro = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            ro[j] = r * ra[j] + s * rb[j];
    }
    out.require_finite();
    return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b)
{
    require_same_shape(a, b, "add");
    DenseMatrix out(a.rows(), a.cols(), a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        auto rb = b.row(i);
        auto ro = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            ro[j] = ra[j] + rb[j];
    }
    out.require_finite();
    return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b)
{
    require_same_shape(a, b, "subtract");
    DenseMatrix out(a.rows(), a.cols(), a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        auto rb = b.row(i);
        auto ro = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            ro[j] = ra[j] - rb[j];
    }
    out.require_finite();
    return out;
}

DenseMatrix scale(double r, const DenseMatrix& a)
{
    DenseMatrix out(a.rows(), a.cols(), a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        auto ro = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            ro[j] = r * ra[j];
    }
    out.require_finite();
    return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols() != b.rows())
        throw Error(ErrorCode::DimensionMismatch,
                    "multiply: " + shape(a) + " times " + shape(b));
    DenseMatrix out(a.rows(), b.cols(), a.backend());
    // i-k-j order: each output element accumulates its terms in increasing k.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        auto ro = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ra[k];
            auto rb = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                ro[j] += aik * rb[j];
        }
    }
    out.require_finite();
    return out;
}

namespace {

DenseMatrix matrix_power(const DenseMatrix& a, std::uint32_t p)
{
    if (p == 1)
        return a;
    if (!a.is_square())
        throw Error(ErrorCode::NonSquarePower,
                    "power " + std::to_string(p) + " of non-square " + shape(a));
    if (p == 0)
        return DenseMatrix::identity(a.rows(), a.backend());
    DenseMatrix out = a;
    for (std::uint32_t i = 1; i < p; ++i)
        out = multiply(out, a);
    return out;
}

} // namespace

DenseMatrix power_product(const DenseMatrix& a, std::uint32_t p, const DenseMatrix& b, std::uint32_t q)
{
    DenseMatrix left = matrix_power(a, p);
    DenseMatrix right = matrix_power(b, q);
    if (left.backend() != a.backend())
        left = left.with_backend(a.backend());
    return multiply(left, right);
}

DenseMatrix column(const DenseMatrix& a, std::size_t k)
{
    if (k >= a.cols())
        throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(k) + " of " + shape(a));
    DenseMatrix out(a.rows(), 1, a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i)
        out(i, 0) = a(i, k);
    return out;
}

DenseMatrix leading_columns(const DenseMatrix& a, std::size_t k)
{
    if (k == 0 || k > a.cols())
        throw Error(ErrorCode::IndexOutOfRange,
                    "first " + std::to_string(k) + " columns of " + shape(a));
    DenseMatrix out(a.rows(), k, a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i)
        std::copy_n(a.row(i).begin(), k, out.row(i).begin());
    return out;
}

DenseMatrix leading_block(const DenseMatrix& a, std::size_t k)
{
    if (k == 0 || k > a.rows() || k > a.cols())
        throw Error(ErrorCode::IndexOutOfRange,
                    "leading " + std::to_string(k) + "x" + std::to_string(k) + " block of " + shape(a));
    DenseMatrix out(k, k, a.backend());
    for (std::size_t i = 0; i < k; ++i)
        std::copy_n(a.row(i).begin(), k, out.row(i).begin());
    return out;
}

DenseMatrix append_row(const DenseMatrix& a, const DenseMatrix& bottom)
{
    if (bottom.rows() != 1 || bottom.cols() != a.cols())
        throw Error(ErrorCode::DimensionMismatch,
                    "append_row: cannot stack " + shape(bottom) + " under " + shape(a));
    DenseMatrix out(a.rows() + 1, a.cols(), a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i)
        std::copy_n(a.row(i).begin(), a.cols(), out.row(i).begin());
    std::copy_n(bottom.row(0).begin(), a.cols(), out.row(a.rows()).begin());
    return out;
}

double scalar(const DenseMatrix& a)
{
    if (a.rows() != 1 || a.cols() != 1)
        throw Error(ErrorCode::DimensionMismatch, "expected a 1x1 matrix, got " + shape(a));
    return a(0, 0);
}

} // namespace pinv

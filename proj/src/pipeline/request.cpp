#include "pinv/error.hpp"
#include "pinv/format.hpp"
#include "pinv/ops.hpp"
#include "pinv/pipeline.hpp"

#include <cmath>
#include <string>

namespace pinv {

const std::array<OpCode, 9>& all_op_codes()
{
    static const std::array<OpCode, 9> codes{OpCode::Inverse,  OpCode::Pinv,     OpCode::WeightedPinv,
                                             OpCode::Add,      OpCode::Subtract, OpCode::Multiply,
                                             OpCode::LinearCombination, OpCode::PowerProduct, OpCode::Scale};
    return codes;
}

std::string_view op_code_text(OpCode op)
{
    switch (op) {
    case OpCode::Inverse: return "A(-1)";
    case OpCode::Pinv: return "A(+)";
    case OpCode::WeightedPinv: return "A(MN)";
    case OpCode::Add: return "A+B";
    case OpCode::Subtract: return "A-B";
    case OpCode::Multiply: return "A*B";
    case OpCode::LinearCombination: return "r*A+s*B";
    case OpCode::PowerProduct: return "A^p*B^q";
    case OpCode::Scale: return "r*A";
    }
    return "";
}

OpCode parse_op_code(std::string_view text)
{
    for (OpCode op : all_op_codes())
        if (op_code_text(op) == text)
            return op;
    throw Error(ErrorCode::UnknownOperation, "unknown operation '" + std::string(text) + "'");
}

std::size_t arity(OpCode op)
{
    switch (op) {
    case OpCode::Inverse:
    case OpCode::Pinv:
    case OpCode::Scale:
        return 1;
    case OpCode::WeightedPinv:
        return 3;
    default:
        return 2;
    }
}

void OperationRequest::validate() const
{
    if (operands.size() != arity(operation))
        throw Error(ErrorCode::BadRequest, std::string(op_code_text(operation)) + " takes " +
                                               std::to_string(arity(operation)) + " operand(s), got " +
                                               std::to_string(operands.size()));
    if (operation == OpCode::PowerProduct && (p < 0 || q < 0))
        throw Error(ErrorCode::BadRequest, "exponents p and q must be non-negative");
    if (!std::isfinite(r) || !std::isfinite(s))
        throw Error(ErrorCode::BadRequest, "coefficients must be finite");
}

ResultKey OperationRequest::key(const std::array<std::int64_t, 3>& ids) const
{
    ResultKey k;
    k.operation = std::string(op_code_text(operation));
    k.matrix_i = ids[0];
    k.matrix_ii = ids[1];
    k.matrix_iii = ids[2];
    switch (operation) {
    case OpCode::LinearCombination:
        k.r = r;
        k.s = s;
        break;
    case OpCode::Scale:
        k.r = r;
        break;
    case OpCode::PowerProduct:
        k.p = p;
        k.q = q;
        break;
    default:
        break;
    }
    return k;
}

bool OperationRequest::non_integer_coefficients() const
{
    const ResultKey k = key({0, 0, 0});
    return k.r != std::floor(k.r) || k.s != std::floor(k.s);
}

DenseMatrix compute_operation(OpCode op, std::span<const DenseMatrix> x, double r, double s, std::int64_t p,
                              std::int64_t q, const Tolerances& tol)
{
    if (x.size() != arity(op))
        throw Error(ErrorCode::BadRequest, "wrong number of operands for " + std::string(op_code_text(op)));
    switch (op) {
    case OpCode::Inverse:
        return regular_inverse(x[0], tol);
    case OpCode::Pinv:
        return mp_pinv(x[0], tol);
    case OpCode::WeightedPinv:
        return weighted_pinv(x[0], WeightPair{x[1], x[2]}, tol);
    case OpCode::Add:
        return linear_combine(1.0, x[0], 1.0, x[1]);
    case OpCode::Subtract:
        return linear_combine(1.0, x[0], -1.0, x[1]);
    case OpCode::Multiply:
        return multiply(x[0], x[1]);
    case OpCode::LinearCombination:
        return linear_combine(r, x[0], s, x[1]);
    case OpCode::PowerProduct:
        if (p < 0 || q < 0 || p > 1000000 || q > 1000000)
            throw Error(ErrorCode::BadRequest, "exponents out of range");
        return power_product(x[0], static_cast<std::uint32_t>(p), x[1], static_cast<std::uint32_t>(q));
    case OpCode::Scale:
        return linear_combine(r, x[0], 0.0, x[0]);
    }
    throw Error(ErrorCode::UnknownOperation, "unknown operation");
}

std::vector<std::vector<std::string>> render_result(const DenseMatrix& x, int places)
{
    std::vector<std::vector<std::string>> grid(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (double v : x.row(i))
            grid[i].push_back(display_round(v, places));
    return grid;
}

} // namespace pinv

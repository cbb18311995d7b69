#pragma once

#include "pinv/engine.hpp"
#include "pinv/matrix.hpp"
#include "pinv/sparse.hpp"
#include "pinv/store.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pinv {

enum class OpCode {
    Inverse,           ///< "A(-1)"
    Pinv,              ///< "A(+)"
    WeightedPinv,      ///< "A(MN)", operands A, M, N
    Add,               ///< "A+B"
    Subtract,          ///< "A-B"
    Multiply,          ///< "A*B"
    LinearCombination, ///< "r*A+s*B"
    PowerProduct,      ///< "A^p*B^q"
    Scale,             ///< "r*A"
};

std::string_view op_code_text(OpCode op);
/// Throws UnknownOperation.
OpCode parse_op_code(std::string_view text);
std::size_t arity(OpCode op);
const std::array<OpCode, 9>& all_op_codes();

struct TestName {
    std::string name;
};

struct StoredId {
    std::int64_t id;
};

/// An operand given inline (dense or COO), by store id, or by test-matrix name.
using Operand = std::variant<DenseMatrix, SparseCoo, StoredId, TestName>;

/**
 * One requested operation. Coefficients not used by the operation are
 * ignored and stored as 0 in the cache key: r and s for "r*A+s*B", r for
 * "r*A", p and q for "A^p*B^q".
 */
struct OperationRequest {
    OpCode operation = OpCode::Add;
    std::vector<Operand> operands;
    double r = 0.0;
    double s = 0.0;
    std::int64_t p = 0;
    std::int64_t q = 0;

    /// Throws BadRequest on wrong arity or negative exponents.
    void validate() const;
    /// The coefficients as they enter the cache key.
    ResultKey key(const std::array<std::int64_t, 3>& operand_ids) const;
    /// True when r or s is used and not an integer.
    bool non_integer_coefficients() const;
};

struct ComputeResponse {
    std::int64_t result_id = 0;
    DenseMatrix elements{1, 1};
    bool cache_hit = false;
    std::chrono::nanoseconds elapsed{0};
    std::array<std::int64_t, 3> operand_ids{0, 0, 0};
    bool non_integer_coefficients = false;
};

/// Pure evaluation of an operation; no store involved.
DenseMatrix compute_operation(OpCode op, std::span<const DenseMatrix> operands, double r, double s,
                              std::int64_t p, std::int64_t q, const Tolerances& tol = {});

/// Display grid: one row of rounded cells per matrix row.
std::vector<std::vector<std::string>> render_result(const DenseMatrix& x, int places = 3);

/**
 * Compute-or-lookup front end over a MatrixStore. Every operand is resolved
 * to a stored id first; the (operation, ids, coefficients) tuple then either
 * hits a stored result or is computed once and stored.
 */
class ComputePipeline {
public:
    explicit ComputePipeline(MatrixStore& store,
                             TestMatrixRegistry registry = TestMatrixRegistry::with_builtins(),
                             Tolerances tol = {}, Backend backend = Backend::Flat);

    ComputeResponse execute(const OperationRequest& request);

    /// Stores an uploaded matrix text file, reusing an identical stored
    /// matrix. Throws EmptyUpload, ParseError or RaggedRows.
    std::int64_t ingest_upload(std::string_view bytes, std::string_view declared_name = "upload.txt");

    /// Stored id of an operand, inserting it when absent.
    std::int64_t resolve(const Operand& operand);

    /// Number of operations actually evaluated (cache misses).
    std::uint64_t compute_count() const noexcept { return computed_.load(); }

    MatrixStore& store() noexcept { return store_; }
    const TestMatrixRegistry& registry() const noexcept { return registry_; }

private:
    std::int64_t resolve_dense(const DenseMatrix& a, std::string_view test);
    std::int64_t resolve_sparse(const SparseCoo& s);

    MatrixStore& store_;
    TestMatrixRegistry registry_;
    Tolerances tol_;
    Backend backend_;
    std::atomic<std::uint64_t> computed_{0};
};

} // namespace pinv

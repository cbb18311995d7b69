#include "pinv/pipeline.hpp"

#include "pinv/error.hpp"
#include "pinv/format.hpp"

#include <string>

namespace pinv {

ComputePipeline::ComputePipeline(MatrixStore& store, TestMatrixRegistry registry, Tolerances tol, Backend backend)
    : store_(store), registry_(std::move(registry)), tol_(tol), backend_(backend)
{
    tol_.validate();
}

std::int64_t ComputePipeline::resolve_dense(const DenseMatrix& a, std::string_view test)
{
    if (test.empty()) {
        if (const auto id = store_.find_matrix(a))
            return *id;
    }
    try {
        return store_.insert_matrix(a, test);
    } catch (const Error& e) {
        // Lost a race against an identical insert.
        if (e.code() != ErrorCode::DuplicateMatrix)
            throw;
        const auto id = test.empty() ? store_.find_matrix(a) : store_.find_test_matrix(test);
        if (!id)
            throw;
        return *id;
    }
}

std::int64_t ComputePipeline::resolve_sparse(const SparseCoo& s)
{
    if (const auto id = store_.find_matrix(s))
        return *id;
    try {
        return store_.insert_matrix(s);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DuplicateMatrix)
            throw;
        const auto id = store_.find_matrix(s);
        if (!id)
            throw;
        return *id;
    }
}

std::int64_t ComputePipeline::resolve(const Operand& operand)
{
    if (const auto* dense = std::get_if<DenseMatrix>(&operand))
        return resolve_dense(*dense, {});
    if (const auto* sparse = std::get_if<SparseCoo>(&operand))
        return resolve_sparse(*sparse);
    if (const auto* stored = std::get_if<StoredId>(&operand)) {
        const MatrixRecord rec = store_.matrix_record(stored->id);
        if (rec.sparse > 1)
            throw Error(ErrorCode::UnknownId,
                        "id " + std::to_string(stored->id) + " is a COO component, not a matrix");
        return stored->id;
    }
    const auto& test = std::get<TestName>(operand);
    if (const auto id = store_.find_test_matrix(test.name))
        return *id;
    const auto matrix = registry_.find(test.name);
    if (!matrix)
        throw Error(ErrorCode::UnknownTestMatrix, "no test matrix named '" + test.name + "'");
    return resolve_dense(*matrix, test.name);
}

ComputeResponse ComputePipeline::execute(const OperationRequest& request)
{
    const auto start = std::chrono::steady_clock::now();
    request.validate();

    ComputeResponse response;
    for (std::size_t i = 0; i < request.operands.size(); ++i)
        response.operand_ids[i] = resolve(request.operands[i]);
    response.non_integer_coefficients = request.non_integer_coefficients();

    const ResultKey key = request.key(response.operand_ids);
    if (const auto rec = store_.find_result_record(key)) {
        const Dimension dim = parse_dimension(rec->dimension);
        try {
            response.elements = from_r_string(rec->elements_out, dim.rows, dim.cols, backend_);
        } catch (const Error& e) {
            throw Error(ErrorCode::CorruptRecord, "result " + std::to_string(rec->id) + ": " + e.what());
        }
        response.result_id = rec->id;
        response.cache_hit = true;
        response.elapsed = std::chrono::steady_clock::now() - start;
        return response;
    }

    std::vector<DenseMatrix> operands;
    operands.reserve(request.operands.size());
    for (std::size_t i = 0; i < request.operands.size(); ++i)
        operands.push_back(store_.load_matrix(response.operand_ids[i], backend_));
    ++computed_;
    DenseMatrix result = compute_operation(request.operation, operands, key.r, key.s, key.p, key.q, tol_);

    try {
        response.result_id = store_.insert_result(key, result);
        response.elements = std::move(result);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DuplicateResult)
            throw;
        // A concurrent identical request stored first; answer with its record.
        const auto rec = store_.find_result_record(key);
        if (!rec)
            throw;
        const Dimension dim = parse_dimension(rec->dimension);
        response.result_id = rec->id;
        response.elements = from_r_string(rec->elements_out, dim.rows, dim.cols, backend_);
    }
    response.cache_hit = false;
    response.elapsed = std::chrono::steady_clock::now() - start;
    return response;
}

std::int64_t ComputePipeline::ingest_upload(std::string_view bytes, std::string_view declared_name)
{
    if (bytes.empty())
        throw Error(ErrorCode::EmptyUpload, std::string(declared_name) + " is empty.");
    return resolve_dense(parse_matrix_text(bytes, backend_), {});
}

} // namespace pinv

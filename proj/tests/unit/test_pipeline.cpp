#include "check_error.hpp"
#include "oracles.hpp"
#include "example_matrices.hpp"
#include "pinv/format.hpp"
#include "pinv/ops.hpp"
#include "pinv/pipeline.hpp"

#include <doctest.h>

#include <random>
#include <thread>
#include <vector>

using namespace pinv;

TEST_SUITE("pipeline")
{
    TEST_CASE("operation codes")
    {
        for (const auto op : all_op_codes())
            CHECK(parse_op_code(op_code_text(op)) == op);
        CHECK(arity(OpCode::WeightedPinv) == 3);
        CHECK(arity(OpCode::Multiply) == 2);
        CHECK(arity(OpCode::Scale) == 1);
        CHECK_ERROR_CODE(parse_op_code("A/B"), ErrorCode::UnknownOperation);
    }

    TEST_CASE("linear combination of the 6x6 example")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        OperationRequest req{OpCode::LinearCombination, {testing::matrix_b(), testing::matrix_b()}, 3, 4};
        const auto first = pipeline.execute(req);
        CHECK_FALSE(first.cache_hit);
        CHECK(first.elements(0, 0) == 1974.0);
        CHECK(first.elements(5, 5) == 1288.0);
        CHECK(first.operand_ids[0] == first.operand_ids[1]);
        CHECK(first.operand_ids[2] == 0);
        const auto second = pipeline.execute(req);
        CHECK(second.cache_hit);
        CHECK(second.result_id == first.result_id);
        CHECK(bit_identical(second.elements, first.elements));
        CHECK(pipeline.compute_count() == 1);

        const auto rec = store.result_record(first.result_id);
        CHECK(rec.operation == "r*A+s*B");
        CHECK(rec.r == "3");
        CHECK(rec.s == "4");
        CHECK(rec.p == 0);
        CHECK(rec.elements_out.rfind("1974,-77,", 0) == 0);
        CHECK(rec.elements_out.substr(rec.elements_out.size() - 9) == ",105,1288");
    }

    TEST_CASE("weighted pinv request stores three operand ids")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        std::mt19937_64 rng(4);
        const auto a = testing::uniform_matrix(5, 3, rng);
        const auto m = testing::random_spd(5, rng);
        const auto n = testing::random_spd(3, rng);
        const auto resp = pipeline.execute({OpCode::WeightedPinv, {a, m, n}});
        for (const auto id : resp.operand_ids)
            CHECK(id > 0);
        CHECK(max_abs_diff(resp.elements, testing::sqrt_weighted_pinv(a, m, n)) <= 1e-9);

        const double bad[] = {1, 1, 1, 1, -1};
        CHECK_ERROR_CODE(pipeline.execute({OpCode::WeightedPinv, {a, DenseMatrix::diagonal(bad), n}}),
                         ErrorCode::WeightNotPD);
        CHECK_ERROR_CODE(pipeline.execute({OpCode::WeightedPinv, {a, n, n}}), ErrorCode::DimensionMismatch);
    }

    TEST_CASE("operand forms and errors")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        const auto by_name = pipeline.execute({OpCode::Pinv, {TestName{"A_10_11"}}});
        CHECK(display_round(by_name.elements).back() == "-0.417");
        CHECK(store.matrix_record(by_name.operand_ids[0]).test == "A_10_11");
        const auto by_id = pipeline.execute({OpCode::Pinv, {StoredId{by_name.operand_ids[0]}}});
        CHECK(by_id.cache_hit);

        CHECK_ERROR_CODE(pipeline.execute({OpCode::Inverse, {TestName{"A_10_11"}}}), ErrorCode::DimensionMismatch);
        CHECK_ERROR_CODE(pipeline.execute({OpCode::Pinv, {TestName{"F_30_3"}}}), ErrorCode::UnknownTestMatrix);
        CHECK_ERROR_CODE(pipeline.execute({OpCode::Pinv, {StoredId{777}}}), ErrorCode::UnknownId);
        CHECK_ERROR_CODE(pipeline.execute({OpCode::Add, {testing::matrix_b()}}), ErrorCode::BadRequest);
        CHECK_ERROR_CODE(pipeline.execute({OpCode::Add, {testing::matrix_b(), test_matrix_a_11x10()}}),
                         ErrorCode::DimensionMismatch);
        OperationRequest neg{OpCode::PowerProduct, {testing::matrix_b(), testing::matrix_b()}};
        neg.p = -1;
        CHECK_ERROR_CODE(pipeline.execute(neg), ErrorCode::BadRequest);
    }

    TEST_CASE("unused coefficients do not split the cache")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        OperationRequest a{OpCode::Add, {testing::matrix_b(), testing::matrix_b()}};
        pipeline.execute(a);
        a.r = 9;
        a.p = 2;
        CHECK(pipeline.execute(a).cache_hit);
        OperationRequest s{OpCode::Scale, {testing::matrix_b()}, 0.5};
        const auto half = pipeline.execute(s);
        CHECK(half.non_integer_coefficients);
        CHECK(store.result_record(half.result_id).r == "0.5");
        s.r = 0.25;
        CHECK_FALSE(pipeline.execute(s).cache_hit);
    }

    TEST_CASE("sparse operands")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        const auto coo = dense_to_coo(testing::matrix_c());
        const auto resp = pipeline.execute({OpCode::Multiply, {coo, coo}});
        const auto c = testing::matrix_c();
        CHECK(resp.elements == multiply(c, c));
        CHECK(resp.operand_ids[0] == resp.operand_ids[1]);
        CHECK(store.matrix_record(resp.operand_ids[0]).sparse == 1);
    }

    TEST_CASE("uploads")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        const auto text = "1 2\n3 4\n";
        const auto id = pipeline.ingest_upload(text);
        CHECK(pipeline.ingest_upload("1,2\n3,4") == id);
        CHECK(store.matrix_record_count() == 1);
        CHECK_ERROR_CODE(pipeline.ingest_upload(""), ErrorCode::EmptyUpload);
        CHECK_ERROR_CODE(pipeline.ingest_upload("1 2\n3"), ErrorCode::RaggedRows);
        CHECK_ERROR_CODE(pipeline.ingest_upload("1 x"), ErrorCode::ParseError);
    }

    TEST_CASE("render")
    {
        const double d[] = {0.5, 0.2};
        const auto grid = render_result(DenseMatrix::diagonal(d));
        CHECK(grid == std::vector<std::vector<std::string>>{{"0.5", "0"}, {"0", "0.2"}});
        CHECK(render_result(DenseMatrix::from_rows({{-0.4166667}}))[0][0] == "-0.417");
        CHECK(render_result(DenseMatrix(1, 1))[0][0] == "0");
    }

    TEST_CASE("inline operands and stored ids give the same result")
    {
        std::mt19937_64 rng(6);
        const auto a = testing::uniform_matrix(4, 4, rng);
        const auto b = testing::uniform_matrix(4, 4, rng);
        MatrixStore s1(":memory:");
        ComputePipeline p1(s1);
        const auto inline_resp = p1.execute({OpCode::PowerProduct, {a, b}, 0, 0, 2, 3});

        MatrixStore s2(":memory:");
        ComputePipeline p2(s2);
        const auto ia = p2.resolve(a);
        const auto ib = p2.resolve(b);
        const auto id_resp = p2.execute({OpCode::PowerProduct, {StoredId{ia}, StoredId{ib}}, 0, 0, 2, 3});
        CHECK_FALSE(id_resp.cache_hit);
        CHECK(bit_identical(inline_resp.elements, id_resp.elements));
        CHECK(bit_identical(inline_resp.elements, power_product(a, 2, b, 3)));
    }

    TEST_CASE("concurrent identical requests agree")
    {
        MatrixStore store(":memory:");
        ComputePipeline pipeline(store);
        std::mt19937_64 rng(8);
        const auto a = testing::uniform_matrix(12, 8, rng);
        std::vector<DenseMatrix> results(8, DenseMatrix(1, 1));
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < results.size(); ++i)
            threads.emplace_back([&, i] { results[i] = pipeline.execute({OpCode::Pinv, {a}}).elements; });
        for (auto& t : threads)
            t.join();
        for (const auto& r : results)
            CHECK(bit_identical(r, results[0]));
        CHECK(store.result_count() == 1);
        CHECK(store.matrix_record_count() == 1);
    }
}

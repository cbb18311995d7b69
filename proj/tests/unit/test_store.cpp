#include "check_error.hpp"
#include "oracles.hpp"
#include "example_matrices.hpp"
#include "pinv/bench.hpp"
#include "pinv/format.hpp"
#include "pinv/ops.hpp"
#include "pinv/store.hpp"
#include "temp_path.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <random>
#include <vector>

using namespace pinv;

namespace {

double median_lookup_ns(const MatrixStore& store, int reps)
{
    std::vector<double> t;
    for (int i = 0; i < reps; ++i) {
        const auto start = std::chrono::steady_clock::now();
        const auto id = store.find_test_matrix("A_10_11");
        const auto stop = std::chrono::steady_clock::now();
        REQUIRE(id.has_value());
        t.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
    }
    std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
    return t[t.size() / 2];
}

} // namespace

TEST_SUITE("store")
{
    TEST_CASE("insert then find, for both layouts")
    {
        for (const auto layout : {Layout::R, Layout::mR}) {
            MatrixStore store(":memory:", {layout});
            const auto b = testing::matrix_b();
            CHECK_FALSE(store.find_matrix(b).has_value());
            const auto id = store.insert_matrix(b);
            CHECK(store.find_matrix(b) == id);
            CHECK(store.find_matrix(b.with_backend(Backend::Nested)) == id);
            CHECK(store.load_matrix(id) == b);
            const auto rec = store.matrix_record(id);
            CHECK(rec.dimension == "6x6");
            CHECK(rec.test.empty());
            CHECK(rec.sparse == 0);
            CHECK(rec.elements_in == to_r_string(b));
            CHECK_ERROR_CODE(store.insert_matrix(b), ErrorCode::DuplicateMatrix);
            CHECK_ERROR_CODE(store.load_matrix(999), ErrorCode::UnknownId);

            store.set_search_mode(SearchMode::FullScan);
            CHECK(store.find_matrix(b) == id);
            CHECK_FALSE(store.find_matrix(scale(2, b)).has_value());
        }
    }

    TEST_CASE("same elements, different dimension")
    {
        std::vector<double> v(12);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = static_cast<double>(i);
        const auto a = DenseMatrix::from_row_major(2, 6, v);
        const auto b = DenseMatrix::from_row_major(3, 4, v);
        for (const auto mode : {SearchMode::Indexed, SearchMode::FullScan}) {
            MatrixStore store(":memory:", {Layout::R, mode});
            const auto ia = store.insert_matrix(a);
            CHECK_FALSE(store.find_matrix(b).has_value());
            const auto ib = store.insert_matrix(b);
            CHECK(ia != ib);
            CHECK(store.find_matrix(a) == ia);
            CHECK(store.find_matrix(b) == ib);
        }
    }

    TEST_CASE("test matrix and sparse records")
    {
        MatrixStore store(":memory:");
        const auto a = test_matrix_a_11x10();
        CHECK(a(0, 0) == 11.0);
        CHECK(a(10, 9) == -1.0);
        const auto ia = store.insert_matrix(a, "A_10_11");
        CHECK(store.matrix_record(ia).dimension == "11x10");
        CHECK(store.matrix_record(ia).test == "A_10_11");
        CHECK(store.find_test_matrix("A_10_11") == ia);
        CHECK_FALSE(store.find_test_matrix("F_30_3").has_value());

        const auto b_id = store.insert_matrix(testing::matrix_b());
        const auto coo = dense_to_coo(testing::matrix_c());
        const auto ic = store.insert_matrix(coo);
        CHECK(ic == b_id + 1);
        const auto r1 = store.matrix_record(ic);
        const auto r2 = store.matrix_record(ic + 1);
        const auto r3 = store.matrix_record(ic + 2);
        CHECK(r1.sparse == 1);
        CHECK(r2.sparse == 2);
        CHECK(r3.sparse == 3);
        CHECK(r1.elements_in == "0,0,0,1,2,2,4,4,9");
        CHECK(r2.elements_in == "0,1,2,1,0,3,1,5,9");
        CHECK(r3.elements_in == "1,2,3,2,1,4,4,8,2");
        CHECK(r1.dimension == "10x10");
        CHECK(store.find_matrix(coo) == ic);
        CHECK(store.load_matrix(ic) == testing::matrix_c());
        CHECK_ERROR_CODE(store.load_matrix(ic + 1), ErrorCode::UnknownId);
        CHECK_ERROR_CODE(store.insert_matrix(coo), ErrorCode::DuplicateMatrix);
        // a dense copy of the same matrix is a different record
        CHECK_FALSE(store.find_matrix(testing::matrix_c()).has_value());
        CHECK(store.matrix_record_count() == 5);
    }

    TEST_CASE("results: round trip, key sensitivity and duplicates")
    {
        MatrixStore store(":memory:");
        const auto x = scale(1.0 / 3.0, testing::matrix_b());
        ResultKey key{"r*A+s*B", 2, 2, 0, 3, 4, 0, 0};
        const auto id = store.insert_result(key, x);
        const auto back = store.find_result(key);
        REQUIRE(back.has_value());
        CHECK(bit_identical(*back, x));
        auto other = key;
        other.r = 5;
        CHECK_FALSE(store.find_result(other).has_value());
        CHECK_ERROR_CODE(store.insert_result(key, x), ErrorCode::DuplicateResult);

        const auto rec = store.result_record(id);
        CHECK(rec.r == "3");
        CHECK(rec.s == "4");
        CHECK(rec.dimension == "6x6");

        const auto uid = store.insert_result({"A(+)", 1, 0, 0, 0, 0, 0, 0}, x);
        CHECK(store.result_record(uid).matrix_ii == 0);
        CHECK(store.result_record(uid).matrix_iii == 0);
        CHECK_ERROR_CODE(store.insert_result({"A/B", 1, 1, 0, 0, 0, 0, 0}, x), ErrorCode::UnknownOperation);
    }

    TEST_CASE("cache keys differing in any field never collide")
    {
        MatrixStore store(":memory:");
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<int> small(0, 3);
        const auto& codes = operation_codes();
        std::vector<ResultKey> keys;
        for (int i = 0; i < 300; ++i) {
            ResultKey k{codes[static_cast<std::size_t>(small(rng) * 2) % codes.size()], small(rng), small(rng),
                        small(rng), static_cast<double>(small(rng)), static_cast<double>(small(rng)),
                        small(rng), small(rng)};
            const bool seen = std::any_of(keys.begin(), keys.end(), [&](const ResultKey& o) {
                return o.operation == k.operation && o.matrix_i == k.matrix_i && o.matrix_ii == k.matrix_ii &&
                       o.matrix_iii == k.matrix_iii && o.r == k.r && o.s == k.s && o.p == k.p && o.q == k.q;
            });
            if (seen)
                continue;
            keys.push_back(k);
            store.insert_result(k, DenseMatrix::from_rows({{static_cast<double>(keys.size())}}));
        }
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto got = store.find_result(keys[i]);
            REQUIRE(got.has_value());
            CHECK(scalar(*got) == static_cast<double>(i + 1));
        }
    }

    TEST_CASE("persistence across reopen")
    {
        TempPath file("pinv-store");
        std::int64_t id = 0;
        {
            MatrixStore store(file.path(), {Layout::mR});
            id = store.insert_matrix(testing::matrix_b());
            store.insert_matrix(dense_to_coo(testing::matrix_c()));
            store.insert_result({"A+B", id, id, 0, 0, 0, 0, 0}, add(testing::matrix_b(), testing::matrix_b()));
        }
        MatrixStore store(file.path(), {Layout::R});
        CHECK(store.layout() == Layout::mR);
        CHECK(store.find_matrix(testing::matrix_b()) == id);
        CHECK(store.matrix_record_count() == 4);
        CHECK(store.result_count() == 1);
        CHECK(store.find_result({"A+B", id, id, 0, 0, 0, 0, 0}).has_value());
    }

    TEST_CASE("export and import preserve every record")
    {
        TempPath dir("pinv-dump");
        MatrixStore src(":memory:");
        const auto a = src.insert_matrix(test_matrix_a_11x10(), "A_10_11");
        src.insert_matrix(dense_to_coo(testing::matrix_c()));
        src.insert_result({"r*A", a, 0, 0, 0.5, 0, 0, 0}, scale(0.5, test_matrix_a_11x10()));
        src.export_to(dir.path());
        CHECK(std::filesystem::exists(dir.path() / "matrices_in.tsv"));
        CHECK(std::filesystem::exists(dir.path() / "matrices_out.tsv"));

        MatrixStore dst(":memory:", {Layout::mR});
        dst.import_from(dir.path());
        CHECK(dst.all_matrix_records() == src.all_matrix_records());
        CHECK(dst.all_result_records() == src.all_result_records());
        CHECK_ERROR_CODE(dst.import_from(dir.path()), ErrorCode::DuplicateMatrix);
    }

    TEST_CASE("text length bound")
    {
        MatrixStore store(":memory:", {Layout::R, SearchMode::Indexed, 10});
        CHECK_ERROR_CODE(store.insert_matrix(testing::matrix_b()), ErrorCode::TooLong);
        CHECK(store.matrix_record_count() == 0);
    }

    TEST_CASE("registry")
    {
        auto reg = TestMatrixRegistry::with_builtins();
        CHECK(reg.find("A_10_11") == test_matrix_a_11x10());
        CHECK_FALSE(reg.find("F_30_3").has_value());
        reg.add("custom", DenseMatrix::identity(2));
        CHECK(reg.find("custom") == DenseMatrix::identity(2));
    }

    TEST_CASE("name lookup does not grow with the store")
    {
        MatrixStore store(":memory:");
        store.insert_matrix(test_matrix_a_11x10(), "A_10_11");
        std::mt19937_64 rng(99);
        for (int i = 0; i < 9; ++i)
            store.insert_matrix(bench::random_matrix({5, 5}, rng));
        const double small = median_lookup_ns(store, 501);
        {
            MatrixStore::Batch batch(store);
            for (int i = 0; i < 9990; ++i)
                store.insert_matrix(bench::random_matrix({5, 5}, rng));
        }
        CHECK(store.matrix_record_count() == 10000);
        const double large = median_lookup_ns(store, 501);
        MESSAGE("name lookup median ns: 10 -> ", small, ", 10000 -> ", large);
        CHECK(large <= 2.0 * small);
    }
}

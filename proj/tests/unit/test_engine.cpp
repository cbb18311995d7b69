#include "check_error.hpp"
#include "oracles.hpp"
#include "example_matrices.hpp"
#include "pinv/engine.hpp"
#include "pinv/format.hpp"
#include "pinv/ops.hpp"
#include "pinv/store.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pinv;

namespace {

WeightPair random_weights(std::size_t m, std::size_t n, std::mt19937_64& rng)
{
    return {testing::random_spd(m, rng), testing::random_spd(n, rng)};
}

} // namespace

TEST_SUITE("engine")
{
    TEST_CASE("bordering inverse")
    {
        const auto s = DenseMatrix::from_rows({{4, 2}, {2, 3}});
        const auto inv = bordered_pd_inverse(s);
        CHECK(max_abs_diff(inv, DenseMatrix::from_rows({{0.375, -0.25}, {-0.25, 0.5}})) <= 1e-15);
        CHECK(spd_determinant(s) == doctest::Approx(8.0));
        CHECK(bordered_pd_inverse(DenseMatrix::from_rows({{5}})) == DenseMatrix::from_rows({{0.2}}));

        const double d[] = {1, -1};
        CHECK_ERROR_CODE(bordered_pd_inverse(DenseMatrix::diagonal(d)), ErrorCode::NotPositiveDefinite);
        CHECK_ERROR_CODE(bordered_pd_inverse(DenseMatrix::from_rows({{1, 2}, {0, 1}})), ErrorCode::NotSymmetric);
        CHECK_ERROR_CODE(bordered_pd_inverse(DenseMatrix(2, 3)), ErrorCode::NotSquare);
        CHECK_ERROR_CODE(bordered_pd_inverse(DenseMatrix::from_rows({{1, 1}, {1, 1}})),
                         ErrorCode::NotPositiveDefinite);
    }

    TEST_CASE("bordering inverse on the 6x6 example matrix")
    {
        // matrix_B is symmetric; it is positive definite when every pivot is
        // positive, which the oracle's eigenvalues decide independently.
        const auto b = testing::matrix_b();
        const double cond = testing::spd_condition(b);
        if (std::isfinite(cond) && cond > 0) {
            const auto inv = bordered_pd_inverse(b);
            CHECK(max_abs_diff(inv, testing::gauss_jordan_inverse(b)) <= 1e-10);
        } else {
            CHECK_ERROR_CODE(bordered_pd_inverse(b), ErrorCode::NotPositiveDefinite);
        }
    }

    TEST_CASE("bordering inverse up to condition 1e6, scaled residual")
    {
        // ||S X - I||_max <= 1e-8 * cond(S) / 1e6, i.e. a relative bound of
        // order eps * cond with a wide margin.
        std::mt19937_64 rng(17);
        for (int t = 0; t < 30; ++t) {
            const std::size_t n = 2 + static_cast<std::size_t>(t % 29);
            const double cond = std::pow(10.0, 1 + t % 6);
            const auto s = testing::spd_with_condition(n, cond, rng);
            const auto x = bordered_pd_inverse(s);
            const auto r = subtract(multiply(s, x), DenseMatrix::identity(n));
            CHECK(max_abs(r) <= 1e-8 * std::max(1.0, testing::spd_condition(s) / 1e6) * 1e2);
            const auto gj = testing::gauss_jordan_inverse(s);
            CHECK(max_abs_diff(x, gj) / max_abs(gj) <= 1e-16 * cond * 1e3);
        }
    }

    TEST_CASE("initialization branch polarity")
    {
        const auto m = DenseMatrix::identity(3);
        const auto zero = DenseMatrix(3, 1);
        const auto st0 = partition_init(zero, m);
        CHECK(st0.x == DenseMatrix(1, 3));

        const auto a1 = DenseMatrix::from_rows({{1}, {2}, {2}});
        const auto st1 = partition_init(a1, m);
        CHECK(max_abs_diff(st1.x, DenseMatrix::from_rows({{1.0 / 9, 2.0 / 9, 2.0 / 9}})) <= 1e-16);
        CHECK(st1.branch == Branch::Initial);
    }

    TEST_CASE("both update branches are taken")
    {
        // column 3 = column 1 + column 2, so step 3 is dependent
        const auto a = DenseMatrix::from_rows({{1, 0, 1}, {0, 1, 1}, {1, 1, 2}, {2, 0, 2}});
        std::mt19937_64 rng(2);
        const auto w = random_weights(4, 3, rng);
        const auto trace = weighted_pinv_trace(a, w);
        REQUIRE(trace.branches.size() == 3);
        CHECK(trace.branches[0] == Branch::Initial);
        CHECK(trace.branches[1] == Branch::Independent);
        CHECK(trace.branches[2] == Branch::Dependent);
        CHECK(trace.dependent_columns() == 1);
        CHECK(penrose_residuals(a, trace.x, w).worst() <= 1e-10);
    }

    TEST_CASE("delta: implemented five-term form equals the step-12 form")
    {
        std::mt19937_64 rng(23);
        int dependent_steps = 0;
        for (int t = 0; t < 20; ++t) {
            const std::size_t m = 3 + t % 4;
            const std::size_t cols = 3 + t % 3;
            auto a = testing::uniform_matrix(m, cols, rng);
            // make the last column a combination of the first two
            for (std::size_t i = 0; i < m; ++i)
                a(i, cols - 1) = 0.5 * a(i, 0) - 2.0 * a(i, 1);
            const auto w = random_weights(m, cols, rng);

            auto state = partition_init(column(a, 0), w.m);
            for (std::size_t k = 1; k < cols; ++k) {
                const auto prev = state;
                state = partition_step(prev, column(a, k), w.n, w.m);
                if (state.branch != Branch::Dependent)
                    continue;
                ++dependent_steps;
                const auto a_prev = leading_columns(a, k);
                const auto n_prev = leading_block(w.n, k);
                const auto n_inv = testing::gauss_jordan_inverse(n_prev);
                DenseMatrix l(k, 1);
                for (std::size_t i = 0; i < k; ++i)
                    l(i, 0) = w.n(i, k);
                const auto& d = *state.d;
                const auto lt = transpose(l);
                const auto dt = transpose(d);
                const auto proj = subtract(DenseMatrix::identity(k), multiply(prev.x, a_prev));
                const double step12 = w.n(k, k) + scalar(multiply(multiply(dt, n_prev), d)) -
                                      (scalar(multiply(dt, l)) + scalar(multiply(lt, d))) -
                                      scalar(multiply(multiply(lt, proj), multiply(n_inv, l)));
                CHECK(std::abs(state.delta - step12) <= 1e-9 * std::max(1.0, std::abs(step12)));
            }
        }
        CHECK(dependent_steps >= 10);
    }

    TEST_CASE("prefix recursion: X_k is the weighted inverse of the first k columns")
    {
        std::mt19937_64 rng(31);
        for (int t = 0; t < 10; ++t) {
            const std::size_t m = 6, cols = 4;
            const auto a = testing::uniform_matrix(m, cols, rng);
            const auto w = random_weights(m, cols, rng);
            auto state = partition_init(column(a, 0), w.m);
            for (std::size_t k = 1; k <= cols; ++k) {
                if (k > 1)
                    state = partition_step(state, column(a, k - 1), w.n, w.m);
                const auto oracle =
                    testing::sqrt_weighted_pinv(leading_columns(a, k), w.m, leading_block(w.n, k));
                CHECK(max_abs_diff(state.x, oracle) <= 1e-9);
            }
        }
    }

    TEST_CASE("weighted pinv errors")
    {
        const auto a = DenseMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
        CHECK_ERROR_CODE(weighted_pinv(a, WeightPair::identity(2, 2)), ErrorCode::DimensionMismatch);
        const double neg[] = {1, -1, 1};
        CHECK_ERROR_CODE(weighted_pinv(a, {DenseMatrix::diagonal(neg), DenseMatrix::identity(2)}),
                         ErrorCode::WeightNotPD);
        CHECK_ERROR_CODE(regular_inverse(a), ErrorCode::DimensionMismatch);
        CHECK_ERROR_CODE(regular_inverse(DenseMatrix::from_rows({{1, 2}, {2, 4}})), ErrorCode::Singular);
    }

    TEST_CASE("ordinary pinv and regular inverse")
    {
        const auto ones = DenseMatrix::from_rows({{1, 1}, {1, 1}});
        CHECK(max_abs_diff(mp_pinv(ones), scale(0.25, ones)) <= 1e-15);
        CHECK(mp_pinv(DenseMatrix(2, 3)) == DenseMatrix(3, 2));

        const auto a = DenseMatrix::from_rows({{4, 7}, {2, 6}});
        CHECK(max_abs_diff(regular_inverse(a), DenseMatrix::from_rows({{0.6, -0.7}, {-0.2, 0.4}})) <= 1e-14);

        std::mt19937_64 rng(41);
        for (int t = 0; t < 10; ++t) {
            const auto x = testing::uniform_matrix(5, 5, rng);
            CHECK(max_abs_diff(regular_inverse(x), testing::gauss_jordan_inverse(x)) <= 1e-9);
        }
    }

    TEST_CASE("pinv of the 11x10 test matrix")
    {
        const auto a = test_matrix_a_11x10();
        const auto x = mp_pinv(a);
        CHECK(x.rows() == 10);
        CHECK(x.cols() == 11);
        CHECK(max_abs_diff(x, testing::svd_pinv(a)) <= 1e-8);
        const auto shown = display_round(x);
        CHECK(shown[0] == "1");
        CHECK(shown[1] == "-1");
        CHECK(shown[2] == "0");
        CHECK(shown[shown.size() - 2] == "-0.25");
        CHECK(shown.back() == "-0.417");
        CHECK(weighted_pinv_trace(a, WeightPair::identity(11, 10)).dependent_columns() == 1);
    }

    TEST_CASE("compat tolerances")
    {
        const auto t = Tolerances::compat();
        CHECK(t.compat_mode);
        const auto a = DenseMatrix::from_rows({{1, 1.0001}, {1, 1}});
        // under the three-decimal test the second column counts as dependent
        const auto trace = weighted_pinv_trace(a, WeightPair::identity(2, 2), t);
        CHECK(trace.branches[1] == Branch::Dependent);
        const auto strict = weighted_pinv_trace(a, WeightPair::identity(2, 2));
        CHECK(strict.branches[1] == Branch::Independent);
        Tolerances bad;
        bad.zero_test = 0;
        CHECK_ERROR_CODE(bad.validate(), ErrorCode::BadRequest);
    }

    TEST_CASE("penrose residuals detect a wrong inverse")
    {
        const auto a = DenseMatrix::from_rows({{1, 0}, {0, 2}});
        const auto w = WeightPair::identity(2, 2);
        CHECK(penrose_residuals(a, mp_pinv(a), w).worst() <= 1e-16);
        CHECK(penrose_residuals(a, DenseMatrix::identity(2), w).axa > 0.1);
    }
}

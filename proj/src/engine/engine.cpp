#include "pinv/engine.hpp"

#include "pinv/error.hpp"
#include "pinv/format.hpp"
#include "pinv/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pinv {

Tolerances Tolerances::compat()
{
    Tolerances t;
    t.compat_mode = true;
    return t;
}

void Tolerances::validate() const
{
    if (!(zero_test > 0.0) || !(pd_pivot > 0.0))
        throw Error(ErrorCode::BadRequest, "tolerances must be positive");
}

WeightPair WeightPair::identity(std::size_t rows, std::size_t cols, Backend backend)
{
    return {DenseMatrix::identity(rows, backend), DenseMatrix::identity(cols, backend)};
}

std::size_t PinvTrace::dependent_columns() const
{
    return static_cast<std::size_t>(std::count(branches.begin(), branches.end(), Branch::Dependent));
}

namespace {

void require_symmetric(const DenseMatrix& s)
{
    const double bound = 1e-12 * max_abs(s);
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i + 1; j < s.cols(); ++j)
            if (std::abs(s(i, j) - s(j, i)) > bound)
                throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric at (" +
                                                         std::to_string(i) + "," + std::to_string(j) + ")");
}

/// Runs the bordering recursion and returns the inverse; pivots are appended
/// to `pivots` when given.
DenseMatrix bordering(const DenseMatrix& s, const Tolerances& tol, std::vector<double>* pivots)
{
    if (!s.is_square())
        throw Error(ErrorCode::NotSquare,
                    "bordering inverse of non-square " + dimension_string(s.rows(), s.cols()));
    require_symmetric(s);

    double max_diag = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i)
        max_diag = std::max(max_diag, std::abs(s(i, i)));
    const double floor = tol.pd_pivot * max_diag;
    auto check_pivot = [&](double g, std::size_t i) {
        if (!(g > floor))
            throw Error(ErrorCode::NotPositiveDefinite,
                        "bordering pivot " + std::to_string(i + 1) + " is " + format_number(g));
        if (pivots)
            pivots->push_back(g);
    };

    const double s11 = s(0, 0);
    check_pivot(s11, 0);
    DenseMatrix inv(1, 1, s.backend());
    inv(0, 0) = 1.0 / s11;

    for (std::size_t i = 1; i < s.rows(); ++i) {
        // l: the first i entries of column i; g = s_ii - l^T S_{i-1}^{-1} l
        DenseMatrix l(i, 1, s.backend());
        for (std::size_t r = 0; r < i; ++r)
            l(r, 0) = s(r, i);
        const DenseMatrix lt = transpose(l);
        const double g = s(i, i) - scalar(multiply(multiply(lt, inv), l));
        check_pivot(g, i);
        const double g_inv = 1.0 / g;

        // f = -S_{i-1}^{-1} l / g, E = S_{i-1}^{-1} + f f^T g
        const DenseMatrix f = scale(-1.0, scale(g_inv, multiply(inv, l)));
        const DenseMatrix ft = transpose(f);
        const DenseMatrix e = add(inv, scale(1.0 / g_inv, multiply(f, ft)));

        DenseMatrix next(i + 1, i + 1, s.backend());
        for (std::size_t r = 0; r < i; ++r) {
            std::copy_n(e.row(r).begin(), i, next.row(r).begin());
            next(r, i) = f(r, 0);
        }
        std::copy_n(ft.row(0).begin(), i, next.row(i).begin());
        next(i, i) = g_inv;
        inv = std::move(next);
    }
    return inv;
}

bool is_zero_vector(const DenseMatrix& v, double scale_ref, const Tolerances& tol)
{
    if (tol.compat_mode) {
        for (std::size_t i = 0; i < v.rows(); ++i)
            for (double x : v.row(i))
                if (std::round(x * 1000.0) != 0.0)
                    return false;
        return true;
    }
    return max_abs(v) <= tol.zero_test * std::max(1.0, scale_ref);
}

DenseMatrix append_column(const DenseMatrix& a, const DenseMatrix& col)
{
    DenseMatrix out(a.rows(), a.cols() + 1, a.backend());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy_n(a.row(i).begin(), a.cols(), out.row(i).begin());
        out(i, a.cols()) = col(i, 0);
    }
    return out;
}

void require_column(const DenseMatrix& v, std::size_t rows, const char* what)
{
    if (v.cols() != 1 || v.rows() != rows)
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " must be " + dimension_string(rows, 1) + ", got " +
                        dimension_string(v.rows(), v.cols()));
}

void validate_weights(const DenseMatrix& a, const WeightPair& w, const Tolerances& tol)
{
    if (!w.m.is_square() || w.m.rows() != a.rows())
        throw Error(ErrorCode::DimensionMismatch,
                    "weight M is " + dimension_string(w.m.rows(), w.m.cols()) + ", expected " +
                        dimension_string(a.rows(), a.rows()));
    if (!w.n.is_square() || w.n.rows() != a.cols())
        throw Error(ErrorCode::DimensionMismatch,
                    "weight N is " + dimension_string(w.n.rows(), w.n.cols()) + ", expected " +
                        dimension_string(a.cols(), a.cols()));
    using Named = std::pair<const DenseMatrix*, const char*>;
    for (const auto& [weight, name] : {Named{&w.m, "M"}, Named{&w.n, "N"}}) {
        try {
            bordering(*weight, tol, nullptr);
        } catch (const Error& e) {
            throw Error(ErrorCode::WeightNotPD,
                        std::string("weight ") + name + " is not symmetric positive definite: " + e.what());
        }
    }
}

} // namespace

DenseMatrix bordered_pd_inverse(const DenseMatrix& s, const Tolerances& tol)
{
    tol.validate();
    return bordering(s, tol, nullptr);
}

double spd_determinant(const DenseMatrix& s, const Tolerances& tol)
{
    tol.validate();
    std::vector<double> pivots;
    bordering(s, tol, &pivots);
    double det = 1.0;
    for (double g : pivots)
        det *= g;
    return det;
}

PartitioningState partition_init(const DenseMatrix& a_1, const DenseMatrix& m, const Tolerances& tol)
{
    require_column(a_1, m.rows(), "a_1");
    PartitioningState state;
    state.k = 1;
    state.a_k = a_1;
    state.branch = Branch::Initial;
    if (is_zero_vector(a_1, max_abs(a_1), tol)) {
        state.x = DenseMatrix(1, a_1.rows(), a_1.backend());
    } else {
        const DenseMatrix at_m = multiply(transpose(a_1), m);
        state.x = scale(1.0 / scalar(multiply(at_m, a_1)), at_m);
    }
    return state;
}

PartitioningState partition_step(const PartitioningState& state, const DenseMatrix& a_k,
                                 const DenseMatrix& n, const DenseMatrix& m, const Tolerances& tol)
{
    const std::size_t prev = state.k; // k - 1 in 1-based terms
    require_column(a_k, state.a_k.rows(), "a_k");
    if (!n.is_square() || n.rows() <= prev)
        throw Error(ErrorCode::DimensionMismatch, "weight N too small for step " + std::to_string(prev + 1));

    const DenseMatrix& x = state.x;
    const DenseMatrix& a_prev = state.a_k;

    PartitioningState next;
    next.k = prev + 1;
    next.d = multiply(x, a_k);
    next.c = subtract(a_k, multiply(a_prev, *next.d));
    next.n_minus = leading_block(n, prev);
    const DenseMatrix n_inv = bordered_pd_inverse(*next.n_minus, tol);
    DenseMatrix l(prev, 1, n.backend());
    for (std::size_t r = 0; r < prev; ++r)
        l(r, 0) = n(r, prev);
    next.l = l;
    next.n_kk = n(prev, prev);
    const DenseMatrix lt = transpose(l);
    const DenseMatrix n_inv_l = multiply(n_inv, l);
    const DenseMatrix& d = *next.d;
    const DenseMatrix& c = *next.c;

    if (!is_zero_vector(c, max_abs(a_k), tol)) {
        next.branch = Branch::Independent;
        const DenseMatrix ct_m = multiply(transpose(c), m);
        next.b = scale(1.0 / scalar(multiply(ct_m, c)), ct_m);
    } else {
        next.branch = Branch::Dependent;
        const DenseMatrix dt = transpose(d);
        const DenseMatrix dt_n = multiply(dt, *next.n_minus);
        const double dt_n_d = scalar(multiply(dt_n, d));
        const double cross = scalar(multiply(dt, l)) + scalar(multiply(lt, d));
        const double lt_n_inv_l = scalar(multiply(lt, n_inv_l));
        const DenseMatrix lt_x = multiply(lt, x);
        const double correction = scalar(multiply(lt_x, multiply(a_prev, n_inv_l)));
        next.delta = next.n_kk + dt_n_d - cross - lt_n_inv_l + correction;
        if (std::abs(next.delta) <= tol.zero_test * std::max(1.0, std::abs(next.n_kk)))
            throw Error(ErrorCode::SingularDelta,
                        "delta at column " + std::to_string(next.k) + " is " + format_number(next.delta));
        next.b = scale(1.0 / next.delta, subtract(multiply(dt_n, x), lt_x));
    }

    // X_k = [X_{k-1} - (d_k + (I - X_{k-1} A_{k-1}) N_{k-1}^{-1} l_k) b_k ; b_k]
    const DenseMatrix& b = *next.b;
    const DenseMatrix p = subtract(n_inv_l, multiply(multiply(x, a_prev), n_inv_l));
    const DenseMatrix updated = subtract(subtract(x, multiply(d, b)), multiply(p, b));
    next.x = append_row(updated, b);
    next.a_k = append_column(a_prev, a_k);
    return next;
}

PinvTrace weighted_pinv_trace(const DenseMatrix& a, const WeightPair& w, const Tolerances& tol)
{
    tol.validate();
    validate_weights(a, w, tol);

    PartitioningState state = partition_init(column(a, 0), w.m, tol);
    std::vector<Branch> branches{state.branch};
    for (std::size_t k = 1; k < a.cols(); ++k) {
        state = partition_step(state, column(a, k), w.n, w.m, tol);
        branches.push_back(state.branch);
    }
    if (is_zero_vector(column(a, 0), max_abs(column(a, 0)), tol))
        branches.front() = Branch::Dependent;
    return {std::move(state.x), std::move(branches)};
}

DenseMatrix weighted_pinv(const DenseMatrix& a, const WeightPair& w, const Tolerances& tol)
{
    return weighted_pinv_trace(a, w, tol).x;
}

DenseMatrix mp_pinv(const DenseMatrix& a, const Tolerances& tol)
{
    return weighted_pinv(a, WeightPair::identity(a.rows(), a.cols(), a.backend()), tol);
}

DenseMatrix regular_inverse(const DenseMatrix& a, const Tolerances& tol)
{
    if (!a.is_square())
        throw Error(ErrorCode::DimensionMismatch,
                    "inverse of non-square " + dimension_string(a.rows(), a.cols()));
    PinvTrace trace = weighted_pinv_trace(a, WeightPair::identity(a.rows(), a.cols(), a.backend()), tol);
    if (trace.dependent_columns() > 0)
        throw Error(ErrorCode::Singular, "matrix is singular");
    return std::move(trace.x);
}

double PenroseResiduals::worst() const
{
    return std::max({axa, xax, max_sym, nxa_sym});
}

PenroseResiduals penrose_residuals(const DenseMatrix& a, const DenseMatrix& x, const WeightPair& w)
{
    if (x.rows() != a.cols() || x.cols() != a.rows() || w.m.rows() != a.rows() || !w.m.is_square() ||
        w.n.rows() != a.cols() || !w.n.is_square())
        throw Error(ErrorCode::DimensionMismatch, "penrose_residuals: shapes do not conform");
    const double norm = 1.0 + frobenius_norm(a);
    const DenseMatrix ax = multiply(a, x);
    const DenseMatrix xa = multiply(x, a);
    const DenseMatrix max = multiply(w.m, ax);
    const DenseMatrix nxa = multiply(w.n, xa);
    PenroseResiduals r;
    r.axa = frobenius_norm(subtract(multiply(ax, a), a)) / norm;
    r.xax = frobenius_norm(subtract(multiply(xa, x), x)) / norm;
    r.max_sym = frobenius_norm(subtract(max, transpose(max))) / norm;
    r.nxa_sym = frobenius_norm(subtract(nxa, transpose(nxa))) / norm;
    return r;
}

} // namespace pinv

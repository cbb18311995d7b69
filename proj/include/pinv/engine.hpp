#pragma once

#include "pinv/matrix.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace pinv {

/**
 * Numerical thresholds of the partitioning method.
 *
 * The default zero test treats a vector v as zero when
 * max|v_i| <= zero_test * max(1, max|a_k|). In compat mode a vector is zero
 * when every entry rounds to 0 at three decimals (|v_i| < 5e-4), which is
 * what the original web application did.
 */
struct Tolerances {
    double zero_test = 1e-10;
    /// Bordering pivots must exceed pd_pivot * max|diag(S)|.
    double pd_pivot = 1e-14;
    bool compat_mode = false;

    static Tolerances compat();
    /// Throws BadRequest unless both thresholds are positive.
    void validate() const;
};

/// Symmetric positive definite weights: M is m x m, N is n x n.
struct WeightPair {
    DenseMatrix m;
    DenseMatrix n;

    static WeightPair identity(std::size_t rows, std::size_t cols, Backend backend = Backend::Flat);
};

/// Which update a partitioning step used.
enum class Branch {
    Initial,     ///< k = 1
    Independent, ///< c_k != 0
    Dependent,   ///< c_k == 0, delta_k path
};

/**
 * Recursion state after k columns of A have been absorbed: x is the weighted
 * pseudo-inverse of the first k columns (k x m). The optional members hold
 * the intermediates of the step that produced this state and are empty for
 * k = 1.
 */
struct PartitioningState {
    std::size_t k = 0;
    DenseMatrix x{1, 1};
    DenseMatrix a_k{1, 1};
    Branch branch = Branch::Initial;

    std::optional<DenseMatrix> d;       ///< X_{k-1} a_k
    std::optional<DenseMatrix> c;       ///< a_k - A_{k-1} d_k
    std::optional<DenseMatrix> b;       ///< new last row of X_k
    std::optional<DenseMatrix> l;       ///< N[0..k-1), k-1]
    std::optional<DenseMatrix> n_minus; ///< leading (k-1)x(k-1) block of N
    double n_kk = 0.0;
    double delta = 0.0; ///< only meaningful on the Dependent branch
};

/// Inverse of a symmetric positive definite matrix by bordering: invert the
/// 1x1 leading block, then grow the inverse one row and column at a time.
/// Throws NotSquare, NotSymmetric or NotPositiveDefinite.
DenseMatrix bordered_pd_inverse(const DenseMatrix& s, const Tolerances& tol = {});

/// Product of the bordering pivots; SPD input only.
double spd_determinant(const DenseMatrix& s, const Tolerances& tol = {});

/// State for k = 1 from the first column a_1 (m x 1).
PartitioningState partition_init(const DenseMatrix& a_1, const DenseMatrix& m, const Tolerances& tol = {});

/// Absorb column a_k (m x 1) into the state. Throws SingularDelta.
PartitioningState partition_step(const PartitioningState& state, const DenseMatrix& a_k,
                                 const DenseMatrix& n, const DenseMatrix& m,
                                 const Tolerances& tol = {});

struct PinvTrace {
    DenseMatrix x{1, 1};
    std::vector<Branch> branches; ///< one per column of A
    std::size_t dependent_columns() const;
};

/// Weighted Moore-Penrose inverse A+_{MN} (n x m). Throws DimensionMismatch
/// when M or N do not conform, WeightNotPD for an invalid weight and
/// SingularDelta for numerically dependent data.
DenseMatrix weighted_pinv(const DenseMatrix& a, const WeightPair& w, const Tolerances& tol = {});
PinvTrace weighted_pinv_trace(const DenseMatrix& a, const WeightPair& w, const Tolerances& tol = {});

/// Ordinary Moore-Penrose inverse: weighted_pinv with identity weights.
DenseMatrix mp_pinv(const DenseMatrix& a, const Tolerances& tol = {});

/// Regular inverse of a square matrix through the same recursion. Throws
/// DimensionMismatch for non-square input and Singular when a column is
/// dependent on its predecessors.
DenseMatrix regular_inverse(const DenseMatrix& a, const Tolerances& tol = {});

/// Residuals of the four defining equations, each a Frobenius norm divided by
/// (1 + ||A||_F): AXA - A, XAX - X, MAX - (MAX)^T, NXA - (NXA)^T.
struct PenroseResiduals {
    double axa = 0.0;
    double xax = 0.0;
    double max_sym = 0.0;
    double nxa_sym = 0.0;

    double worst() const;
    std::array<double, 4> as_array() const { return {axa, xax, max_sym, nxa_sym}; }
};

PenroseResiduals penrose_residuals(const DenseMatrix& a, const DenseMatrix& x, const WeightPair& w);

} // namespace pinv

#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pinv::testing {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a)
{
    Eigen::MatrixXd out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(i, j) = a(i, j);
    return out;
}

DenseMatrix from_eigen(const Eigen::MatrixXd& a)
{
    DenseMatrix out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out(i, j) = a(i, j);
    return out;
}

Eigen::MatrixXd eigen_pinv(const Eigen::MatrixXd& a)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff =
        static_cast<double>(std::max(a.rows(), a.cols())) * 2.220446049250313e-16 * (sv.size() ? sv(0) : 0.0);
    Eigen::MatrixXd sigma_inv = Eigen::MatrixXd::Zero(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff)
            sigma_inv(i, i) = 1.0 / sv(i);
    return svd.matrixV() * sigma_inv * svd.matrixU().transpose();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sqrt_and_inverse_sqrt(const Eigen::MatrixXd& s)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const Eigen::VectorXd w = es.eigenvalues();
    if (w.minCoeff() <= 0)
        throw std::runtime_error("weight is not positive definite");
    const Eigen::MatrixXd& v = es.eigenvectors();
    return {v * w.cwiseSqrt().asDiagonal() * v.transpose(),
            v * w.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()};
}

} // namespace

DenseMatrix gauss_jordan_inverse(const DenseMatrix& s)
{
    const std::size_t n = s.rows();
    std::vector<std::vector<double>> aug(n, std::vector<double>(2 * n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug[i][j] = s(i, j);
        aug[i][n + i] = 1.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(aug[r][c]) > std::abs(aug[pivot][c]))
                pivot = r;
        if (aug[pivot][c] == 0.0)
            throw std::runtime_error("singular matrix");
        std::swap(aug[c], aug[pivot]);
        const double inv = 1.0 / aug[c][c];
        for (double& v : aug[c])
            v *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || aug[r][c] == 0.0)
                continue;
            const double f = aug[r][c];
            for (std::size_t j = 0; j < 2 * n; ++j)
                aug[r][j] -= f * aug[c][j];
        }
    }
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = aug[i][n + j];
    return out;
}

DenseMatrix svd_pinv(const DenseMatrix& a)
{
    return from_eigen(eigen_pinv(to_eigen(a)));
}

DenseMatrix sqrt_weighted_pinv(const DenseMatrix& a, const DenseMatrix& m, const DenseMatrix& n)
{
    const auto [m_half, m_inv_half] = sqrt_and_inverse_sqrt(to_eigen(m));
    const auto [n_half, n_inv_half] = sqrt_and_inverse_sqrt(to_eigen(n));
    (void)m_inv_half;
    (void)n_half;
    const Eigen::MatrixXd inner = m_half * to_eigen(a) * n_inv_half;
    return from_eigen(n_inv_half * eigen_pinv(inner) * m_half);
}

double spd_condition(const DenseMatrix& s)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(s));
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

DenseMatrix naive_multiply(const DenseMatrix& a, const DenseMatrix& b)
{
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                sum += a(i, k) * b(k, j);
            out(i, j) = sum;
        }
    return out;
}

DenseMatrix uniform_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out(i, j) = dist(rng);
    return out;
}

DenseMatrix random_spd(std::size_t n, std::mt19937_64& rng, double shift)
{
    const Eigen::MatrixXd b = to_eigen(uniform_matrix(n, n, rng, -1.0, 1.0));
    Eigen::MatrixXd s = b.transpose() * b + shift * Eigen::MatrixXd::Identity(n, n);
    s = 0.5 * (s + s.transpose()).eval();
    return from_eigen(s);
}

DenseMatrix spd_with_condition(std::size_t n, double condition, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            g(i, j) = normal(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        lambda(i) = std::pow(condition, unit(rng));
    lambda(0) = 1.0;
    if (n > 1)
        lambda(n - 1) = condition;
    Eigen::MatrixXd s = q * lambda.asDiagonal() * q.transpose();
    s = 0.5 * (s + s.transpose()).eval();
    return from_eigen(s);
}

} // namespace pinv::testing

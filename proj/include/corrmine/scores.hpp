#pragma once
// Sample covariance / correlation and the score representations:
// U-scores on the sphere S^{n-2} with R = U'U, the B matrix, Y-scores,
// and the sample partial correlation computed through the Y-score route
// P = diag(Rd)^{-1/2} Rd diag(Rd)^{-1/2} with Rd = (p/(n-1))^2 U'B^{-2}U.

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "corrmine/matrix_io.hpp"

namespace corrmine {

using Vector = Eigen::VectorXd;

inline constexpr double kDefaultConditionCap = 1e12;

inline void validate_data(const Matrix& X) {
    if (X.rows() < 2) throw std::invalid_argument("data matrix needs at least 2 rows (samples)");
    if (X.cols() < 1) throw std::invalid_argument("data matrix needs at least 1 column");
    if (!X.allFinite()) throw std::runtime_error("data matrix contains non-finite entries");
}

inline Matrix symmetrized(const Matrix& A) {
    return 0.5 * (A + A.transpose());
}

// Clamp a correlation-type matrix: entries to [-1, 1], exact unit diagonal.
inline Matrix as_correlation(Matrix A) {
    A = A.array().min(1.0).max(-1.0);
    A.diagonal().setOnes();
    return A;
}

inline Matrix sample_covariance(const Matrix& X) {
    validate_data(X);
    const Matrix centered = X.rowwise() - X.colwise().mean();
    return symmetrized(centered.transpose() * centered / static_cast<double>(X.rows() - 1));
}

inline Matrix sample_correlation(const Matrix& X) {
    const Matrix S = sample_covariance(X);
    Vector scale(S.rows());
    for (Eigen::Index j = 0; j < S.rows(); ++j) {
        const double var = S(j, j);
        if (!(var > 0.0))
            throw std::runtime_error("column " + std::to_string(j) + " has zero sample variance");
        scale[j] = 1.0 / std::sqrt(var);
    }
    const Matrix R = scale.asDiagonal() * S * scale.asDiagonal();
    return as_correlation(symmetrized(R));
}

// U-scores: each centered column, rotated into the hyperplane orthogonal
// to the all-ones vector and normalized. The rotation is the fixed
// Householder reflector Q = I - 2vv'/(v'v), v = 1/sqrt(n) - e1, which
// maps 1/sqrt(n) to e1; rows 2..n of Q are then an orthonormal basis of
// the centered subspace, so U'U reproduces the sample correlation.
inline Matrix u_scores(const Matrix& X) {
    validate_data(X);
    const Eigen::Index n = X.rows(), p = X.cols();
    Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    v[0] -= 1.0;
    const double vtv = v.squaredNorm();
    Matrix U(n - 1, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        Vector x = X.col(j);
        x.array() -= x.mean();
        const double norm = x.norm();
        if (!(norm > 0.0))
            throw std::runtime_error("column " + std::to_string(j) + " has zero sample variance");
        const Vector qx = x - v * (2.0 * v.dot(x) / vtv);
        U.col(j) = qx.tail(n - 1) / norm;
    }
    return U;
}

// B = ((n-1)/p) U U', the normalized outer product of the U-scores.
inline Matrix b_matrix(const Matrix& U) {
    const Eigen::Index rows = U.rows(), p = U.cols();
    if (p < rows + 1)
        throw std::invalid_argument("b_matrix requires p >= n (got p = " + std::to_string(p)
                                    + ", n = " + std::to_string(rows + 1) + ")");
    return symmetrized(static_cast<double>(rows) / static_cast<double>(p) * (U * U.transpose()));
}

struct YScores {
    Matrix y;          // (n-1) x p, unit columns
    double lambda_min; // extreme eigenvalues of B
    double lambda_max;
};

inline YScores y_scores_full(const Matrix& U, double condition_cap = kDefaultConditionCap) {
    const Matrix B = b_matrix(U);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(B);
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigen decomposition of B failed");
    const Vector lam = eig.eigenvalues();
    const double lmin = lam.minCoeff(), lmax = lam.maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > condition_cap)
        throw std::runtime_error("B matrix is numerically singular (condition "
                                 + std::to_string(lmax / std::max(lmin, 0.0)) + ")");
    const Matrix ybar = eig.eigenvectors()
        * lam.cwiseInverse().asDiagonal()
        * (eig.eigenvectors().transpose() * U);
    Matrix y = ybar;
    for (Eigen::Index j = 0; j < y.cols(); ++j) y.col(j) /= y.col(j).norm();
    return YScores{std::move(y), lmin, lmax};
}

inline Matrix y_scores(const Matrix& U, double condition_cap = kDefaultConditionCap) {
    return y_scores_full(U, condition_cap).y;
}

inline Matrix partial_correlation(const Matrix& X, double condition_cap = kDefaultConditionCap) {
    const Matrix Y = y_scores(u_scores(X), condition_cap);
    return as_correlation(symmetrized(Y.transpose() * Y));
}

} // namespace corrmine

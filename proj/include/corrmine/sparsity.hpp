#pragma once
// Sparse dispersion-matrix families and normalized-determinant
// functionals.
//
// A symmetric matrix is (tau, kappa) sparse when each of its first tau
// rows carries at most kappa off-diagonal nonzeros and the lower
// (p-tau) x (p-tau) block is diagonal.  The off-diagonal convention makes
// the checker agree with graph degrees: the adjacency pattern of a
// generated matrix (zero diagonal) and the matrix itself (unit diagonal)
// pass the same (tau, kappa) test.  check_row_kappa, by contrast, counts
// every nonzero entry, diagonal included, so the identity is row-1 sparse
// and a dense matrix is row-p sparse.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "corrmine/graphs.hpp"
#include "corrmine/rng.hpp"

namespace corrmine {

inline constexpr double kZeroTol = 1e-14;

enum class CovKind { diagonal, tau_kappa, block, explicit_matrix };

struct CovarianceSpec {
    int p;
    Matrix matrix;
    CovKind kind;
    int tau = 0;
    int kappa = 0;
    double xi = 0.0;
};

// Eigenvalues of a symmetric matrix, with the SPD gate
// lambda_min > 1e-10 * lambda_max.
inline Vector spd_eigenvalues(const Matrix& M, const std::string& what) {
    if (M.rows() != M.cols()) throw std::runtime_error(what + ": matrix is not square");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw std::runtime_error(what + ": eigen solve failed");
    const Vector lam = eig.eigenvalues();
    const double lmin = lam.minCoeff(), lmax = lam.maxCoeff();
    if (!(lmax > 0.0) || !(lmin > 1e-10 * lmax))
        throw std::runtime_error(what + ": matrix is not positive definite (lambda_min = "
                                 + std::to_string(lmin) + ")");
    return lam;
}

inline CovarianceSpec make_diagonal(int p) {
    if (p < 1) throw std::invalid_argument("make_diagonal: p must be >= 1");
    return CovarianceSpec{p, Matrix::Identity(p, p), CovKind::diagonal, 0, 0, 0.0};
}

// Connectivity criterion of the deterministic neighborhood construction.
inline bool tau_kappa_connected(int p, int tau, int kappa) {
    return static_cast<long>(tau) * (kappa - 1) + 1 >= p;
}

// Unit-diagonal matrix with off-diagonal xi on the edges of the
// deterministic neighborhood construction: hub i < tau links to hub i+1
// and to kappa-2 fresh leaves; hub tau links to kappa-1 fresh leaves.
// Indices beyond p are dropped, so small p simply truncates the pattern.
inline CovarianceSpec make_tau_kappa_sparse(int p, int tau, int kappa, double xi) {
    if (p < 1) throw std::invalid_argument("make_tau_kappa_sparse: p must be >= 1");
    if (tau < 1 || tau > p) throw std::invalid_argument("make_tau_kappa_sparse: need 1 <= tau <= p");
    if (kappa < 2) throw std::invalid_argument("make_tau_kappa_sparse: need kappa >= 2");
    if (!std::isfinite(xi)) throw std::invalid_argument("make_tau_kappa_sparse: xi must be finite");
    Matrix M = Matrix::Identity(p, p);
    auto link = [&](long i, long j) { // 1-indexed
        if (i <= p && j <= p && i != j) M(i - 1, j - 1) = M(j - 1, i - 1) = xi;
    };
    for (long i = 1; i < tau; ++i) {
        link(i, i + 1);
        for (long j = 1; j <= kappa - 2; ++j) link(i, tau + (i - 1) * (kappa - 2) + j);
    }
    for (long j = 1; j <= kappa - 1; ++j)
        link(tau, tau + static_cast<long>(tau - 1) * (kappa - 2) + j);
    spd_eigenvalues(M, "make_tau_kappa_sparse(xi = " + std::to_string(xi) + ")");
    return CovarianceSpec{p, std::move(M), CovKind::tau_kappa, tau, kappa, xi};
}

// Unit diagonal, off-diagonal xi inside the top tau x tau block, identity
// elsewhere.
inline CovarianceSpec make_block_sparse(int p, int tau, double xi) {
    if (p < 1) throw std::invalid_argument("make_block_sparse: p must be >= 1");
    if (tau < 1 || tau > p) throw std::invalid_argument("make_block_sparse: need 1 <= tau <= p");
    if (!std::isfinite(xi)) throw std::invalid_argument("make_block_sparse: xi must be finite");
    Matrix M = Matrix::Identity(p, p);
    for (int i = 0; i < tau; ++i)
        for (int j = i + 1; j < tau; ++j) M(i, j) = M(j, i) = xi;
    spd_eigenvalues(M, "make_block_sparse(xi = " + std::to_string(xi) + ")");
    return CovarianceSpec{p, std::move(M), CovKind::block, tau, tau, xi};
}

inline void require_symmetric(const Matrix& M) {
    if (M.rows() != M.cols()) throw std::runtime_error("matrix is not square");
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = i + 1; j < M.cols(); ++j)
            if (std::abs(M(i, j) - M(j, i)) > 1e-12)
                throw std::runtime_error("matrix is not symmetric at (" + std::to_string(i) + ","
                                         + std::to_string(j) + ")");
}

// Largest number of nonzero entries in any row, diagonal included.
inline int check_row_kappa(const Matrix& M) {
    require_symmetric(M);
    int worst = 0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        int row = 0;
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j)) >= kZeroTol) ++row;
        worst = std::max(worst, row);
    }
    return worst;
}

inline bool check_tau_kappa(const Matrix& M, int tau, int kappa) {
    require_symmetric(M);
    const Eigen::Index p = M.rows();
    if (tau < 0 || tau > p || kappa < 0) throw std::invalid_argument("check_tau_kappa: bad tau/kappa");
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(tau, p); ++i) {
        int off = 0;
        for (Eigen::Index j = 0; j < p; ++j)
            if (j != i && std::abs(M(i, j)) >= kZeroTol) ++off;
        if (off > kappa) return false;
    }
    for (Eigen::Index i = tau; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j)
            if (std::abs(M(i, j)) >= kZeroTol) return false;
    return true;
}

// Graph of the off-diagonal support (edges where |M_ij| >= zero tolerance).
inline SimpleGraph sparsity_graph(const Matrix& M) {
    require_symmetric(M);
    SimpleGraph g(static_cast<int>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = i + 1; j < M.cols(); ++j)
            if (std::abs(M(i, j)) >= kZeroTol)
                g.add_edge(static_cast<int>(i), static_cast<int>(j));
    return g;
}

// mu(A) = det(A) / lambda_max^dim, in (0, 1]; computed from eigenvalues
// in log space so large dimensions cannot underflow.
inline double normalized_det(const Matrix& A) {
    const Vector lam = spd_eigenvalues(A, "normalized_det");
    const double lmax = lam.maxCoeff();
    double logsum = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        logsum += std::log(lam[i]) - std::log(lmax);
    return std::min(std::exp(logsum), 1.0);
}

enum class DetMode { exact, bound, sampled };

// mu_m(A) = min over m x m principal submatrices of mu.
//   exact:   exhaustive minimum; refused when C(dim, m) exceeds 1e6.
//   sampled: minimum over n_samples random index subsets -- an upper
//            bound on mu_m ("best found"), not a certificate.
//   bound:   (lambda_min/lambda_max)^m, a lower bound on mu_m from the
//            condition-number estimate.
inline double local_normalized_det(const Matrix& A, int m, DetMode mode,
                                   CounterRng* rng = nullptr, long n_samples = 1000) {
    const Eigen::Index dim = A.rows();
    if (m < 1 || m > dim) throw std::invalid_argument("local_normalized_det: need 1 <= m <= dim");
    if (mode == DetMode::bound) {
        const Vector lam = spd_eigenvalues(A, "local_normalized_det");
        return std::pow(lam.minCoeff() / lam.maxCoeff(), m);
    }
    auto mu_of_subset = [&](const std::vector<int>& idx) {
        Matrix sub(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) sub(a, b) = A(idx[static_cast<std::size_t>(a)],
                                                      idx[static_cast<std::size_t>(b)]);
        return normalized_det(sub);
    };
    if (mode == DetMode::exact) {
        const std::uint64_t subsets = binom_u64(static_cast<std::uint64_t>(dim),
                                                static_cast<std::uint64_t>(m));
        if (subsets > 1000000ull)
            throw std::invalid_argument("local_normalized_det: exact mode over budget ("
                                        + std::to_string(subsets) + " subsets)");
        std::vector<int> idx(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
        double best = 2.0;
        for (;;) {
            best = std::min(best, mu_of_subset(idx));
            // next combination in lexicographic order
            int i = m - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == dim - m + i) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < m; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
        return best;
    }
    if (!rng) throw std::invalid_argument("local_normalized_det: sampled mode needs an rng");
    double best = 2.0;
    std::vector<int> pool(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) pool[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (long s = 0; s < n_samples; ++s) {
        // partial Fisher-Yates: first m entries become a uniform subset
        for (int i = 0; i < m; ++i) {
            const std::uint64_t j = i + rng->next_below(static_cast<std::uint64_t>(dim - i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            idx[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
        }
        best = std::min(best, mu_of_subset(idx));
    }
    return best;
}

// mu_{n,m}(A) = mu_m(A)^{-(n-1)/2}; equals 1 for diagonal SPD matrices.
inline double inverse_local_det(double mu_m, int n) {
    if (!(mu_m > 0.0) || mu_m > 1.0)
        throw std::invalid_argument("inverse_local_det: mu_m must be in (0, 1]");
    if (n < 2) throw std::invalid_argument("inverse_local_det: n must be >= 2");
    return std::pow(mu_m, -(n - 1) / 2.0);
}

} // namespace corrmine

#pragma once
// Thresholded correlation graphs, geometric and pseudo-geometric graphs,
// and the degree-based count statistics.
//
// All counts come from the degree sequence:
//   N_E_delta  = sum_i C(deg(i), delta)   (delta >= 2; twice the edge
//                count at delta = 1): stars with delta leaves,
//   N_Vx_delta = #{ i : deg(i) = delta }  (vertices of degree exactly delta),
//   N_V_delta  = #{ i : deg(i) >= delta }.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "corrmine/geometry.hpp"

namespace corrmine {

class SimpleGraph {
public:
    explicit SimpleGraph(int p)
        : p_(p), adj_(static_cast<std::size_t>(p) * p, false), deg_(p, 0) {
        if (p < 1) throw std::invalid_argument("graph needs at least one vertex");
    }

    int p() const { return p_; }

    bool has_edge(int i, int j) const { return adj_[idx(i, j)]; }

    void add_edge(int i, int j) {
        if (i == j) throw std::invalid_argument("no self loops");
        if (adj_[idx(i, j)]) return;
        adj_[idx(i, j)] = adj_[idx(j, i)] = true;
        ++deg_[i];
        ++deg_[j];
    }

    int degree(int i) const { return deg_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& degrees() const { return deg_; }

    std::uint64_t edge_count() const {
        std::uint64_t total = 0;
        for (int d : deg_) total += static_cast<std::uint64_t>(d);
        return total / 2;
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * p_ + j;
    }

    int p_;
    std::vector<bool> adj_;
    std::vector<int> deg_;
};

struct CountStatistics {
    int delta;
    std::uint64_t n_e;         // N_E_delta
    std::uint64_t n_v_exact;   // N_Vx_delta
    std::uint64_t n_v_atleast; // N_V_delta
};

// Exact C(n, k) in 64 bits; throws if the value does not fit.
inline std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i; // division exact: result is C(n-k+i, i)
        if (result > static_cast<unsigned __int128>(UINT64_MAX))
            throw std::overflow_error("binomial coefficient exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(result);
}

// Star-subgraph count sum_i C(deg(i), delta), with the convention that
// delta beyond p-1 counts zero (used by the portmanteau chain at the
// upper edge of the delta range).
inline std::uint64_t star_count(const SimpleGraph& g, int delta) {
    if (delta < 1) throw std::invalid_argument("delta must be >= 1");
    if (delta > g.p() - 1) return 0;
    std::uint64_t total = 0;
    for (int d : g.degrees()) {
        std::uint64_t term = (delta == 1)
            ? static_cast<std::uint64_t>(d)
            : binom_u64(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(delta));
        std::uint64_t next;
        if (__builtin_add_overflow(total, term, &next))
            throw std::overflow_error("star count exceeds 64 bits");
        total = next;
    }
    return total;
}

inline CountStatistics count_statistics(const SimpleGraph& g, int delta) {
    if (delta < 1 || delta > g.p() - 1)
        throw std::invalid_argument("delta must be in [1, p-1], got " + std::to_string(delta));
    std::uint64_t exact = 0, atleast = 0;
    for (int d : g.degrees()) {
        if (d == delta) ++exact;
        if (d >= delta) ++atleast;
    }
    return CountStatistics{delta, star_count(g, delta), exact, atleast};
}

// Number of vertices adjacent to every other vertex; 1 for the
// single-vertex graph (degree 0 = p-1).
inline int count_universal(const SimpleGraph& g) {
    int total = 0;
    for (int d : g.degrees())
        if (d == g.p() - 1) ++total;
    return total;
}

// N_E_delta - (delta+1) N_E_{delta+1} <= N_Vx_delta <= N_V_delta <= N_E_delta.
inline bool portmanteau_holds(const SimpleGraph& g, int delta) {
    const CountStatistics c = count_statistics(g, delta);
    const std::uint64_t e_next = star_count(g, delta + 1);
    const __int128 lhs = static_cast<__int128>(c.n_e)
                       - static_cast<__int128>(delta + 1) * static_cast<__int128>(e_next);
    return lhs <= static_cast<__int128>(c.n_v_exact)
        && c.n_v_exact <= c.n_v_atleast
        && c.n_v_atleast <= c.n_e;
}

inline void validate_correlation_matrix(const Matrix& psi) {
    if (psi.rows() != psi.cols()) throw std::runtime_error("matrix is not square");
    if (!psi.allFinite()) throw std::runtime_error("matrix contains non-finite entries");
    for (Eigen::Index i = 0; i < psi.rows(); ++i) {
        if (std::abs(psi(i, i) - 1.0) > 1e-10)
            throw std::runtime_error("diagonal entry " + std::to_string(i) + " is not 1");
        for (Eigen::Index j = i + 1; j < psi.cols(); ++j)
            if (std::abs(psi(i, j) - psi(j, i)) > 1e-12)
                throw std::runtime_error("matrix is not symmetric at ("
                                         + std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

// Edge (i, j) iff |psi_ij| >= rho, i != j. Boundary ties are edges.
inline SimpleGraph threshold_graph(const Matrix& psi, double rho) {
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::invalid_argument("rho must be in [0, 1), got " + std::to_string(rho));
    validate_correlation_matrix(psi);
    SimpleGraph g(static_cast<int>(psi.rows()));
    for (Eigen::Index i = 0; i < psi.rows(); ++i)
        for (Eigen::Index j = i + 1; j < psi.cols(); ++j)
            if (std::abs(psi(i, j)) >= rho) g.add_edge(static_cast<int>(i), static_cast<int>(j));
    return g;
}

// Points are the columns of the input matrix.
inline SimpleGraph geometric_graph(const Matrix& points, double r) {
    if (r < 0.0) throw std::invalid_argument("radius must be nonnegative");
    SimpleGraph g(static_cast<int>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i)
        for (Eigen::Index j = i + 1; j < points.cols(); ++j)
            if ((points.col(i) - points.col(j)).norm() <= r)
                g.add_edge(static_cast<int>(i), static_cast<int>(j));
    return g;
}

inline SimpleGraph pseudo_geometric_graph(const Matrix& points, double r) {
    if (r < 0.0) throw std::invalid_argument("radius must be nonnegative");
    for (Eigen::Index j = 0; j < points.cols(); ++j)
        if (std::abs(points.col(j).norm() - 1.0) > 1e-8)
            throw std::invalid_argument("point " + std::to_string(j) + " is not unit norm");
    SimpleGraph g(static_cast<int>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i)
        for (Eigen::Index j = i + 1; j < points.cols(); ++j) {
            const double d = std::min((points.col(i) - points.col(j)).norm(),
                                      (points.col(i) + points.col(j)).norm());
            if (d <= r) g.add_edge(static_cast<int>(i), static_cast<int>(j));
        }
    return g;
}

// Edge list as CSV, one "i,j" per line, 0-indexed, i < j.
inline void write_edge_list(std::ostream& out, const SimpleGraph& g) {
    for (int i = 0; i < g.p(); ++i)
        for (int j = i + 1; j < g.p(); ++j)
            if (g.has_edge(i, j)) out << i << ',' << j << '\n';
}

} // namespace corrmine

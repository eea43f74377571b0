#pragma once
// Experiment engine: sample data matrices from a dispersion model, build
// thresholded correlation / partial-correlation graphs, collect count
// histograms across seeded trials, and compare them with the
// compound-Poisson predictions (TV curves, moment tables, FWER tables).
//
// Every trial owns RNG stream = trial index, so results are identical
// for a fixed (seed, trials) regardless of thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "corrmine/cpois.hpp"
#include "corrmine/graphs.hpp"
#include "corrmine/params.hpp"
#include "corrmine/scores.hpp"
#include "corrmine/sparsity.hpp"
#include "corrmine/stats.hpp"

namespace corrmine {

enum class Family { gaussian, elliptical };
enum class GraphKind { correlation, partial };
enum class Statistic { star, v_exact, v_atleast };

inline const char* to_string(GraphKind k) {
    return k == GraphKind::correlation ? "correlation" : "partial";
}

inline const char* to_string(Statistic s) {
    switch (s) {
        case Statistic::star: return "n_e";
        case Statistic::v_exact: return "n_v_exact";
        default: return "n_v_atleast";
    }
}

// Dispersion model as a function of p, so p-grids can rebuild it.
struct SigmaModel {
    CovKind kind = CovKind::diagonal;
    double tau_pow = 0.0, kappa_pow = 0.0; // tau = ceil(p^tau_pow) etc. when > 0
    int tau = 0, kappa = 0;                // absolute values when the powers are 0
    double xi = 0.1;
    Matrix explicit_matrix;

    CovarianceSpec build(int p) const {
        switch (kind) {
            case CovKind::diagonal:
                return make_diagonal(p);
            case CovKind::tau_kappa: {
                int t = tau_pow > 0.0 ? static_cast<int>(std::ceil(std::pow(p, tau_pow))) : tau;
                int k = kappa_pow > 0.0 ? static_cast<int>(std::ceil(std::pow(p, kappa_pow))) : kappa;
                t = std::min(std::max(t, 1), p);
                k = std::max(k, 2);
                return make_tau_kappa_sparse(p, t, k, xi);
            }
            case CovKind::block: {
                int t = tau_pow > 0.0 ? static_cast<int>(std::ceil(std::pow(p, tau_pow))) : tau;
                t = std::min(std::max(t, 1), p);
                return make_block_sparse(p, t, xi);
            }
            default:
                if (explicit_matrix.rows() != p || explicit_matrix.cols() != p)
                    throw std::invalid_argument("explicit dispersion matrix has wrong dimension");
                return CovarianceSpec{p, explicit_matrix, CovKind::explicit_matrix, 0, 0, 0.0};
        }
    }
};

struct TrialConfig {
    int n = 10;
    int p = 100;
    int delta = 1;
    SigmaModel sigma;
    double rho = -1.0; // explicit threshold; negative means derive from e
    double e = 1.0;
    long trials = 2000;
    std::uint64_t seed = 0;
    bool partial = false; // build partial-correlation graphs as well
    Family family = Family::gaussian;
    double radial_sigma = 0.5; // log-normal radial scale for the elliptical family
    double mean_shift = 0.0;   // scale of the deterministic mean pattern
    int threads = 1;
};

inline double resolve_rho(const TrialConfig& cfg) {
    return cfg.rho >= 0.0 ? cfg.rho : rho_threshold(cfg.p, cfg.n, cfg.delta, cfg.e);
}

inline double resolve_e(const TrialConfig& cfg) {
    return cfg.rho >= 0.0 ? e_from_rho(cfg.p, cfg.n, cfg.delta, cfg.rho) : cfg.e;
}

// Rows i.i.d. N(0, sigma).
inline Matrix sample_matrix_normal(const Matrix& sigma, int n, CounterRng& rng) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("Cholesky factorization of the dispersion matrix failed");
    Matrix z(n, sigma.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.next_normal();
    return z * Matrix(llt.matrixL()).transpose();
}

// X = r W with W matrix normal and r a positive scalar from `radial`;
// this stays inside the vector-elliptical family.
inline Matrix sample_vector_elliptical(const Matrix& sigma, int n,
                                       const std::function<double(CounterRng&)>& radial,
                                       CounterRng& rng) {
    Matrix x = sample_matrix_normal(sigma, n, rng);
    const double r = radial(rng);
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::runtime_error("radial law produced a nonpositive value");
    return r * x;
}

struct EmpiricalDistribution {
    long trials = 0;
    int delta = 1;
    bool has_partial = false;
    // histograms[kind][statistic][value] = number of trials
    std::array<std::array<std::vector<long>, 3>, 2> histograms;

    const std::vector<long>& histogram(GraphKind k, Statistic s) const {
        return histograms[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
    }

    void record(GraphKind k, const CountStatistics& c) {
        add(histograms[static_cast<std::size_t>(k)][0], c.n_e);
        add(histograms[static_cast<std::size_t>(k)][1], c.n_v_exact);
        add(histograms[static_cast<std::size_t>(k)][2], c.n_v_atleast);
    }

    void merge(const EmpiricalDistribution& other) {
        trials += other.trials;
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t s = 0; s < 3; ++s) {
                auto& mine = histograms[k][s];
                const auto& theirs = other.histograms[k][s];
                if (theirs.size() > mine.size()) mine.resize(theirs.size(), 0);
                for (std::size_t v = 0; v < theirs.size(); ++v) mine[v] += theirs[v];
            }
    }

private:
    static void add(std::vector<long>& hist, std::uint64_t value) {
        if (value > (1u << 20))
            throw std::runtime_error("count value " + std::to_string(value)
                                     + " too large to histogram");
        if (value >= hist.size()) hist.resize(static_cast<std::size_t>(value) + 1, 0);
        ++hist[static_cast<std::size_t>(value)];
    }
};

namespace detail {

inline void check_equivalence(const Matrix& R, const SimpleGraph& g_corr,
                              const SimpleGraph& g_pgeo, double rho, long trial) {
    for (Eigen::Index i = 0; i < R.rows(); ++i)
        for (Eigen::Index j = i + 1; j < R.cols(); ++j) {
            if (std::abs(std::abs(R(i, j)) - rho) < 1e-9) continue; // threshold tie
            if (g_corr.has_edge(static_cast<int>(i), static_cast<int>(j))
                != g_pgeo.has_edge(static_cast<int>(i), static_cast<int>(j)))
                throw std::runtime_error("trial " + std::to_string(trial)
                                         + ": correlation vs pseudo-geometric edge mismatch at ("
                                         + std::to_string(i) + "," + std::to_string(j) + ")");
        }
}

// (1/h) ||u_i -+ u_j|| <= ||y_i -+ y_j|| <= h ||u_i -+ u_j||, via the
// Gram matrices (all columns are unit, so squared distances are 2 -+ 2G).
inline void check_distance_preservation(const Matrix& gu, const Matrix& gy, double h2,
                                        long trial) {
    const double rel = 1.0 + 1e-9, abs_tol = 1e-12;
    for (Eigen::Index i = 0; i < gu.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gu.cols(); ++j) {
            for (int sign = -1; sign <= 1; sign += 2) {
                const double du2 = std::max(0.0, 2.0 + sign * 2.0 * gu(i, j));
                const double dy2 = std::max(0.0, 2.0 + sign * 2.0 * gy(i, j));
                if (dy2 > h2 * du2 * rel + abs_tol || du2 > h2 * dy2 * rel + abs_tol)
                    throw std::runtime_error("trial " + std::to_string(trial)
                                             + ": U/Y distance preservation violated at ("
                                             + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
}

inline void check_counts(const SimpleGraph& g, int delta, long trial) {
    if (!portmanteau_holds(g, delta))
        throw std::runtime_error("trial " + std::to_string(trial)
                                 + ": portmanteau inequality violated");
    if (star_count(g, 1) % 2 != 0)
        throw std::runtime_error("trial " + std::to_string(trial) + ": odd degree sum");
}

inline Vector mean_pattern(int p, double scale) {
    Vector mu(p);
    for (int j = 0; j < p; ++j) mu[j] = scale * (1.0 + j % 5);
    return mu;
}

} // namespace detail

// One simulated data matrix for the configured family (without the
// Cholesky factorization, which the caller precomputes).
inline Matrix sample_trial_matrix(const TrialConfig& cfg, const Matrix& chol_lower,
                                  CounterRng& rng) {
    Matrix x(cfg.n, cfg.p);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.next_normal();
    x = x * chol_lower.transpose();
    if (cfg.family == Family::elliptical)
        x *= std::exp(cfg.radial_sigma * rng.next_normal()); // log-normal radial
    if (cfg.mean_shift != 0.0)
        x.rowwise() += detail::mean_pattern(cfg.p, cfg.mean_shift).transpose();
    return x;
}

inline EmpiricalDistribution run_trials(const TrialConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (cfg.n < 4) throw std::invalid_argument("run_trials: n must be >= 4");
    if (cfg.delta < 1 || cfg.delta > cfg.p - 1)
        throw std::invalid_argument("run_trials: delta must be in [1, p-1]");
    if (cfg.partial && cfg.p < cfg.n)
        throw std::invalid_argument("run_trials: partial-correlation graphs need p >= n");
    const double rho = resolve_rho(cfg);
    const double r = rho_to_radius(rho);
    const CovarianceSpec sigma = cfg.sigma.build(cfg.p);
    Eigen::LLT<Matrix> llt(sigma.matrix);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("Cholesky factorization of the dispersion matrix failed");
    const Matrix chol_lower = llt.matrixL();

    auto run_range = [&](long lo, long hi) {
        EmpiricalDistribution out;
        out.delta = cfg.delta;
        out.has_partial = cfg.partial;
        for (long t = lo; t < hi; ++t) {
            CounterRng rng(cfg.seed, static_cast<std::uint64_t>(t));
            const Matrix x = sample_trial_matrix(cfg, chol_lower, rng);
            const Matrix u = u_scores(x);
            const Matrix rmat = sample_correlation(x);
            const SimpleGraph g_corr = threshold_graph(rmat, rho);
            const SimpleGraph g_pgeo = pseudo_geometric_graph(u, r);
            detail::check_equivalence(rmat, g_corr, g_pgeo, rho, t);
            detail::check_counts(g_corr, cfg.delta, t);
            out.record(GraphKind::correlation, count_statistics(g_corr, cfg.delta));
            if (cfg.partial) {
                const YScores ys = y_scores_full(u);
                const Matrix gu = symmetrized(u.transpose() * u);
                const Matrix gy = symmetrized(ys.y.transpose() * ys.y);
                const double h = ys.lambda_max / ys.lambda_min;
                detail::check_distance_preservation(gu, gy, h * h, t);
                const SimpleGraph g_part = threshold_graph(as_correlation(gy), rho);
                detail::check_counts(g_part, cfg.delta, t);
                out.record(GraphKind::partial, count_statistics(g_part, cfg.delta));
            }
            ++out.trials;
        }
        return out;
    };

    const int threads = std::max(1, cfg.threads);
    if (threads == 1 || cfg.trials < 2 * threads) return run_range(0, cfg.trials);

    std::vector<EmpiricalDistribution> parts(static_cast<std::size_t>(threads));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    const long chunk = (cfg.trials + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            const long lo = w * chunk, hi = std::min<long>(cfg.trials, lo + chunk);
            try {
                if (lo < hi) parts[static_cast<std::size_t>(w)] = run_range(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    EmpiricalDistribution merged;
    merged.delta = cfg.delta;
    merged.has_partial = cfg.partial;
    for (const auto& part : parts) merged.merge(part);
    return merged;
}

// Compound-Poisson parameter sets for a resolved configuration: the
// finite-p law (conditional alpha) and the limiting law.
inline AlphaEstimate alpha_finite_for(const TrialConfig& cfg, double rho, long alpha_trials) {
    if (cfg.delta == 1) {
        AlphaEstimate a;
        a.delta = 1;
        a.values = {0.0, 1.0};
        a.std_errors = {0.0, 0.0};
        a.trials = 0;
        a.kind = AlphaKind::finite;
        a.rho = rho;
        return a;
    }
    CounterRng rng(cfg.seed, 0xA1FA0000u + static_cast<std::uint64_t>(cfg.p));
    return estimate_alpha_finite(cfg.n, cfg.delta, rho, alpha_trials, rng);
}

inline AlphaEstimate alpha_limit_for(const TrialConfig& cfg, long alpha_trials) {
    if (cfg.delta <= 2) return analytic_alpha(cfg.n, cfg.delta);
    CounterRng rng(cfg.seed, 0xA11B0000u + static_cast<std::uint64_t>(cfg.p));
    return estimate_alpha_limit(cfg.n, cfg.delta, alpha_trials, rng);
}

struct TvRow {
    int p;
    GraphKind kind;
    double rho;
    double e;
    double lambda_finite;
    double lambda_limit;
    double tv_finite;  // empirical law vs CP(lambda_{p,n,delta,rho}, zeta_rho)
    double tv_limit;   // empirical law vs CP(lambda_{n,delta}(e), zeta)
    double tv_poisson; // empirical law vs Poisson(e^delta/delta!)
};

inline std::vector<TvRow> tv_curve(TrialConfig cfg, const std::vector<int>& p_grid,
                                   Statistic stat = Statistic::v_atleast,
                                   long alpha_trials = 20000) {
    std::vector<TvRow> rows;
    for (int p : p_grid) {
        cfg.p = p;
        const double rho = resolve_rho(cfg);
        const double e = resolve_e(cfg);
        const EmpiricalDistribution emp = run_trials(cfg);
        const AlphaEstimate af = alpha_finite_for(cfg, rho, alpha_trials);
        const AlphaEstimate al = alpha_limit_for(cfg, alpha_trials);
        const CompoundPoisson fin = cp_finite(p, cfg.n, cfg.delta, rho, af);
        const CompoundPoisson lim = cp_limit(cfg.n, cfg.delta, e, al);
        const double pois_rate = std::exp(cfg.delta * std::log(e) - std::lgamma(cfg.delta + 1.0));
        const DiscreteDist fin_pmf = cp_pmf(fin, 1e-10);
        const DiscreteDist lim_pmf = cp_pmf(lim, 1e-10);
        const DiscreteDist pois_pmf = cp_pmf(poisson(pois_rate), 1e-10);
        const auto kinds = cfg.partial
            ? std::vector<GraphKind>{GraphKind::correlation, GraphKind::partial}
            : std::vector<GraphKind>{GraphKind::correlation};
        for (GraphKind kind : kinds) {
            const DiscreteDist law = empirical_dist(emp.histogram(kind, stat), emp.trials);
            rows.push_back(TvRow{p, kind, rho, e, fin.lambda, lim.lambda,
                                 tv_distance(law, fin_pmf), tv_distance(law, lim_pmf),
                                 tv_distance(law, pois_pmf)});
        }
    }
    return rows;
}

struct MomentRow {
    GraphKind kind;
    Statistic stat;
    double mean_emp, mean_se;
    double second_emp, second_se;
    double mean_pred, second_pred; // compound-Poisson moments
};

inline std::vector<MomentRow> moment_report(const TrialConfig& cfg, long alpha_trials = 20000) {
    const double rho = resolve_rho(cfg);
    const EmpiricalDistribution emp = run_trials(cfg);
    const CompoundPoisson fin = cp_finite(cfg.p, cfg.n, cfg.delta, rho,
                                          alpha_finite_for(cfg, rho, alpha_trials));
    const auto [mean_pred, second_pred] = cp_moments(fin);
    std::vector<MomentRow> rows;
    const auto kinds = cfg.partial
        ? std::vector<GraphKind>{GraphKind::correlation, GraphKind::partial}
        : std::vector<GraphKind>{GraphKind::correlation};
    for (GraphKind kind : kinds) {
        for (Statistic stat : {Statistic::star, Statistic::v_exact, Statistic::v_atleast}) {
            const auto& hist = emp.histogram(kind, stat);
            double s1 = 0.0, s2 = 0.0, s4 = 0.0;
            for (std::size_t v = 0; v < hist.size(); ++v) {
                const double x = static_cast<double>(v), c = static_cast<double>(hist[v]);
                s1 += c * x;
                s2 += c * x * x;
                s4 += c * x * x * x * x;
            }
            const double t = static_cast<double>(emp.trials);
            const double mean = s1 / t, second = s2 / t;
            const double var_mean = std::max(0.0, second - mean * mean) / t;
            const double var_second = std::max(0.0, s4 / t - second * second) / t;
            rows.push_back(MomentRow{kind, stat, mean, std::sqrt(var_mean), second,
                                     std::sqrt(var_second), mean_pred, second_pred});
        }
    }
    return rows;
}

struct FwerRow {
    GraphKind kind;
    double empirical; // P(N_E_delta > 0) across trials
    double se;
    double predicted; // 1 - exp(-lambda)
    double lambda;
};

inline std::vector<FwerRow> fwer_report(const TrialConfig& cfg, long alpha_trials = 20000) {
    const double rho = resolve_rho(cfg);
    const EmpiricalDistribution emp = run_trials(cfg);
    const double lambda = lambda_finite(cfg.p, cfg.n, cfg.delta, rho,
                                        alpha_finite_for(cfg, rho, alpha_trials).values);
    const double predicted = fwer(lambda);
    std::vector<FwerRow> rows;
    const auto kinds = cfg.partial
        ? std::vector<GraphKind>{GraphKind::correlation, GraphKind::partial}
        : std::vector<GraphKind>{GraphKind::correlation};
    for (GraphKind kind : kinds) {
        const auto& hist = emp.histogram(kind, Statistic::star);
        const double zero = hist.empty() ? 0.0 : static_cast<double>(hist[0]);
        const double q = 1.0 - zero / static_cast<double>(emp.trials);
        rows.push_back(FwerRow{kind, q,
                               std::sqrt(q * (1.0 - q) / static_cast<double>(emp.trials)),
                               predicted, lambda});
    }
    return rows;
}

} // namespace corrmine

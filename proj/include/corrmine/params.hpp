#pragma once
// Parameters of the compound-Poisson laws attached to thresholded count
// statistics: universal-vertex probabilities alpha (Monte Carlo and
// closed form), increment distributions zeta, arrival rates lambda for
// the finite-p and limiting regimes, threshold formulas, the Poisson
// approximation bound, and the FWER map.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrmine/cpois.hpp"
#include "corrmine/geometry.hpp"
#include "corrmine/graphs.hpp"
#include "corrmine/rng.hpp"
#include "corrmine/special_functions.hpp"

namespace corrmine {

enum class AlphaKind { limit, finite };

struct AlphaEstimate {
    int delta;
    std::vector<double> values;     // values[l-1] = alpha(l), l = 1..delta+1
    std::vector<double> std_errors; // zero for closed forms
    long trials;                    // 0 for closed forms
    AlphaKind kind;
    double rho = std::numeric_limits<double>::quiet_NaN(); // set for finite kind
};

namespace detail {

inline AlphaEstimate alpha_from_counts(int delta, const std::vector<long>& counts, long trials,
                                       AlphaKind kind, double rho) {
    AlphaEstimate est;
    est.delta = delta;
    est.trials = trials;
    est.kind = kind;
    est.rho = rho;
    est.values.resize(counts.size());
    est.std_errors.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double v = static_cast<double>(counts[i]) / static_cast<double>(trials);
        est.values[i] = v;
        est.std_errors[i] = std::sqrt(v * (1.0 - v) / static_cast<double>(trials));
    }
    return est;
}

} // namespace detail

// alpha_l = P(exactly l-1 universal vertices in the geometric graph of
// radius 1 over delta i.i.d. uniform points in the unit ball of R^{n-2}).
inline AlphaEstimate estimate_alpha_limit(int n, int delta, long trials, CounterRng& rng) {
    if (n < 4) throw std::invalid_argument("estimate_alpha_limit: n must be >= 4");
    if (delta < 1) throw std::invalid_argument("estimate_alpha_limit: delta must be >= 1");
    if (trials < 1) throw std::invalid_argument("estimate_alpha_limit: trials must be >= 1");
    const int dim = n - 2;
    std::vector<long> counts(static_cast<std::size_t>(delta + 1), 0);
    Matrix pts(dim, delta);
    for (long t = 0; t < trials; ++t) {
        for (int j = 0; j < delta; ++j) pts.col(j) = sample_ball(dim, rng);
        const SimpleGraph g = geometric_graph(pts, 1.0);
        const int ell = count_universal(g) + 1;
        ++counts[static_cast<std::size_t>(ell - 1)];
    }
    return detail::alpha_from_counts(delta, counts, trials, AlphaKind::limit,
                                     std::numeric_limits<double>::quiet_NaN());
}

// alpha(l, r_rho) = P(exactly l universal vertices | a hub vertex has its
// delta neighbors), sampled exactly: the hub is pinned at e1 (rotational
// invariance) and each neighbor is drawn uniformly on the union of the
// antipodal caps SC(r, e1) and SC(r, -e1) -- a cap draw with a fair sign
// flip.  The hub is universal by construction, so l >= 1 always.
inline AlphaEstimate estimate_alpha_finite(int n, int delta, double rho, long trials,
                                           CounterRng& rng) {
    if (n < 4) throw std::invalid_argument("estimate_alpha_finite: n must be >= 4");
    if (delta < 1) throw std::invalid_argument("estimate_alpha_finite: delta must be >= 1");
    if (trials < 1) throw std::invalid_argument("estimate_alpha_finite: trials must be >= 1");
    if (!(rho > 0.0) || rho >= 1.0)
        throw std::invalid_argument("estimate_alpha_finite: rho must be in (0, 1)");
    const double r = rho_to_radius(rho);
    const CapSampler cap(n, r);
    std::vector<long> counts(static_cast<std::size_t>(delta + 1), 0);
    Matrix pts(n - 1, delta + 1);
    pts.setZero();
    pts(0, delta) = 1.0; // the hub e1
    for (long t = 0; t < trials; ++t) {
        for (int j = 0; j < delta; ++j) {
            Vector x = cap.draw(rng);
            if (rng.next_double() < 0.5) x = -x;
            pts.col(j) = x;
        }
        const SimpleGraph g = pseudo_geometric_graph(pts, r);
        const int ell = count_universal(g);
        ++counts[static_cast<std::size_t>(ell - 1)];
    }
    return detail::alpha_from_counts(delta, counts, trials, AlphaKind::finite, rho);
}

// Closed forms: delta = 1 gives alpha = (0, 1); delta = 2 gives
// alpha_2 = 0 and alpha_3 = (3/2) I_{3/4}((n-1)/2, 1/2).
inline AlphaEstimate analytic_alpha(int n, int delta) {
    if (n < 4) throw std::invalid_argument("analytic_alpha: n must be >= 4");
    AlphaEstimate est;
    est.delta = delta;
    est.trials = 0;
    est.kind = AlphaKind::limit;
    if (delta == 1) {
        est.values = {0.0, 1.0};
    } else if (delta == 2) {
        const double a3 = 1.5 * reg_inc_beta((n - 1) / 2.0, 0.5, 0.75);
        est.values = {1.0 - a3, 0.0, a3};
    } else {
        throw std::invalid_argument("analytic_alpha: closed forms exist only for delta in {1, 2}");
    }
    est.std_errors.assign(est.values.size(), 0.0);
    return est;
}

// zeta(l) = (alpha_l / l) / sum_s (alpha_s / s).
inline IncrementDist increment_dist(const std::vector<double>& alpha_values) {
    double norm = 0.0;
    for (std::size_t i = 0; i < alpha_values.size(); ++i) norm += alpha_values[i] / (i + 1.0);
    if (!(norm > 0.0)) throw std::invalid_argument("increment_dist: alpha has no mass");
    IncrementDist zeta;
    zeta.probs.resize(alpha_values.size());
    for (std::size_t i = 0; i < alpha_values.size(); ++i)
        zeta.probs[i] = (alpha_values[i] / (i + 1.0)) / norm;
    return zeta;
}

inline IncrementDist increment_dist(const AlphaEstimate& alpha) {
    return increment_dist(alpha.values);
}

// lambda_{p,n,delta,rho} = C(p,1) C(p-1,delta) (2 P_n(r_rho))^delta
//                          * sum_l alpha(l, r_rho)/l.
inline double lambda_finite(int p, int n, int delta, double rho,
                            const std::vector<double>& alpha_values) {
    if (delta < 1 || delta > p - 1)
        throw std::invalid_argument("lambda_finite: delta must be in [1, p-1]");
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::invalid_argument("lambda_finite: rho must be in [0, 1)");
    double weight = 0.0;
    for (std::size_t i = 0; i < alpha_values.size(); ++i) weight += alpha_values[i] / (i + 1.0);
    const double cap = pn(rho_to_radius(rho), n);
    const double log_rate = log_binom(p, 1) + log_binom(p - 1, delta)
                          + delta * std::log(2.0 * cap);
    return std::exp(log_rate) * weight;
}

// lambda_{n,delta}(e) = (1/delta!) e^delta sum_l alpha_l / l.
inline double lambda_limit(int n, int delta, double e, const std::vector<double>& alpha_values) {
    if (delta < 1) throw std::invalid_argument("lambda_limit: delta must be >= 1");
    if (!(e > 0.0)) throw std::invalid_argument("lambda_limit: e must be > 0");
    (void)n; // the n-dependence lives inside alpha
    double weight = 0.0;
    for (std::size_t i = 0; i < alpha_values.size(); ++i) weight += alpha_values[i] / (i + 1.0);
    return std::exp(delta * std::log(e) - std::lgamma(delta + 1.0)) * weight;
}

// rho_p = 1 - (1/2) (e / (2 a_n p^{1+1/delta}))^{2/(n-2)}.
inline double rho_threshold(int p, int n, int delta, double e) {
    if (p < 2) throw std::invalid_argument("rho_threshold: p must be >= 2");
    if (delta < 1) throw std::invalid_argument("rho_threshold: delta must be >= 1");
    if (!(e > 0.0)) throw std::invalid_argument("rho_threshold: e must be > 0");
    const double a_n = cap_constants(n).a_n;
    const double base = e / (2.0 * a_n * std::pow(p, 1.0 + 1.0 / delta));
    const double rho = 1.0 - 0.5 * std::pow(base, 2.0 / (n - 2));
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("rho_threshold: parameters give rho = " + std::to_string(rho)
                                    + " outside (0, 1)");
    return rho;
}

// e = a_n 2^{n/2} p^{1+1/delta} (1-rho)^{(n-2)/2}, the algebraic inverse
// of rho_threshold.
inline double e_from_rho(int p, int n, int delta, double rho) {
    if (p < 2) throw std::invalid_argument("e_from_rho: p must be >= 2");
    if (delta < 1) throw std::invalid_argument("e_from_rho: delta must be >= 1");
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::invalid_argument("e_from_rho: rho must be in [0, 1)");
    const double a_n = cap_constants(n).a_n;
    return a_n * std::pow(2.0, n / 2.0) * std::pow(p, 1.0 + 1.0 / delta)
         * std::pow(1.0 - rho, (n - 2) / 2.0);
}

// Reported diagnostic 2 p^{1+1/delta} P_n(r_rho) (the quantity the
// asymptotic regime keeps bounded).
inline double rate_diagnostic(int p, int n, int delta, double rho) {
    return 2.0 * std::pow(p, 1.0 + 1.0 / delta) * pn(rho_to_radius(rho), n);
}

// Incomplete-beta bound on the alpha tail:
//   sum_{l>=2} alpha_l <= delta (n-2) 2^{n-3} B(1/4; (n-2)/2, (n-2)(delta-1)/2 + 1).
inline double alpha_tail_beta_bound(int n, int delta) {
    if (n < 4) throw std::invalid_argument("alpha_tail_beta_bound: n must be >= 4");
    if (delta < 1) throw std::invalid_argument("alpha_tail_beta_bound: delta must be >= 1");
    const double a = (n - 2) / 2.0;
    const double b = (n - 2) * (delta - 1) / 2.0 + 1.0;
    return delta * (n - 2) * std::pow(2.0, n - 3) * inc_beta(a, b, 0.25);
}

// TV bound (5/2) (e^delta/delta!) sum_{l>=2} alpha_l between the limiting
// compound Poisson and Poisson(e^delta/delta!).  The tail is taken from
// the caller, from the delta = 2 closed form, or from the incomplete-beta
// bound, in that order of preference.
inline double poisson_approx_bound_limit(int n, int delta, double e,
                                         std::optional<double> alpha_tail = std::nullopt) {
    if (delta < 2)
        throw std::invalid_argument("poisson_approx_bound_limit: delta = 1 has Dirac(2) "
                                    "increments and no Poisson reduction");
    if (!(e > 0.0)) throw std::invalid_argument("poisson_approx_bound_limit: e must be > 0");
    double tail;
    if (alpha_tail) {
        tail = *alpha_tail;
        if (!(tail >= 0.0)) throw std::invalid_argument("alpha tail must be >= 0");
    } else if (delta == 2) {
        const AlphaEstimate a = analytic_alpha(n, 2);
        tail = a.values[1] + a.values[2];
    } else {
        tail = alpha_tail_beta_bound(n, delta);
    }
    return 2.5 * std::exp(delta * std::log(e) - std::lgamma(delta + 1.0)) * tail;
}

inline double fwer(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("fwer: lambda must be >= 0");
    return -std::expm1(-lambda);
}

// Convenience bundles.
inline CompoundPoisson cp_finite(int p, int n, int delta, double rho,
                                 const AlphaEstimate& alpha) {
    return CompoundPoisson{lambda_finite(p, n, delta, rho, alpha.values),
                           increment_dist(alpha)};
}

inline CompoundPoisson cp_limit(int n, int delta, double e, const AlphaEstimate& alpha) {
    return CompoundPoisson{lambda_limit(n, delta, e, alpha.values), increment_dist(alpha)};
}

} // namespace corrmine

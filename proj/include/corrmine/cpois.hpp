#pragma once
// Compound Poisson arithmetic.
//
// CP(lambda, zeta) is the law of Z = sum_{i=1}^N Z_i with N ~
// Poisson(lambda) and Z_i i.i.d. from an increment distribution zeta
// supported on {1, ..., support_max}.  The PMF comes from the Panjer
// recursion p(k) = (lambda/k) sum_j j zeta(j) p(k-j), run in log space
// so arbitrarily large rates need no rescaling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace corrmine {

struct IncrementDist {
    std::vector<double> probs; // probs[i] = P(increment = i+1)

    static IncrementDist dirac(int value, int support_max = 0) {
        if (value < 1) throw std::invalid_argument("increment values start at 1");
        std::vector<double> p(static_cast<std::size_t>(std::max(value, support_max)), 0.0);
        p[static_cast<std::size_t>(value - 1)] = 1.0;
        return IncrementDist{std::move(p)};
    }

    int support_max() const { return static_cast<int>(probs.size()); }

    double prob(int ell) const {
        return (ell >= 1 && ell <= support_max()) ? probs[static_cast<std::size_t>(ell - 1)] : 0.0;
    }

    void validate() const {
        if (probs.empty()) throw std::invalid_argument("increment distribution is empty");
        double sum = 0.0;
        for (double q : probs) {
            if (!(q >= 0.0) || !std::isfinite(q))
                throw std::invalid_argument("increment probabilities must be finite and >= 0");
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("increment probabilities must sum to 1");
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) m += (i + 1.0) * probs[i];
        return m;
    }

    double second_moment() const {
        double m = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) m += (i + 1.0) * (i + 1.0) * probs[i];
        return m;
    }
};

struct CompoundPoisson {
    double lambda;
    IncrementDist zeta;

    void validate() const {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("lambda must be finite and >= 0");
        zeta.validate();
    }
};

// Poisson(lambda) as the unit-increment compound Poisson.
inline CompoundPoisson poisson(double lambda) {
    return CompoundPoisson{lambda, IncrementDist::dirac(1)};
}

struct DiscreteDist {
    std::vector<double> pmf; // pmf[k] = P(k), k = 0, 1, ...
    double tail_mass = 0.0;  // mass beyond the stored range

    double prob(int k) const {
        return (k >= 0 && k < static_cast<int>(pmf.size())) ? pmf[static_cast<std::size_t>(k)] : 0.0;
    }
};

inline DiscreteDist cp_pmf(const CompoundPoisson& cp, double eps = 1e-12) {
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("eps must be in (0, 1)");
    cp.validate();
    if (cp.lambda == 0.0) return DiscreteDist{{1.0}, 0.0};

    const int m = cp.zeta.support_max();
    std::vector<double> log_jz(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const double q = cp.zeta.prob(j);
        log_jz[static_cast<std::size_t>(j - 1)] =
            q > 0.0 ? std::log(static_cast<double>(j)) + std::log(q)
                    : -std::numeric_limits<double>::infinity();
    }

    // Hard stop far beyond the mode; normally the mass target hits first.
    const double mean = cp.lambda * cp.zeta.mean();
    const double var = cp.lambda * cp.zeta.second_moment();
    const int k_cap = static_cast<int>(mean + 100.0 * std::sqrt(var + 1.0) + 1000.0);

    std::vector<double> logp;
    logp.push_back(-cp.lambda);
    double cum = std::exp(-cp.lambda), comp = 0.0; // Kahan-compensated mass
    const double log_lambda = std::log(cp.lambda);
    for (int k = 1; cum < 1.0 - eps && k <= k_cap; ++k) {
        // log-sum-exp of log(j zeta(j)) + logp[k-j] over j = 1..min(k, m)
        double peak = -std::numeric_limits<double>::infinity();
        const int jmax = std::min(k, m);
        for (int j = 1; j <= jmax; ++j)
            peak = std::max(peak, log_jz[static_cast<std::size_t>(j - 1)]
                                  + logp[static_cast<std::size_t>(k - j)]);
        double lpk;
        if (std::isinf(peak)) {
            lpk = peak;
        } else {
            double s = 0.0;
            for (int j = 1; j <= jmax; ++j)
                s += std::exp(log_jz[static_cast<std::size_t>(j - 1)]
                              + logp[static_cast<std::size_t>(k - j)] - peak);
            lpk = log_lambda - std::log(static_cast<double>(k)) + peak + std::log(s);
        }
        logp.push_back(lpk);
        const double pk = std::exp(lpk);
        const double y = pk - comp;
        const double t = cum + y;
        comp = (t - cum) - y;
        cum = t;
    }

    DiscreteDist out;
    out.pmf.reserve(logp.size());
    for (double lv : logp) out.pmf.push_back(std::exp(lv));
    out.tail_mass = std::max(0.0, 1.0 - cum);
    return out;
}

// (mean, second moment): lambda E[zeta] and lambda E[zeta^2] + (lambda E[zeta])^2.
inline std::pair<double, double> cp_moments(const CompoundPoisson& cp) {
    cp.validate();
    const double m1 = cp.lambda * cp.zeta.mean();
    return {m1, cp.lambda * cp.zeta.second_moment() + m1 * m1};
}

// Total variation over the union support, plus half the unaccounted tail
// masses as an upper-bias correction for the truncation.
inline double tv_distance(const DiscreteDist& d1, const DiscreteDist& d2) {
    const int len = static_cast<int>(std::max(d1.pmf.size(), d2.pmf.size()));
    double sum = 0.0;
    for (int k = 0; k < len; ++k) sum += std::abs(d1.prob(k) - d2.prob(k));
    const double tv = 0.5 * sum + 0.5 * (d1.tail_mass + d2.tail_mass);
    return std::clamp(tv, 0.0, 1.0);
}

inline double tv_distance(const IncrementDist& z1, const IncrementDist& z2) {
    const int len = std::max(z1.support_max(), z2.support_max());
    double sum = 0.0;
    for (int ell = 1; ell <= len; ++ell) sum += std::abs(z1.prob(ell) - z2.prob(ell));
    return 0.5 * sum;
}

// Upper bound on d_TV(CP(l1, z1), CP(l2, z2)):
//   min{l1, l2} d_TV(z1, z2) + min{ |l1 - l2|, sqrt(2/e) |sqrt(l1) - sqrt(l2)| }.
inline double cp_tv_bound(const CompoundPoisson& cp1, const CompoundPoisson& cp2) {
    cp1.validate();
    cp2.validate();
    const double zeta_term = std::min(cp1.lambda, cp2.lambda) * tv_distance(cp1.zeta, cp2.zeta);
    const double rate_term = std::min(std::abs(cp1.lambda - cp2.lambda),
                                      std::sqrt(2.0 / std::numbers::e)
                                          * std::abs(std::sqrt(cp1.lambda) - std::sqrt(cp2.lambda)));
    return zeta_term + rate_term;
}

} // namespace corrmine

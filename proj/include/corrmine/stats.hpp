#pragma once
// Statistical test helpers for the simulation suites: a two-sample
// chi-square homogeneity test on count histograms and a one-sample
// Kolmogorov-Smirnov test against a reference CDF.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "corrmine/cpois.hpp"
#include "corrmine/special_functions.hpp"

namespace corrmine {

inline DiscreteDist empirical_dist(const std::vector<long>& histogram, long trials) {
    if (trials < 1) throw std::invalid_argument("empirical_dist: trials must be >= 1");
    DiscreteDist d;
    d.pmf.reserve(histogram.size());
    for (long c : histogram) d.pmf.push_back(static_cast<double>(c) / static_cast<double>(trials));
    d.tail_mass = 0.0;
    return d;
}

// Two-sample chi-square homogeneity test. Bins are pooled left-to-right
// until each pooled bin has expected count >= 5 under both samples (the
// usual validity rule); a trailing underfull bin merges backwards.
// Returns the p-value; 1.0 when fewer than two pooled bins remain.
inline double chi2_homogeneity_pvalue(const std::vector<long>& h1, const std::vector<long>& h2) {
    const std::size_t len = std::max(h1.size(), h2.size());
    auto at = [](const std::vector<long>& h, std::size_t k) {
        return k < h.size() ? static_cast<double>(h[k]) : 0.0;
    };
    double n1 = 0.0, n2 = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        n1 += at(h1, k);
        n2 += at(h2, k);
    }
    if (!(n1 > 0.0) || !(n2 > 0.0))
        throw std::invalid_argument("chi2_homogeneity_pvalue: empty histogram");
    const double total = n1 + n2;

    std::vector<std::pair<double, double>> pooled; // (observed1, observed2)
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        a += at(h1, k);
        b += at(h2, k);
        const double combined = a + b;
        if (n1 * combined / total >= 5.0 && n2 * combined / total >= 5.0) {
            pooled.emplace_back(a, b);
            a = b = 0.0;
        }
    }
    if (a + b > 0.0) {
        if (pooled.empty()) {
            pooled.emplace_back(a, b);
        } else {
            pooled.back().first += a;
            pooled.back().second += b;
        }
    }
    if (pooled.size() < 2) return 1.0;

    double stat = 0.0;
    for (const auto& [o1, o2] : pooled) {
        const double e1 = n1 * (o1 + o2) / total;
        const double e2 = n2 * (o1 + o2) / total;
        stat += (o1 - e1) * (o1 - e1) / e1 + (o2 - e2) * (o2 - e2) / e2;
    }
    const double df = static_cast<double>(pooled.size() - 1);
    return reg_inc_gamma_upper(df / 2.0, stat / 2.0);
}

// Kolmogorov survival function Q(t) = 2 sum_j (-1)^{j-1} exp(-2 j^2 t^2),
// evaluated through whichever of the two classical series converges fast.
inline double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.18) {
        const double x = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * t * t));
        const double series = x + std::pow(x, 9.0) + std::pow(x, 25.0) + std::pow(x, 49.0);
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / t * series, 0.0, 1.0);
    }
    const double x = std::exp(-2.0 * t * t);
    double sum = 0.0, sign = 1.0, term = x;
    for (int j = 1; j <= 50 && term > 1e-18; ++j) {
        sum += sign * term;
        sign = -sign;
        term = std::pow(x, (j + 1.0) * (j + 1.0));
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// One-sample Kolmogorov-Smirnov test of `samples` against the continuous
// CDF `cdf`; returns the asymptotic p-value.
inline double ks_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_pvalue: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    const double sn = std::sqrt(n);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

} // namespace corrmine

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "corrmine/cpois.hpp"
#include "corrmine/rng.hpp"

using corrmine::CompoundPoisson;
using corrmine::cp_moments;
using corrmine::cp_pmf;
using corrmine::cp_tv_bound;
using corrmine::CounterRng;
using corrmine::DiscreteDist;
using corrmine::IncrementDist;
using corrmine::poisson;
using corrmine::tv_distance;

namespace {

// Brute-force CP PMF: mix the m-fold increment convolutions with Poisson
// weights, truncating the Poisson sum once the weight tail is negligible.
std::vector<double> cp_pmf_convolution(double lambda, const IncrementDist& zeta, int len) {
    std::vector<double> out(static_cast<std::size_t>(len), 0.0);
    std::vector<double> conv(static_cast<std::size_t>(len), 0.0);
    conv[0] = 1.0; // zero increments
    double weight = std::exp(-lambda);
    out[0] += weight;
    for (int m = 1; m <= 400; ++m) {
        std::vector<double> next(static_cast<std::size_t>(len), 0.0);
        for (int k = 0; k < len; ++k) {
            if (conv[static_cast<std::size_t>(k)] == 0.0) continue;
            for (int j = 1; j <= zeta.support_max(); ++j)
                if (k + j < len)
                    next[static_cast<std::size_t>(k + j)]
                        += conv[static_cast<std::size_t>(k)] * zeta.prob(j);
        }
        conv.swap(next);
        weight *= lambda / m;
        for (int k = 0; k < len; ++k) out[static_cast<std::size_t>(k)] += weight * conv[static_cast<std::size_t>(k)];
        if (weight < 1e-18 && m > lambda) break;
    }
    return out;
}

double poisson_pmf(double lambda, int k) {
    return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

} // namespace

TEST_CASE("increment distributions validate and summarize") {
    const IncrementDist d2 = IncrementDist::dirac(2);
    d2.validate();
    REQUIRE(d2.support_max() == 2);
    REQUIRE(d2.prob(2) == 1.0);
    REQUIRE(d2.prob(1) == 0.0);
    REQUIRE(d2.mean() == 2.0);
    REQUIRE(d2.second_moment() == 4.0);
    REQUIRE_THROWS(IncrementDist::dirac(0));
    REQUIRE_THROWS(IncrementDist{{0.5, 0.6}}.validate());
    REQUIRE_THROWS(IncrementDist{{}}.validate());
}

TEST_CASE("unit increments reduce to the Poisson law") {
    for (double lambda : {0.1, 1.0, 4.7, 25.0}) {
        const DiscreteDist d = cp_pmf(poisson(lambda), 1e-14);
        for (int k = 0; k < static_cast<int>(d.pmf.size()); ++k)
            REQUIRE(std::abs(d.prob(k) - poisson_pmf(lambda, k)) < 1e-13);
        REQUIRE(d.tail_mass < 1e-13);
    }
}

TEST_CASE("doubled increments give the spread Poisson law") {
    const double lambda = 2.0;
    const DiscreteDist d = cp_pmf(CompoundPoisson{lambda, IncrementDist::dirac(2)}, 1e-13);
    for (int k = 0; k < static_cast<int>(d.pmf.size()); ++k) {
        if (k % 2 == 1)
            REQUIRE(d.prob(k) == 0.0);
        else
            REQUIRE(std::abs(d.prob(k) - poisson_pmf(lambda, k / 2)) < 1e-13);
    }
}

TEST_CASE("recursion matches the convolution oracle") {
    CounterRng rng(201, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double lambda = 5.0 * rng.next_double_pos();
        double a = rng.next_double(), b = rng.next_double(), c = rng.next_double();
        const double s = a + b + c;
        a /= s;
        b /= s;
        c /= s;
        const CompoundPoisson cp{lambda, IncrementDist{{a, b, c}}};
        const DiscreteDist got = cp_pmf(cp, 1e-13);
        const auto want = cp_pmf_convolution(lambda, cp.zeta, static_cast<int>(got.pmf.size()));
        for (std::size_t k = 0; k < got.pmf.size(); ++k)
            REQUIRE(std::abs(got.pmf[k] - want[k]) < 1e-10);
    }
}

TEST_CASE("pmf bookkeeping invariants") {
    const CompoundPoisson cp{3.0, IncrementDist{{0.2, 0.5, 0.3}}};
    for (double eps : {1e-3, 1e-6, 1e-12}) {
        const DiscreteDist d = cp_pmf(cp, eps);
        double mass = 0.0;
        for (double q : d.pmf) {
            REQUIRE(q >= 0.0);
            mass += q;
        }
        REQUIRE(std::abs(mass + d.tail_mass - 1.0) < 1e-10);
        REQUIRE(d.tail_mass <= eps + 1e-12);
    }
    // coarser eps only truncates earlier; shared prefix identical
    const DiscreteDist fine = cp_pmf(cp, 1e-12);
    const DiscreteDist coarse = cp_pmf(cp, 1e-3);
    REQUIRE(coarse.pmf.size() <= fine.pmf.size());
    for (std::size_t k = 0; k < coarse.pmf.size(); ++k)
        REQUIRE(coarse.pmf[k] == fine.pmf[k]);
    REQUIRE_THROWS(cp_pmf(cp, 0.0));
    REQUIRE_THROWS(cp_pmf(cp, 1.0));
    // zero rate: unit mass at zero
    const DiscreteDist zero = cp_pmf(poisson(0.0));
    REQUIRE(zero.pmf.size() == 1);
    REQUIRE(zero.pmf[0] == 1.0);
}

TEST_CASE("large rates survive the log-space recursion") {
    const CompoundPoisson cp{800.0, IncrementDist{{0.5, 0.5}}};
    const DiscreteDist d = cp_pmf(cp, 1e-10);
    double mass = 0.0;
    for (double q : d.pmf) mass += q;
    REQUIRE(std::abs(mass + d.tail_mass - 1.0) < 1e-9);
    const auto [mean, second] = cp_moments(cp);
    double emp_mean = 0.0;
    for (std::size_t k = 0; k < d.pmf.size(); ++k) emp_mean += static_cast<double>(k) * d.pmf[k];
    REQUIRE(std::abs(emp_mean - mean) / mean < 1e-6);
    REQUIRE(second > mean * mean);
}

TEST_CASE("moment formulas") {
    const auto [m1, m2] = cp_moments(poisson(3.0));
    REQUIRE(std::abs(m1 - 3.0) < 1e-14);
    REQUIRE(std::abs(m2 - 12.0) < 1e-14); // lambda + lambda^2

    const auto [d1, d2] = cp_moments(CompoundPoisson{2.0, IncrementDist::dirac(2)});
    REQUIRE(d1 == 4.0);
    REQUIRE(d2 == 24.0);

    // Monte-Carlo oracle: simulate CP draws directly.
    const CompoundPoisson cp{1.5, IncrementDist{{0.3, 0.3, 0.4}}};
    const auto [want_mean, want_second] = cp_moments(cp);
    CounterRng rng(202, 0);
    const long trials = 1000000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (long t = 0; t < trials; ++t) {
        // Poisson count by inversion
        int count = 0;
        double acc = rng.next_double_pos();
        double threshold = std::exp(-cp.lambda);
        while (acc > threshold) {
            acc *= rng.next_double_pos();
            ++count;
        }
        long z = 0;
        for (int i = 0; i < count; ++i) {
            const double u = rng.next_double();
            z += u < 0.3 ? 1 : (u < 0.6 ? 2 : 3);
        }
        const double x = static_cast<double>(z);
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    s1 /= trials;
    s2 /= trials;
    s4 /= trials;
    const double se_mean = std::sqrt((s2 - s1 * s1) / trials);
    const double se_second = std::sqrt(std::max(0.0, s4 - s2 * s2) / trials);
    REQUIRE(std::abs(s1 - want_mean) < 4.0 * se_mean);
    REQUIRE(std::abs(s2 - want_second) < 4.0 * se_second);
}

TEST_CASE("tv distance basics") {
    const DiscreteDist a = cp_pmf(poisson(1.0));
    // self distance collapses to the conservative truncated-tail allowance
    REQUIRE(tv_distance(a, a) <= a.tail_mass + 1e-15);

    DiscreteDist dirac0{{1.0}, 0.0};
    DiscreteDist dirac1{{0.0, 1.0}, 0.0};
    REQUIRE(tv_distance(dirac0, dirac0) == 0.0);
    REQUIRE(tv_distance(dirac0, dirac1) == 1.0);

    const DiscreteDist b = cp_pmf(poisson(1.1));
    REQUIRE(tv_distance(a, b) == tv_distance(b, a));

    // closed-sum oracle
    double direct = 0.0;
    for (int k = 0; k <= 200; ++k)
        direct += std::abs(poisson_pmf(1.0, k) - poisson_pmf(1.1, k));
    REQUIRE(std::abs(tv_distance(a, b) - 0.5 * direct) < 1e-10);

    // triangle inequality on sampled triples
    const DiscreteDist c = cp_pmf(CompoundPoisson{0.7, IncrementDist{{0.5, 0.5}}});
    REQUIRE(tv_distance(a, b) <= tv_distance(a, c) + tv_distance(c, b) + 1e-12);
}

TEST_CASE("tv bound dominates the exact distance") {
    // pinned case: same zeta, rates 1 and 4 -> bound sqrt(2/e)
    const CompoundPoisson p1{1.0, IncrementDist::dirac(1)};
    const CompoundPoisson p4{4.0, IncrementDist::dirac(1)};
    REQUIRE(std::abs(cp_tv_bound(p1, p4) - std::sqrt(2.0 / std::numbers::e)) < 1e-14);
    REQUIRE(cp_tv_bound(p1, p1) == 0.0);

    CounterRng rng(203, 0);
    for (int trial = 0; trial < 100; ++trial) {
        auto random_zeta = [&] {
            double a = rng.next_double_pos(), b = rng.next_double(), c = rng.next_double();
            const double s = a + b + c;
            return IncrementDist{{a / s, b / s, c / s}};
        };
        const CompoundPoisson cp1{4.0 * rng.next_double_pos(), random_zeta()};
        const CompoundPoisson cp2{4.0 * rng.next_double_pos(), random_zeta()};
        const double bound = cp_tv_bound(cp1, cp2);
        const double exact = tv_distance(cp_pmf(cp1, 1e-12), cp_pmf(cp2, 1e-12));
        REQUIRE(exact <= bound + 1e-9);
    }
}

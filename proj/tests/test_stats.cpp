#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "corrmine/rng.hpp"
#include "corrmine/stats.hpp"

using corrmine::chi2_homogeneity_pvalue;
using corrmine::CounterRng;
using corrmine::empirical_dist;
using corrmine::kolmogorov_q;
using corrmine::ks_pvalue;

TEST_CASE("empirical distribution from a histogram") {
    const auto d = empirical_dist({2, 0, 3, 5}, 10);
    REQUIRE(d.pmf == std::vector<double>{0.2, 0.0, 0.3, 0.5});
    REQUIRE(d.tail_mass == 0.0);
    REQUIRE(d.prob(1) == 0.0);
    REQUIRE(d.prob(3) == 0.5);
    REQUIRE(d.prob(17) == 0.0);
    REQUIRE_THROWS(empirical_dist({1, 2}, 0));
}

TEST_CASE("chi-square homogeneity basics") {
    // identical histograms carry no evidence
    REQUIRE(chi2_homogeneity_pvalue({100, 50, 25}, {100, 50, 25}) == 1.0);
    // proportional histograms likewise
    REQUIRE(std::abs(chi2_homogeneity_pvalue({100, 50, 25}, {200, 100, 50}) - 1.0) < 1e-12);
    // wildly different histograms are flagged
    REQUIRE(chi2_homogeneity_pvalue({1000, 10}, {10, 1000}) < 1e-12);
    // a single occupied pooled bin cannot be tested
    REQUIRE(chi2_homogeneity_pvalue({1000}, {900}) == 1.0);
    // length mismatch is treated as trailing zeros
    REQUIRE(chi2_homogeneity_pvalue({500, 500}, {500, 500, 0, 0}) == 1.0);
    REQUIRE_THROWS(chi2_homogeneity_pvalue({0, 0}, {1, 2}));
}

TEST_CASE("chi-square under the null is not anticonservative") {
    // samples drawn from one multinomial should rarely be flagged
    CounterRng rng(501, 0);
    const std::vector<double> probs{0.5, 0.3, 0.15, 0.05};
    int rejects = 0;
    const int reps = 200;
    for (int t = 0; t < reps; ++t) {
        std::vector<long> h1(probs.size(), 0), h2(probs.size(), 0);
        for (int i = 0; i < 400; ++i) {
            auto draw = [&](std::vector<long>& h) {
                double u = rng.next_double(), acc = 0.0;
                for (std::size_t k = 0; k < probs.size(); ++k) {
                    acc += probs[k];
                    if (u < acc || k + 1 == probs.size()) {
                        ++h[k];
                        break;
                    }
                }
            };
            draw(h1);
            draw(h2);
        }
        if (chi2_homogeneity_pvalue(h1, h2) < 0.01) ++rejects;
    }
    REQUIRE(rejects <= 12); // ~2 expected at the 1% level
}

TEST_CASE("kolmogorov survival function") {
    REQUIRE(kolmogorov_q(0.0) == 1.0);
    REQUIRE(kolmogorov_q(-1.0) == 1.0);
    REQUIRE(kolmogorov_q(10.0) < 1e-80);

    // direct alternating series as the oracle on both branch sides
    for (double t : {0.4, 0.6, 0.9, 1.0, 1.17, 1.19, 1.5, 2.0}) {
        double sum = 0.0;
        for (int j = 1; j <= 200; ++j)
            sum += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * t * t);
        REQUIRE(std::abs(kolmogorov_q(t) - sum) < 1e-10);
    }

    // continuity across the branch switch
    REQUIRE(std::abs(kolmogorov_q(1.18 - 1e-9) - kolmogorov_q(1.18 + 1e-9)) < 1e-7);

    // pinned value Q(1) = 0.26999967...
    REQUIRE(std::abs(kolmogorov_q(1.0) - 0.2699996716773362) < 1e-10);
}

TEST_CASE("ks test accepts its own distribution and rejects a shifted one") {
    CounterRng rng(502, 0);
    std::vector<double> unif(4000);
    for (double& v : unif) v = rng.next_double();
    auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    REQUIRE(ks_pvalue(unif, uniform_cdf) > 0.001);

    std::vector<double> shifted(unif);
    for (double& v : shifted) v = 0.8 * v + 0.2;
    REQUIRE(ks_pvalue(shifted, uniform_cdf) < 1e-10);

    REQUIRE_THROWS(ks_pvalue({}, uniform_cdf));
}

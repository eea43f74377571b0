#pragma once
// Spherical-cap areas, the antipodal pseudo metric, and seeded samplers
// on spheres, balls, and caps.
//
// Throughout, the sphere S^{n-2} is the unit sphere of R^{n-1}; a cap
// SC(r, w) is the set of unit vectors within Euclidean distance r of w.
// P_n(r) denotes the normalized (probability) area of such a cap.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "corrmine/rng.hpp"
#include "corrmine/special_functions.hpp"

namespace corrmine {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct CapConstants {
    int n;
    double a_n;
    double b_n;
};

// b_n = 2 Gamma((n-1)/2) / (sqrt(pi) Gamma((n-2)/2)),  a_n = b_n / (2(n-2)).
inline CapConstants cap_constants(int n) {
    if (n < 4) throw std::invalid_argument("cap_constants: n must be >= 4");
    const double log_bn = std::log(2.0) + std::lgamma((n - 1) / 2.0)
                        - std::lgamma((n - 2) / 2.0) - 0.5 * std::log(std::numbers::pi);
    const double bn = std::exp(log_bn);
    return CapConstants{n, bn / (2.0 * (n - 2)), bn};
}

// Normalized cap area P_n(r) for a cap of radius r on S^{n-2}.
//
// The defining integral (b_n/2) * int_{1-r^2/2}^{1} (1-u^2)^{(n-4)/2} du
// reduces under t = 1-u^2 to an incomplete beta integral; the complete
// beta factor cancels b_n exactly, leaving
//     P_n(r) = (1/2) I_x((n-2)/2, 1/2),   x = r^2 (1 - r^2/4),
// valid for 0 <= r <= sqrt(2).  Larger radii follow from the complement
// of the antipodal cap, P_n(r) = 1 - P_n(sqrt(4-r^2)).
inline double pn(double r, int n) {
    if (n < 4) throw std::invalid_argument("pn: n must be >= 4");
    if (r < 0.0 || std::isnan(r)) throw std::invalid_argument("pn: radius must be nonnegative");
    if (r == 0.0) return 0.0;
    if (r >= 2.0) return 1.0;
    const double r2 = r * r;
    // The beta argument r^2 (1 - r^2/4) lies in [0, 1] for r^2 <= 2 up to
    // rounding; clamp the last-ulp overshoot before the domain-checked call.
    if (r2 <= 2.0)
        return 0.5 * reg_inc_beta((n - 2) / 2.0, 0.5, std::min(r2 * (1.0 - 0.25 * r2), 1.0));
    const double s2 = 4.0 - r2; // complementary cap radius squared, in [0, 2)
    return 1.0 - 0.5 * reg_inc_beta((n - 2) / 2.0, 0.5, std::min(s2 * (1.0 - 0.25 * s2), 1.0));
}

// Sandwich bounds a_n r^{n-2} (1 - r^2/4)^{(n-4)/2} <= P_n(r) <= a_n r^{n-2}.
// The lower factor is evaluated with r^2 capped at 4 (beyond the sphere
// diameter the cap is everything) and clamped to 1 so the guarantee
// lower <= P_n <= upper survives the degenerate n = 4, r > 2 corner.
inline std::pair<double, double> pn_bounds(double r, int n) {
    if (n < 4) throw std::invalid_argument("pn_bounds: n must be >= 4");
    if (r < 0.0 || std::isnan(r)) throw std::invalid_argument("pn_bounds: radius must be nonnegative");
    const CapConstants c = cap_constants(n);
    const double power = c.a_n * std::pow(r, n - 2);
    const double shrink = std::pow(1.0 - std::min(r * r, 4.0) / 4.0, (n - 4) / 2.0);
    return {std::min(power * shrink, 1.0), power};
}

// dist(v, w) = min{ ||v-w||, ||v+w|| }: the metric of the projective
// identification v ~ -v.
inline double pseudo_dist(const Vector& v, const Vector& w) {
    if (v.size() != w.size()) throw std::invalid_argument("pseudo_dist: dimension mismatch");
    return std::min((v - w).norm(), (v + w).norm());
}

// Uniform draw on the unit sphere of R^dim (normalized Gaussian vector).
inline Vector sample_sphere(int dim, CounterRng& rng) {
    if (dim < 1) throw std::invalid_argument("sample_sphere: dim must be >= 1");
    Vector v(dim);
    for (;;) {
        for (int i = 0; i < dim; ++i) v[i] = rng.next_normal();
        const double norm = v.norm();
        if (norm > 1e-100) return v / norm;
    }
}

// Uniform draw in the closed unit ball of R^dim.
inline Vector sample_ball(int dim, CounterRng& rng) {
    Vector v = sample_sphere(dim, rng);
    return v * std::pow(rng.next_double_pos(), 1.0 / dim);
}

// Uniform sampler on the spherical cap SC(r, e1) of S^{n-2} in R^{n-1}.
//
// With s = ||x - e1|| in [0, r] and t = s/r, the radial density is
// proportional to t^{n-3} (1 - r^2 t^2 / 4)^{(n-4)/2} on [0, 1]; the
// angular part is uniform on the subsphere orthogonal to e1.  Rejection
// from the t^{n-3} power-law proposal accepts with probability
// (1 - r^2 t^2/4)^{(n-4)/2}; when the average acceptance drops below 1%
// (large n together with r near 2) the sampler switches to a tabulated
// inverse CDF of the radial law.
class CapSampler {
public:
    CapSampler(int n, double r) : n_(n), r_(r) {
        if (n < 4) throw std::invalid_argument("CapSampler: n must be >= 4");
        if (!(r > 0.0) || r > 2.0) throw std::invalid_argument("CapSampler: radius must be in (0, 2]");
        if (mean_acceptance() < 0.01) build_table();
    }

    Vector draw(CounterRng& rng) const {
        const double t = table_.empty() ? draw_radial_rejection(rng) : draw_radial_table(rng);
        const double s = r_ * t;
        // Point at geodesic offset s from e1: first coordinate 1 - s^2/2,
        // remaining mass on a uniform direction orthogonal to e1.
        Vector x(n_ - 1);
        x[0] = 1.0 - 0.5 * s * s;
        Vector w = sample_sphere(n_ - 2, rng);
        const double scale = s * std::sqrt(1.0 - 0.25 * s * s);
        for (int i = 0; i < n_ - 2; ++i) x[i + 1] = scale * w[i];
        return x;
    }

    bool uses_table() const { return !table_.empty(); }

private:
    double density_shape(double t) const {
        return std::pow(t, n_ - 3) * std::pow(1.0 - 0.25 * r_ * r_ * t * t, (n_ - 4) / 2.0);
    }

    // Average acceptance of the rejection scheme:
    // (n-2) * int_0^1 t^{n-3} (1 - r^2 t^2/4)^{(n-4)/2} dt, by Simpson.
    double mean_acceptance() const {
        const int m = 256;
        double sum = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double t = static_cast<double>(i) / m;
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += w * density_shape(t);
        }
        return (n_ - 2) * sum / (3.0 * m);
    }

    double draw_radial_rejection(CounterRng& rng) const {
        const double half_exp = (n_ - 4) / 2.0;
        const double quarter_r2 = 0.25 * r_ * r_;
        for (;;) {
            const double t = std::pow(rng.next_double_pos(), 1.0 / (n_ - 2));
            const double accept = std::pow(1.0 - quarter_r2 * t * t, half_exp);
            if (rng.next_double() < accept) return t;
        }
    }

    void build_table() {
        // Cumulative radial mass on a uniform grid; inner integrals by
        // Simpson on each cell (density is smooth on [0, 1]).
        const int cells = 4096;
        table_.resize(cells + 1);
        table_[0] = 0.0;
        for (int i = 0; i < cells; ++i) {
            const double a = static_cast<double>(i) / cells;
            const double b = static_cast<double>(i + 1) / cells;
            const double mid = 0.5 * (a + b);
            const double cell = (b - a) / 6.0
                * (density_shape(a) + 4.0 * density_shape(mid) + density_shape(b));
            table_[i + 1] = table_[i] + cell;
        }
        const double total = table_.back();
        if (!(total > 0.0)) throw std::runtime_error("CapSampler: degenerate radial mass");
        for (double& v : table_) v /= total;
    }

    double draw_radial_table(CounterRng& rng) const {
        const double u = rng.next_double();
        const auto it = std::upper_bound(table_.begin(), table_.end(), u);
        const std::size_t hi = std::min<std::size_t>(
            std::max<std::size_t>(it - table_.begin(), 1), table_.size() - 1);
        const double c0 = table_[hi - 1], c1 = table_[hi];
        const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
        return (static_cast<double>(hi - 1) + frac) / (table_.size() - 1);
    }

    int n_;
    double r_;
    std::vector<double> table_;
};

inline Vector sample_cap(int n, double r, CounterRng& rng) {
    return CapSampler(n, r).draw(rng);
}

// Cap radius equivalent to a correlation threshold: |corr| >= rho on the
// sphere is the pseudo-ball of radius sqrt(2(1-rho)).
inline double rho_to_radius(double rho) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("rho_to_radius: rho must be in [0, 1]");
    return std::sqrt(2.0 * (1.0 - rho));
}

} // namespace corrmine

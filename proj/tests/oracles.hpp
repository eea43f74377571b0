#pragma once
// Independent numeric oracles used by the test suites.  These deliberately
// avoid the library's own evaluation routes: integrals are done by adaptive
// Simpson refinement, so closed-form implementations are checked against
// direct quadrature.

#include <cmath>
#include <functional>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 48);
}

// Two-stage quadrature with relative accuracy: a coarse pass sizes the
// integral, a second pass refines to rel * |coarse|. Tiny integrals would
// otherwise drown in an absolute tolerance.
inline double adaptive_simpson_rel(const std::function<double(double)>& f, double a, double b,
                                   double rel = 1e-13) {
    const double coarse = adaptive_simpson(f, a, b, 1e-13);
    const double tol = std::max(std::abs(coarse) * rel, 1e-300);
    return adaptive_simpson(f, a, b, tol);
}

// Regularized incomplete beta by quadrature after the substitution t = u^2,
// which removes the endpoint singularity at 0 for a >= 1/2.
inline double reg_inc_beta_quad(double a, double b, double x) {
    const double log_complete = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    auto g = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double t = u * u;
        if (t >= 1.0) return 0.0;
        return 2.0 * std::pow(u, 2.0 * a - 1.0) * std::pow(1.0 - t, b - 1.0);
    };
    return adaptive_simpson_rel(g, 0.0, std::sqrt(x), 1e-13) / std::exp(log_complete);
}

// Normalized spherical-cap area by quadrature of the defining integral
// (b_n/2) int_{1-r^2/2}^{1} (1-u^2)^{(n-4)/2} du for r in [0, sqrt(2)].
inline double pn_quad(double r, int n) {
    if (r <= 0.0) return 0.0;
    double flip = 0.0, rr = r;
    if (r * r > 2.0) { // complement of the antipodal cap
        rr = std::sqrt(4.0 - r * r);
        flip = 1.0;
    }
    const double log_bn = std::log(2.0) + std::lgamma((n - 1) / 2.0)
                        - std::lgamma((n - 2) / 2.0) - 0.5 * std::log(std::acos(-1.0));
    auto g = [&](double u) { return std::pow(1.0 - u * u, (n - 4) / 2.0); };
    const double val = 0.5 * std::exp(log_bn)
        * adaptive_simpson(g, 1.0 - 0.5 * rr * rr, 1.0, 1e-15);
    return flip == 0.0 ? val : 1.0 - val;
}

} // namespace oracles

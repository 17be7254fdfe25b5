#include "nekpart/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nekpart {

cplx poly_eval(std::span<const cplx> coeffs, cplx z) {
    cplx acc = 0.0;
    for (const auto& c : coeffs) acc = acc * z + c;
    return acc;
}

double poly_eval(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * x + c;
    return acc;
}

std::vector<double> poly_derivative(std::span<const double> coeffs) {
    const auto n = static_cast<int>(coeffs.size()) - 1;
    if (n <= 0) return {0.0};
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = coeffs[static_cast<std::size_t>(i)] * (n - i);
    return d;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs) {
    std::size_t first = 0;
    while (first < coeffs.size() && coeffs[first] == cplx{0.0}) ++first;
    const auto c = coeffs.subspan(first);
    if (c.size() <= 1) return {};
    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -c[static_cast<std::size_t>(j + 1)] / c[0];
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    std::vector<cplx> deriv(c.size() - 1);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) deriv[i] = c[i] * static_cast<double>(c.size() - 1 - i);
    for (auto& r : roots) {
        for (int it = 0; it < 4; ++it) {
            const cplx p = poly_eval(c, r);
            const cplx dp = poly_eval(std::span<const cplx>(deriv), r);
            if (std::abs(dp) == 0.0) break;
            const cplx step = p / dp;
            // Newton only refines; a large step means a clustered root, keep the eigenvalue.
            if (std::abs(step) > 1e-6 * (1.0 + std::abs(r))) break;
            r -= step;
        }
    }
    return roots;
}

std::vector<cplx> polynomial_roots(std::span<const double> coeffs) {
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    return polynomial_roots(std::span<const cplx>(c));
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rule;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const auto rule = gauss_legendre(n);
    const double m = 0.5 * (a + b), h = 0.5 * (b - a);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = rule.weights[i] * f(m + h * rule.nodes[i]);
    return h * pairwise_sum(terms);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, static_cast<unsigned>(max_depth), tol, &err);
    if (!std::isfinite(v)) throw ConvergenceError("integrate_adaptive: non-finite result", err);
    return v;
}

double pairwise_sum(std::span<const double> terms) {
    if (terms.size() <= 8) {
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    }
    const auto half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

cplx log_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() > 0.0) return {std::lgamma(z.real()), 0.0};
    if (z.imag() == 0.0 && z.real() == std::floor(z.real()))
        throw std::domain_error("log_gamma: pole at non-positive integer");
    // Shift into the Stirling region, accumulating log(z (z+1) ... ).
    cplx shift = 0.0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    static constexpr double b2k[] = {1.0 / 6.0,     -1.0 / 30.0,  1.0 / 42.0,     -1.0 / 30.0,
                                     5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0,   -3617.0 / 510.0};
    cplx series = 0.0;
    const cplx zinv = 1.0 / z, zinv2 = zinv * zinv;
    cplx zpow = zinv;
    for (int k = 1; k <= 8; ++k) {
        series += b2k[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * zpow;
        zpow *= zinv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

std::vector<double> bernoulli_generating_coeffs(int n_terms) {
    // (1 - e^{-x})/x = sum_k (-1)^k x^k / (k+1)!; invert the series.
    std::vector<double> d(static_cast<std::size_t>(n_terms));
    double fact = 1.0;
    for (int k = 0; k < n_terms; ++k) {
        fact *= (k + 1);
        d[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) / fact;
    }
    std::vector<double> e(static_cast<std::size_t>(n_terms), 0.0);
    e[0] = 1.0;
    for (int n = 1; n < n_terms; ++n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) s += d[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(n - k)];
        e[static_cast<std::size_t>(n)] = -s;
    }
    return e;
}

cplx wrap_log(cplx v) {
    double im = std::remainder(v.imag(), 2.0 * kPi);
    if (im <= -kPi) im += 2.0 * kPi;
    return {v.real(), im};
}

}  // namespace nekpart

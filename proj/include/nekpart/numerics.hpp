#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nekpart {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
/// zeta'(-1)
inline constexpr double kZetaPrimeMinus1 = -0.16542114370045092921391966024278064;

/// Raised when an iterative or quadrature routine fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Polynomials are stored highest degree first: c[0] z^n + ... + c[n].
cplx poly_eval(std::span<const cplx> coeffs, cplx z);
double poly_eval(std::span<const double> coeffs, double x);
std::vector<double> poly_derivative(std::span<const double> coeffs);

/// All complex roots, companion-matrix eigenvalues followed by Newton polishing.
std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs);
std::vector<cplx> polynomial_roots(std::span<const double> coeffs);

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

/// Adaptive Gauss-Kronrod on a finite or semi-infinite interval (b may be +inf).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-13, int max_depth = 18);

/// Deterministic pairwise reduction; the result does not depend on how the
/// terms were produced, only on their order.
double pairwise_sum(std::span<const double> terms);

/// Principal-branch-agnostic log Gamma for complex arguments. The imaginary
/// part is only meaningful modulo 2 pi.
cplx log_gamma(cplx z);

/// Log of x/(1 - e^{-x}) Taylor coefficients: returns c_n with x/(1-e^{-x}) = sum c_n x^n.
std::vector<double> bernoulli_generating_coeffs(int n_terms);

/// Wraps the imaginary part of a complex log into (-pi, pi].
cplx wrap_log(cplx v);

}  // namespace nekpart

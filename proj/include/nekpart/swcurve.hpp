#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nekpart/numerics.hpp"

namespace nekpart {

/// The curve Lambda^r (w + 1/w) = P(z) is not maximal.
class NotMaximal : public std::runtime_error {
public:
    NotMaximal(const std::string& what, std::vector<cplx> roots)
        : std::runtime_error(what), roots_(std::move(roots)) {}
    const std::vector<cplx>& roots() const noexcept { return roots_; }

private:
    std::vector<cplx> roots_;
};

/// Monic P(z) = z^r + 0 z^{r-1} + c_{r-2} z^{r-2} + ... + c_0, highest degree first.
struct SWCurve {
    std::vector<double> coeffs;
    double lambda_scale = 1.0;

    int r() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    /// Throws std::invalid_argument unless monic with zero subleading coefficient.
    void validate() const;
    /// Builds the curve from the r-1 free coefficients c_{r-2}, ..., c_0.
    static SWCurve from_free(const std::vector<double>& free, double lambda_scale);
    std::vector<double> free_coeffs() const;
};

struct BandGapStructure {
    /// 2r sorted roots of P = +-2 Lambda^r; band i is [e_{2i}, e_{2i+1}] (0-based).
    std::vector<double> endpoints;
    bool maximal = false;

    int r() const noexcept { return static_cast<int>(endpoints.size()) / 2; }
    std::pair<double, double> band(int i) const;
    /// Gap i lies between band i and band i+1.
    std::pair<double, double> gap(int i) const;
};

/// Throws NotMaximal when some root is non-real or repeated.
BandGapStructure band_gap(const SWCurve& C, double tol = 1e-9);

/// Root of Lambda^r (w + 1/w) = P(z) with |w| <= 1; boundary values from above on the bands.
cplx w_branch(cplx z, const SWCurve& C);

/// Quadrature report shared by the period routines.
struct QuadratureReport {
    int nodes = 0;
    double change = 0.0;
};

std::vector<double> periods_a(const SWCurve& C, double tol = 1e-13, QuadratureReport* report = nullptr);
/// a_dual_i - a_dual_{i+1} for the r-1 gaps.
std::vector<double> dual_gap_differences(const SWCurve& C, double tol = 1e-13, QuadratureReport* report = nullptr);
/// a_dual normalised to zero sum.
std::vector<double> periods_a_dual(const SWCurve& C, double tol = 1e-13);
std::vector<double> a_dual_from_differences(const std::vector<double>& diffs);

struct FitOptions {
    double tol = 1e-11;
    int max_iter = 60;
    double fd_step = 1e-6;
};

/// Newton in the free coefficients; throws ConvergenceError carrying the best residual.
SWCurve fit_curve_from_a(const std::vector<double>& a_target, double lambda_scale, const FitOptions& opt = {});
SWCurve fit_curve_from_xi(const std::vector<double>& xi, double lambda_scale, const FitOptions& opt = {});

/// Large-|a| asymptotic prepotential with the one-instanton correction.
double prepotential_asymptotic(const std::vector<double>& a, double lambda_scale);

struct PrepotentialReference {
    std::vector<double> a;
    double value = 0.0;
};

/// Reference on the ray through a, far enough out that the asymptotic form is accurate.
PrepotentialReference default_reference(const std::vector<double>& a, double lambda_scale);

/// F(a) from the reference by integrating dF = -sum a_dual_i da_i along the straight segment.
double prepotential(const std::vector<double>& a_target, double lambda_scale, const PrepotentialReference& ref,
                    int nodes = 24);

struct HessianReport {
    /// Reduced Hessian in (a_1, ..., a_{r-1}) with a_r = -sum.
    Eigen::MatrixXd hessian;
    double asymmetry = 0.0;
    Eigen::VectorXd eigenvalues;
};

HessianReport prepotential_hessian(const std::vector<double>& a_target, double lambda_scale, double step = 1e-5);
/// Same, at a known curve (skips the fit).
HessianReport prepotential_hessian(const SWCurve& C, double step = 1e-5);

}  // namespace nekpart

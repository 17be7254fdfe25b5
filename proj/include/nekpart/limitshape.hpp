#pragma once

#include <vector>

#include "nekpart/partitions.hpp"
#include "nekpart/profile.hpp"
#include "nekpart/swcurve.hpp"

namespace nekpart {

/// Phi(z) = 1 + (2 / (pi i r)) ln w(z) for Im z >= 0 (boundary values from above on the real line).
cplx conformal_phi(cplx z, const SWCurve& C);

/// The minimiser psi_star attached to a maximal curve, evaluated from Re Phi.
class LimitShape {
public:
    explicit LimitShape(SWCurve C, int nodes = 96);

    const SWCurve& curve() const noexcept { return curve_; }
    const BandGapStructure& bands() const noexcept { return bg_; }
    int r() const noexcept { return curve_.r(); }

    double psi(double x) const;
    double psi_prime(double x) const;
    /// Density of psi'' (zero off the bands).
    double psi_second(double x) const;
    /// Slope of facet i (gap i, plus the outer rays i = 0 and i = r) is -1 + 2i/r.
    static double facet_slope(int i, int r) { return -1.0 + 2.0 * i / r; }
    /// psi at the band endpoints, in the order of BandGapStructure::endpoints.
    const std::vector<double>& endpoint_values() const noexcept { return endpoint_psi_; }

    /// PL interpolant on a uniform grid of the given spacing covering all bands.
    ProfileFunction to_profile(double spacing) const;

private:
    // Integral of Re Phi over [band_lo, x] inside band i.
    double band_partial(int i, double x) const;

    SWCurve curve_;
    BandGapStructure bg_;
    int nodes_;
    std::vector<double> endpoint_psi_;
};

/// psi_star sampled on a grid of the given spacing.
ProfileFunction psi_star(const SWCurve& C, double spacing);

struct FacetReport {
    /// I_0, ..., I_r; I_0 and I_r belong to the rays -x and x.
    std::vector<double> intercepts;
    std::vector<double> a;
};

/// Throws std::runtime_error when a facet is shorter than min_length.
FacetReport facet_intercepts(const LimitShape& shape, double min_length = 1e-9);

/// Convex piecewise-linear sigma on [-1, 1] with sigma(-1) = 0 and slopes sorted(xi).
class SurfaceTension {
public:
    explicit SurfaceTension(const PeriodicPotential& V);
    int r() const noexcept { return static_cast<int>(sorted_.size()); }
    const std::vector<double>& sorted_xi() const noexcept { return sorted_; }
    /// Throws std::domain_error outside [-1, 1].
    double operator()(double slope) const;
    /// Breakpoints -1 + 2i/r, i = 0..r.
    std::vector<double> breakpoints() const;

private:
    std::vector<double> sorted_;
    std::vector<double> values_;
};

/// (1/2) * integral of sigma(psi') over the line.
double action_surf(const ProfileFunction& psi, const SurfaceTension& S);
double action_surf(const LimitShape& shape, const SurfaceTension& S);

/// Plancherel action; for PL profiles psi''/2 is atomic and the double integral is a finite sum.
double action_plancherel(const ProfileFunction& psi, double lambda_scale);
double action_plancherel(const LimitShape& shape, int nodes = 200);

/// xi from the gap integrals of Im Phi, normalised to mean zero.
PeriodicPotential xi_from_gaps(const SWCurve& C);

struct VariationalReport {
    double c0 = 0.0;
    double band_residual = 0.0;
    /// Largest violation of xi_i <= value <= xi_{i+1} on the gaps.
    double gap_violation = 0.0;
    bool gap_monotone = true;
    double action_value = 0.0;
    double tolerance = 1e-5;
    bool ok() const { return band_residual <= tolerance && gap_violation <= tolerance && gap_monotone; }
};

/// (L * psi'')(x) with L(u) = u ln(|u|/Lambda) - u, psi'' taken from the limit shape.
double kernel_convolution(const LimitShape& shape, double x, int nodes = 200);

VariationalReport slackness_check(const LimitShape& shape, const SurfaceTension& S, int samples_per_band = 9,
                                  double tolerance = 1e-5);

struct LegendreReport {
    double action_route = 0.0;
    double prepotential_route = 0.0;
    double gap = 0.0;
    /// -(d/dxi_i - d/dxi_{i+1}) F_dual against (a_i - a_{i+1})/r.
    std::vector<double> gradient_fd;
    std::vector<double> gradient_expected;
    double gradient_rel_error = 0.0;
    std::vector<double> a;
};

/// F_dual(xi) by the action at the minimiser, and by min_a F(a)/r^2 - (xi, a)/r over a local grid.
LegendreReport legendre_check(const std::vector<double>& xi, double lambda_scale, double grid_step = 0.02,
                              double fd_step = 1e-3);

/// F_dual(xi) through the action at the minimiser.
double dual_free_energy(const std::vector<double>& xi, double lambda_scale);

}  // namespace nekpart

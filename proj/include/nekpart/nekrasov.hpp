#pragma once

#include <complex>
#include <vector>

#include "nekpart/barnes.hpp"
#include "nekpart/partitions.hpp"

namespace nekpart {

struct GaugeParams {
    double epsilon = 1.0;
    std::vector<double> a;
    double lambda_scale = 1.0;

    int r() const noexcept { return static_cast<int>(a.size()); }
    /// beta = -r ln(Lambda) / (4 pi^2).
    double beta() const;
    /// Throws std::invalid_argument on sum(a) != 0 or eps == 0, PoleError when
    /// a_i - a_j lies within margin * |eps| of eps * Z.
    void validate(double margin = 1e-9) const;
};

struct PartitionTuple {
    std::vector<Partition> parts;
    int total_size() const;
};

/// All r-tuples with total size n, in a fixed order.
std::vector<PartitionTuple> tuples_of_size(int r, int n);

/// One monomial coeff * u_k u_l^{-1} q^m of the tangent character; its weight is a_k - a_l + m eps.
struct CharacterTerm {
    int k;
    int l;
    int m;
    long coeff;
};

/// Tangent character at the fixed point, after symbolic cancellation (nonzero terms only).
std::vector<CharacterTerm> tangent_character(const PartitionTuple& F);

/// det of the torus action on the tangent space; strictly positive.
double tangent_weight(const PartitionTuple& F, const GaugeParams& g);
Rational tangent_weight_exact(const PartitionTuple& F, const Rational& eps, const std::vector<Rational>& a);

/// Sum over tuples of size n of 1/tangent_weight.
double instanton_coefficient(int n, const GaugeParams& g, int threads = 1);
Rational instanton_coefficient_exact(int n, const Rational& eps, const std::vector<Rational>& a);

struct ZInstResult {
    double value = 1.0;
    std::vector<double> coefficients;
    /// |Lambda^{2 r n_max} c_{n_max}|.
    double last_term = 0.0;
};

ZInstResult z_inst(const GaugeParams& g, int n_max, int threads = 1);

/// log Z_pert, complex; exp of it is homogeneous of degree 0 in (a, eps, Lambda) and even in eps.
cplx log_z_pert(const GaugeParams& g);

struct ZFullResult {
    cplx log_z;
    cplx log_z_pert;
    ZInstResult inst;
};

ZFullResult z_full(const GaugeParams& g, int n_max, int threads = 1);

struct Extrapolation {
    double value = 0.0;
    double error = 0.0;
    /// Raw sequence fed to the extrapolation.
    std::vector<double> raw;
    /// Successive-difference magnitudes decrease.
    bool monotone = true;
};

/// Richardson extrapolation of f(h) = F + sum_j c_j h^{p_j} to h = 0 using the given exponents
/// (one fewer exponent than points is exact, extra points feed the error estimate).
Extrapolation richardson(const std::vector<double>& h, const std::vector<double>& f,
                         const std::vector<double>& exponents);

/// -eps^2 Re ln Z(eps; a; Lambda) at each eps, extrapolated to eps -> 0.
Extrapolation free_energy_estimate(const std::vector<double>& a, double lambda_scale,
                                   const std::vector<double>& eps_sequence,
                                   const std::vector<int>& n_max_sequence,
                                   const std::vector<double>& exponents = {1.0, 2.0}, int threads = 1);

/// (d/da_i - d/da_{i+1}) of the extrapolated free energy by central differences of step h.
Extrapolation free_energy_gradient(const std::vector<double>& a, double lambda_scale, int i,
                                   const std::vector<double>& eps_sequence,
                                   const std::vector<int>& n_max_sequence, double h = 1e-3,
                                   const std::vector<double>& exponents = {1.0, 2.0}, int threads = 1);

struct DualZResult {
    cplx value;
    /// Magnitude of the outermost shell (partition size or lattice radius) included.
    double tail = 0.0;
    int skipped = 0;
};

DualZResult dual_z_partitions(const PeriodicPotential& V, double eps, double lambda_scale, int size_max);
DualZResult dual_z_lattice(const PeriodicPotential& V, double eps, double lambda_scale, int lattice_radius,
                           int n_max, int threads = 1);

}  // namespace nekpart

#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nekpart {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Weakly decreasing sequence of positive parts; trailing zeros are never stored.
class Partition {
public:
    Partition() = default;
    /// Throws std::invalid_argument unless parts are weakly decreasing; zeros are stripped.
    explicit Partition(std::vector<int> parts);

    const std::vector<int>& parts() const noexcept { return parts_; }
    int size() const noexcept { return size_; }
    int length() const noexcept { return static_cast<int>(parts_.size()); }
    bool empty() const noexcept { return parts_.empty(); }
    /// lambda_i with 0-based i; zero beyond the last part.
    int operator[](int i) const noexcept {
        return (i >= 0 && i < length()) ? parts_[static_cast<std::size_t>(i)] : 0;
    }
    Partition conjugate() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts_ <=> b.parts_; }

private:
    std::vector<int> parts_;
    int size_ = 0;
};

/// All partitions of n, in reverse lexicographic order (n), (n-1,1), ...
std::vector<Partition> partitions_of(int n);

/// Particle positions lambda_i - i + 1/2 for i = 1..depth, stored doubled (odd integers).
struct FermionConfig {
    std::vector<std::int64_t> points2;
    /// Below this index the configuration is the vacuum tail -(2j-1) for j > cutoff.
    int cutoff = 0;
};

struct RQuotients {
    int r = 1;
    std::vector<Partition> quotients;
    std::vector<Rational> shifts;
};

/// xi_i = xi(1/2 - i), i = 1..r. Mean zero.
class PeriodicPotential {
public:
    explicit PeriodicPotential(std::vector<double> xi, double tol = 1e-12);
    int r() const noexcept { return static_cast<int>(xi_.size()); }
    const std::vector<double>& xi() const noexcept { return xi_; }
    /// xi at a half-integer position given doubled.
    double at2(std::int64_t x2) const;

private:
    std::vector<double> xi_;
};

BigInt dim_partition(const Partition& lambda);
Rational plancherel_mass(const Partition& lambda);
/// Product of hook lengths.
BigInt hook_product(const Partition& lambda);

/// Throws std::invalid_argument when depth < lambda.length().
FermionConfig fermion_set(const Partition& lambda, int depth);

RQuotients r_quotients(const Partition& lambda, int r);
/// Throws std::invalid_argument when shifts violate the congruence or do not sum to zero.
Partition combine_quotients(const RQuotients& q);
/// |lambda| recomputed from quotients and shifts; equals lambda.size() exactly.
Rational size_from_quotients(const RQuotients& q);

/// (s, xi) with s from r_quotients(lambda, V.r()).
double potential_energy(const Partition& lambda, const PeriodicPotential& V);
/// Exact coefficients of xi_1..xi_r in the energy (they are the shifts).
std::vector<Rational> potential_coefficients(const Partition& lambda, int r);

/// G(eps) = sum_k e^{i a_k} sum_j e^{i eps (lambda^k_j - j + 1/2)}, tails summed in closed form.
/// depth <= 0 selects the shortest exact truncation.
std::complex<double> char_G(std::span<const Partition> tuple, std::complex<double> eps,
                            std::span<const std::complex<double>> a, int depth = 0);

}  // namespace nekpart

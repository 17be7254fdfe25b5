#pragma once

#include <stdexcept>
#include <string>

#include "nekpart/numerics.hpp"

namespace nekpart {

/// w lies on the lattice -m c1 - n c2 where Gamma_2 has a pole or zero.
class PoleError : public std::runtime_error {
public:
    PoleError(const std::string& what, int i = -1, int j = -1)
        : std::runtime_error(what), i_(i), j_(j) {}
    int i() const noexcept { return i_; }
    int j() const noexcept { return j_; }

private:
    int i_, j_;
};

struct BarnesParams {
    cplx w;
    double c1;
    double c2;
};

/// log Gamma_1(w | c) = log( Gamma(w/c) c^{w/c - 1/2} / sqrt(2 pi) ), continued to c < 0
/// by Gamma_1(w | c) = 1 / Gamma_1(w + |c| | |c|).
cplx log_gamma1(cplx w, double c);

/// log Gamma_2(w | c1, c2) = zeta_2'(0; w). Imaginary part is defined modulo 2 pi.
/// Throws PoleError on the pole lattice, std::invalid_argument if c1 or c2 is zero.
cplx log_gamma2(const BarnesParams& p, double tol = 1e-12);

/// log Gamma_2(x | 1, -1) for real x; the building block of Z_pert.
cplx log_gamma2_unit(double x, double tol = 1e-12);

}  // namespace nekpart

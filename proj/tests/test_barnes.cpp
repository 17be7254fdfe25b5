#include <doctest.h>

#include <cmath>

#include "nekpart/barnes.hpp"

using namespace nekpart;

namespace {

// Frozen with mpmath (40 digits) from zeta_2(s, w | 1, 1) = zeta(s - 1, w) + (1 - w) zeta(s, w)
// and zeta_2(s, w | 1, 2) = 2^{-s} sum over b in {w/2, (w+1)/2} of the same expression at b.
struct Frozen {
    cplx w;
    double c2;
    cplx value;
};

const Frozen kFrozen[] = {
    {0.3, 1.0, 0.21961751337948799432},
    {0.3, 2.0, 0.44294562159683440702},
    {1.7, 1.0, 0.43155848008621593761},
    {1.7, 2.0, -0.06909171172217915408},
    {4.25, 1.0, 1.7957106611316193165},
    {4.25, 2.0, 1.0304480739336007871},
    {{0.5, 0.8}, 1.0, {-1.1647406934361510257, -0.019797079921485365951}},
    {{0.5, 0.8}, 2.0, {-0.84840730668604924401, -0.41611122009562046142}},
    {{2.5, -1.5}, 1.0, {1.829862902276287952, -1.7474436939230285669}},
    {{2.5, -1.5}, 2.0, {0.51302892709581671484, -1.0883532043744408601}},
};

double mod_2pi_distance(cplx a, cplx b) {
    const double re = std::abs(a.real() - b.real());
    double im = std::remainder(a.imag() - b.imag(), 2.0 * kPi);
    return std::max(re, std::abs(im));
}

// zeta_2(0, w | c1, c2).
double zeta2_at_zero(double w, double c1, double c2) {
    return 0.5 * (w * w - (c1 + c2) * w + (c1 * c1 + c2 * c2 + 3.0 * c1 * c2) / 6.0) / (c1 * c2);
}

}  // namespace

TEST_CASE("log Gamma_2 against Hurwitz zeta values") {
    for (const auto& f : kFrozen) {
        CAPTURE(f.w);
        CAPTURE(f.c2);
        CHECK(mod_2pi_distance(log_gamma2({f.w, 1.0, f.c2}), f.value) < 1e-12);
    }
}

TEST_CASE("Gamma_2(0 | 1, -1) = exp(-zeta'(-1))") {
    CHECK(std::abs(log_gamma2_unit(0.0) - cplx(-kZetaPrimeMinus1, 0.0)) < 1e-12);
}

TEST_CASE("difference equation") {
    const double c1 = 1.0, c2 = 0.7;
    for (cplx w : {cplx(1.3), cplx(0.4), cplx(2.2, 0.6)}) {
        const cplx lhs = log_gamma2({w, c1, c2}) - log_gamma2({w + c1, c1, c2});
        CHECK(mod_2pi_distance(lhs, log_gamma1(w, c2)) < 1e-10);
        const cplx lhs2 = log_gamma2({w, c1, c2}) - log_gamma2({w + c2, c1, c2});
        CHECK(mod_2pi_distance(lhs2, log_gamma1(w, c1)) < 1e-10);
    }
}

TEST_CASE("scaling relation") {
    const double M = 2.5, w = 0.8, c = 1.0;
    const cplx lhs = log_gamma2({M * w, M * c, M * c});
    const cplx rhs = log_gamma2({w, c, c}) - std::log(M) * zeta2_at_zero(w, c, c);
    CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("symmetry in the quasi-periods") {
    const cplx a = log_gamma2({cplx(1.1, 0.3), 0.6, 1.4});
    const cplx b = log_gamma2({cplx(1.1, 0.3), 1.4, 0.6});
    CHECK(mod_2pi_distance(a, b) < 1e-12);
}

TEST_CASE("Gamma_1 reduces to the Euler Gamma function") {
    for (double x : {0.3, 1.0, 2.5, 7.0}) {
        CHECK(log_gamma1(x, 1.0).real() == doctest::Approx(std::lgamma(x) - 0.5 * std::log(2.0 * kPi)).epsilon(1e-14));
    }
}

TEST_CASE("poles and invalid periods") {
    CHECK_THROWS_AS(log_gamma2({cplx(0.0), 1.0, 1.0}), PoleError);
    CHECK_THROWS_AS(log_gamma2({cplx(-2.0), 1.0, 1.0}), PoleError);
    CHECK_THROWS_AS(log_gamma2({cplx(1.0), 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(log_gamma1(cplx(1.0), 0.0), std::invalid_argument);
}

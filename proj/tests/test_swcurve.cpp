#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nekpart/swcurve.hpp"

using namespace nekpart;

namespace {

const SWCurve kThreeBand{{1.0, 0.0, -3.5, 0.0}, 1.0};

// Real roots of z^3 + p z + q by the trigonometric formula.
std::vector<double> cubic_roots(double p, double q) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double phi = std::acos(3.0 * q / (p * m)) / 3.0;
    std::vector<double> z;
    for (int k = 0; k < 3; ++k) z.push_back(m * std::cos(phi - 2.0 * kPi * k / 3.0));
    return z;
}

// 2 * integral of |ln|w|| over [lo, hi] with x = mid + half cos t and the trapezoid rule in t.
double oval_area(const SWCurve& C, double lo, double hi, int n) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int k = 1; k < n; ++k) {
        const double t = kPi * k / n;
        const double x = mid + half * std::cos(t);
        s += std::abs(std::log(std::abs(w_branch(cplx(x, 0.0), C)))) * half * std::sin(t);
    }
    return 2.0 * s * kPi / n;
}

}  // namespace

TEST_CASE("band structure") {
    const auto one = band_gap({{1.0, 0.0}, 1.0});
    REQUIRE(one.endpoints.size() == 2);
    CHECK(one.endpoints[0] == doctest::Approx(-2.0));
    CHECK(one.endpoints[1] == doctest::Approx(2.0));

    const auto bg = band_gap(kThreeBand);
    CHECK(bg.maximal);
    REQUIRE(bg.endpoints.size() == 6);
    auto expected = cubic_roots(-3.5, -2.0);
    for (double z : cubic_roots(-3.5, 2.0)) expected.push_back(z);
    std::sort(expected.begin(), expected.end());
    for (std::size_t k = 0; k < 6; ++k) CHECK(bg.endpoints[k] == doctest::Approx(expected[k]).epsilon(1e-12));
    for (int i = 0; i + 1 < 3; ++i) CHECK(bg.band(i).second < bg.band(i + 1).first);

    CHECK_THROWS_AS(band_gap({{1.0, 0.0, 0.0}, 1.0}), NotMaximal);
    CHECK_THROWS_AS(SWCurve({{1.0, 0.5, 0.0}, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("branch of w") {
    const SWCurve line{{1.0, 0.0}, 1.0};
    CHECK(std::abs(w_branch(2.5, line) - 0.5) < 1e-14);
    const auto bg = band_gap(kThreeBand);
    for (int i = 0; i < 3; ++i) {
        const auto [lo, hi] = bg.band(i);
        for (int k = 1; k < 10; ++k) CHECK(std::abs(std::abs(w_branch(lo + (hi - lo) * k / 10.0, kThreeBand)) - 1.0) < 1e-12);
    }
    for (int i = 0; i < 2; ++i) {
        const auto [lo, hi] = bg.gap(i);
        const cplx w = w_branch(0.5 * (lo + hi), kThreeBand);
        CHECK(std::abs(w.imag()) < 1e-12);
        CHECK(std::abs(w) < 1.0);
    }
    for (cplx z : {cplx(0.4, 0.9), cplx(-2.0, 0.3), cplx(3.0, 1e-3)})
        CHECK(std::abs(w_branch(std::conj(z), kThreeBand) - std::conj(w_branch(z, kThreeBand))) < 1e-12);
    const cplx big(1e3, 7.0);
    CHECK(std::abs(w_branch(big, kThreeBand) * (big * big * big - 3.5 * big) - 1.0) < 1e-6);
}

TEST_CASE("dS normalisation at infinity") {
    const cplx z(0.0, 1e3);
    const double h = 1e-2;
    const cplx dlog = (std::log(w_branch(z + h, kThreeBand)) - std::log(w_branch(z - h, kThreeBand))) / (2.0 * h);
    CHECK(std::abs(std::abs(z * dlog) - 3.0) < 1e-5);
}

TEST_CASE("A-periods") {
    CHECK(periods_a({{1.0, 0.0}, 1.0})[0] == doctest::Approx(0.0));
    const auto a = periods_a({{1.0, 0.0, -25.0}, 1.0});
    CHECK(a[0] == doctest::Approx(-5.0).epsilon(0.01));
    CHECK(a[1] == doctest::Approx(5.0).epsilon(0.01));
    QuadratureReport rep;
    const auto f = periods_a(kThreeBand, 1e-13, &rep);
    CHECK(rep.change < 1e-10);
    CHECK(std::abs(f[0] + f[1] + f[2]) < 1e-12);
    CHECK(f[0] < f[1]);
    CHECK(f[1] < f[2]);
}

TEST_CASE("dual periods are oval areas") {
    CHECK(periods_a_dual({{1.0, 0.0}, 1.0}).size() == 1);
    CHECK(dual_gap_differences({{1.0, 0.0}, 1.0}).empty());
    const auto bg = band_gap(kThreeBand);
    const auto d = dual_gap_differences(kThreeBand);
    REQUIRE(d.size() == 2);
    for (int i = 0; i < 2; ++i) {
        const auto [lo, hi] = bg.gap(i);
        CHECK(d[static_cast<std::size_t>(i)] == doctest::Approx(oval_area(kThreeBand, lo, hi, 4000)).epsilon(1e-8));
    }
    const auto ad = periods_a_dual(kThreeBand);
    CHECK(std::abs(ad[0] + ad[1] + ad[2]) < 1e-12);
    CHECK(ad[0] > ad[1]);
    CHECK(ad[1] > ad[2]);
    const auto back = a_dual_from_differences(d);
    for (std::size_t k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(ad[k]).epsilon(1e-14));
}

TEST_CASE("dual periods are monotone along a family") {
    double prev = 0.0;
    for (double u : {4.5, 6.0, 8.0, 11.0}) {
        const auto ad = periods_a_dual({{1.0, 0.0, -u}, 1.0});
        CHECK(ad[0] - ad[1] > prev);
        prev = ad[0] - ad[1];
    }
}

TEST_CASE("curve fitting") {
    const auto a = periods_a(kThreeBand);
    const auto C = fit_curve_from_a(a, 1.0);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(C.coeffs[k] - kThreeBand.coeffs[k]) < 1e-8);

    double prev = 0.0;
    for (double A : {1.5, 2.0, 3.0}) {
        const auto D = fit_curve_from_a({-A, A}, 1.0);
        CHECK(std::abs(D.coeffs[1]) < 1e-12);
        CHECK(-D.coeffs[2] > prev);
        prev = -D.coeffs[2];
    }

    const auto ad = periods_a_dual(kThreeBand);
    std::vector<double> xi;
    for (double v : ad) xi.push_back(-v / 3.0);
    const auto E = fit_curve_from_xi(xi, 1.0);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(E.coeffs[k] - kThreeBand.coeffs[k]) < 1e-7);
    CHECK_THROWS(fit_curve_from_xi({0.0, 0.0}, 1.0));
}

TEST_CASE("prepotential Hessian") {
    const auto H = prepotential_hessian(kThreeBand);
    CHECK(H.asymmetry <= 1e-6);
    CHECK(H.eigenvalues.minCoeff() > 0.0);
    const auto H2 = prepotential_hessian(std::vector<double>{-2.5, 2.5}, 1.0);
    CHECK(H2.eigenvalues.minCoeff() > 0.0);
}

TEST_CASE("prepotential path independence") {
    const std::vector<double> a{-2.0, 0.1, 1.9}, b{-1.9, -0.2, 2.1};
    const auto ref = default_reference(a, 1.0);
    const double Fa = prepotential(a, 1.0, ref);
    const double direct = prepotential(b, 1.0, ref);
    const double via = prepotential(b, 1.0, PrepotentialReference{a, Fa});
    CHECK(std::abs(direct - via) <= 1e-7);
}

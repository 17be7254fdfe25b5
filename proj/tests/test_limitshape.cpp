#include <doctest.h>

#include <cmath>

#include "nekpart/limitshape.hpp"
#include "nekpart/swcurve.hpp"

using namespace nekpart;

namespace {

const SWCurve kThreeBand{{1.0, 0.0, -3.5, 0.0}, 1.0};

double arcsine_profile(double x, double L) {
    if (std::abs(x) >= 2.0 * L) return std::abs(x);
    return 2.0 / kPi * (x * std::asin(x / (2.0 * L)) + std::sqrt(4.0 * L * L - x * x));
}

}  // namespace

TEST_CASE("r = 1 limit shape is the arcsine law") {
    for (double L : {1.0, 0.5}) {
        const LimitShape shape({{1.0, 0.0}, L});
        for (int k = 0; k <= 40; ++k) {
            const double x = -2.0 * L + 4.0 * L * k / 40.0;
            CHECK(std::abs(shape.psi(x) - arcsine_profile(x, L)) <= 1e-8);
        }
        CHECK(shape.psi(3.0 * L) == doctest::Approx(3.0 * L));
    }
}

TEST_CASE("facets and profile shape for the three-band curve") {
    const LimitShape shape(kThreeBand);
    const auto& bg = shape.bands();
    CHECK(shape.psi(bg.endpoints.back()) == doctest::Approx(bg.endpoints.back()).epsilon(1e-12));
    CHECK(shape.psi(bg.endpoints.front()) == doctest::Approx(-bg.endpoints.front()).epsilon(1e-12));
    for (int i = 0; i < 2; ++i) {
        const auto [lo, hi] = bg.gap(i);
        CHECK(shape.psi_prime(0.5 * (lo + hi)) == doctest::Approx(LimitShape::facet_slope(i + 1, 3)).epsilon(1e-12));
    }
    CHECK(shape.psi_prime(5.0) == doctest::Approx(1.0));
    CHECK(shape.psi_prime(-5.0) == doctest::Approx(-1.0));
    for (int i = 0; i < 3; ++i) {
        const auto [lo, hi] = bg.band(i);
        for (int k = 1; k < 8; ++k) CHECK(shape.psi_second(lo + (hi - lo) * k / 8.0) >= 0.0);
    }
    const auto f = facet_intercepts(shape);
    const auto a = periods_a(kThreeBand);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(f.a[i] - a[i]) <= 1e-5);
}

TEST_CASE("Re Phi gives the slope on bands") {
    const LimitShape shape(kThreeBand);
    const auto [lo, hi] = shape.bands().band(1);
    const double x = lo + 0.3 * (hi - lo);
    CHECK(conformal_phi(cplx(x, 0.0), kThreeBand).real() == doctest::Approx(shape.psi_prime(x)).epsilon(1e-10));
}

TEST_CASE("potential from the gaps") {
    const auto V = xi_from_gaps(kThreeBand);
    const auto ad = periods_a_dual(kThreeBand);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(V.xi()[i] + ad[i] / 3.0) <= 1e-6);
}

TEST_CASE("surface tension") {
    const SurfaceTension S(PeriodicPotential({0.4, -0.1, -0.3}));
    CHECK(S(-1.0) == 0.0);
    CHECK(S(1.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(S.breakpoints().size() == 4);
    const auto& xi = S.sorted_xi();
    CHECK(std::is_sorted(xi.begin(), xi.end()));
    for (int i = 0; i < 3; ++i) {
        const double a = -1.0 + 2.0 * i / 3.0, b = a + 2.0 / 3.0;
        CHECK((S(b) - S(a)) / (b - a) == doctest::Approx(xi[static_cast<std::size_t>(i)]));
    }
    CHECK_THROWS_AS(S(1.5), std::domain_error);
}

TEST_CASE("actions of the empty profile") {
    const ProfileFunction vac({-1.0, 0.0, 1.0}, {-1.0, 1.0});
    CHECK(action_plancherel(vac, 1.0) == doctest::Approx(0.0).scale(1.0));
    const SurfaceTension S(PeriodicPotential({0.5, -0.5}));
    CHECK(action_surf(vac, S) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("sampled and continuous Plancherel actions agree") {
    const LimitShape shape({{1.0, 0.0}, 1.0});
    const double exact = action_plancherel(shape);
    CHECK(exact == doctest::Approx(-1.0).epsilon(1e-9));
    const double pl = action_plancherel(shape.to_profile(1e-3), 1.0);
    CHECK(pl == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("variational conditions") {
    for (const SWCurve& C : {SWCurve{{1.0, 0.0}, 1.0}, kThreeBand}) {
        const LimitShape shape(C);
        const SurfaceTension S(xi_from_gaps(C));
        const auto rep = slackness_check(shape, S);
        CHECK(rep.band_residual <= 1e-5);
        CHECK(rep.gap_violation <= 1e-5);
        CHECK(rep.gap_monotone);
        CHECK(rep.ok());
    }
}

TEST_CASE("dual free energy routes") {
    const auto V = xi_from_gaps(kThreeBand);
    const double F = dual_free_energy(V.xi(), 1.0);
    const LimitShape shape(kThreeBand);
    const SurfaceTension S(V);
    CHECK(F == doctest::Approx(action_plancherel(shape) + action_surf(shape, S)).epsilon(1e-8));
}

TEST_CASE("profile sampling") {
    const LimitShape shape(kThreeBand);
    const auto p = shape.to_profile(0.01);
    for (double x : {-1.7, -0.3, 0.8, 2.0}) CHECK(std::abs(p.value(x) - shape.psi(x)) < 1e-4);
    CHECK(l1_distance(p, psi_star(kThreeBand, 0.01)) < 1e-12);
}

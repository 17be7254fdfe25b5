#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <fmt/format.h>

#include "nekpart/barnes.hpp"
#include "nekpart/limitshape.hpp"
#include "nekpart/mcmc.hpp"
#include "nekpart/nekrasov.hpp"
#include "nekpart/stepped.hpp"
#include "nekpart/swcurve.hpp"
#include "oracles.hpp"

using namespace nekpart;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, fmt::format("exception: {}", e.what())};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && dt < limit_s;
    failures += !ok;
    fmt::print("criterion {}: {}  {}  [{:.2f} s, limit {:.0f} s]\n", id, ok ? "PASS" : "FAIL", o.detail, dt, limit_s);
    std::fflush(stdout);
}

const SWCurve kThreeBand{{1.0, 0.0, -3.5, 0.0}, 1.0};

Outcome closed_form() {
    const auto z = z_inst({1.0, {0.0}, 0.5}, 8);
    const double err = std::abs(z.value - std::exp(0.25));
    bool exact = true;
    for (int n = 0; n <= 8; ++n)
        exact = exact && instanton_coefficient_exact(n, Rational(1), {Rational(0)}) == Rational(1) / oracle::factorial(n);
    return {err <= 1e-9 && exact, fmt::format("|z_inst - e^(1/4)| = {:.2e}, exact 1/n! for n <= 8: {}", err, exact)};
}

Outcome quotients() {
    long checked = 0, bad = 0;
    double worst = 0.0;
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> re(-kPi, kPi), im(0.3, 1.5);
    for (int r = 2; r <= 5; ++r)
        for (int n = 0; n <= 20; ++n)
            for (const auto& p : partitions_of(n)) {
                const auto q = r_quotients(p, r);
                ++checked;
                if (!(combine_quotients(q) == p) || size_from_quotients(q) != n) ++bad;
                if (n > 10) continue;
                for (int k = 0; k < 20; ++k) {
                    const cplx eps(re(rng), im(rng));
                    std::vector<cplx> a;
                    for (const auto& s : q.shifts) a.push_back(eps * s.convert_to<double>());
                    const std::vector<Partition> one{p};
                    const std::vector<cplx> zero{0.0};
                    const cplx lhs = char_G(one, eps / static_cast<double>(r), zero);
                    const cplx rhs = char_G(q.quotients, eps, a);
                    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
                }
            }
    return {bad == 0 && worst <= 1e-12,
            fmt::format("{} (lambda, r) pairs, {} bijection/size failures, G identity max rel err {:.2e}", checked, bad, worst)};
}

Outcome weights() {
    std::mt19937_64 rng(30);
    std::uniform_real_distribution<double> u(-1.5, 1.5), e(0.2, 1.2);
    double worst = 0.0;
    long count = 0;
    for (int r = 1; r <= 3; ++r)
        for (int rep = 0; rep < 10;) {
            GaugeParams g{e(rng), std::vector<double>(static_cast<std::size_t>(r)), 1.0};
            double s = 0.0;
            for (auto& x : g.a) s += (x = u(rng));
            for (auto& x : g.a) x -= s / r;
            try {
                g.validate(1e-3);
            } catch (const PoleError&) {
                continue;
            }
            ++rep;
            for (int n = 0; n <= 3; ++n)
                for (const auto& F : tuples_of_size(r, n)) {
                    const double w = tangent_weight(F, g), o = oracle::arm_leg_weight(F, g);
                    worst = std::max(worst, std::abs(w - o) / o);
                    ++count;
                }
        }
    return {worst <= 1e-12, fmt::format("{} weights, max rel deviation from arm/leg oracle {:.2e}", count, worst)};
}

Outcome dual_identity() {
    const PeriodicPotential V({1.0, -1.0});
    bool ok = true;
    std::string d;
    for (double eps : {0.5, 0.4}) {
        const auto p = dual_z_partitions(V, eps, 0.2, 40);
        const auto l = dual_z_lattice(V, eps, 0.2, 6, 12);
        const double diff = std::abs(p.value - l.value);
        const double rel = diff / std::abs(p.value);
        const double tails = p.tail + l.tail + 1e-14 * std::abs(p.value);
        ok = ok && diff <= tails && rel <= 1e-4;
        d += fmt::format("eps={}: rel diff {:.2e}, tails {:.2e}; ", eps, rel, tails / std::abs(p.value));
    }
    return {ok, d};
}

Outcome main_theorem() {
    const std::vector<double> a{-1.0, 1.0};
    const double L = 0.3;
    const auto g = free_energy_gradient(a, L, 0, {0.2, 0.1, 0.05}, {8, 12, 20});
    const auto C = fit_curve_from_a(a, L);
    const auto ad = periods_a_dual(C);
    const double expected = -(ad[0] - ad[1]);
    const double rel = std::abs(g.value - expected) / std::abs(expected);
    return {rel <= 0.02, fmt::format("extrapolated gradient {:.8f}, -(a_dual_1 - a_dual_2) = {:.8f}, rel {:.2e}",
                                     g.value, expected, rel)};
}

Outcome geometry() {
    const auto bg = band_gap(kThreeBand);
    const auto V = xi_from_gaps(kThreeBand);
    const auto ad = periods_a_dual(kThreeBand);
    double xi_err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) xi_err = std::max(xi_err, std::abs(V.xi()[i] + ad[i] / 3.0));
    const auto f = facet_intercepts(LimitShape(kThreeBand));
    const auto a = periods_a(kThreeBand);
    double a_err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) a_err = std::max(a_err, std::abs(f.a[i] - a[i]));
    const auto H = prepotential_hessian(kThreeBand);
    const double min_eig = H.eigenvalues.minCoeff();
    const bool ok = bg.maximal && xi_err <= 1e-6 && a_err <= 1e-5 && H.asymmetry <= 1e-6 && min_eig > 0.0;
    return {ok, fmt::format("maximal {}, |xi + a_dual/r| {:.2e}, facet a err {:.2e}, Hessian asym {:.2e}, min eig {:.4f}",
                            bg.maximal, xi_err, a_err, H.asymmetry, min_eig)};
}

Outcome limit_shape() {
    const SWCurve one{{1.0, 0.0}, 1.0};
    const LimitShape shape(one);
    double arc = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double x = -2.0 + 4.0 * k / 400.0;
        const double exact = 2.0 / kPi * (x * std::asin(std::clamp(x / 2.0, -1.0, 1.0)) + std::sqrt(std::max(0.0, 4.0 - x * x)));
        arc = std::max(arc, std::abs(shape.psi(x) - exact));
    }
    double slack = 0.0;
    for (const SWCurve& C : {one, kThreeBand}) {
        const auto rep = slackness_check(LimitShape(C), SurfaceTension(xi_from_gaps(C)));
        slack = std::max({slack, rep.band_residual, rep.gap_violation});
    }
    const auto avg = mcmc_average(PeriodicPotential({0.0}), 0.05, 1.0, 1000000, 9000000, 1000, 7);
    const double l1 = l1_distance(avg.profile, shape.to_profile(1e-3));
    return {arc <= 1e-8 && slack <= 1e-5 && l1 <= 0.1,
            fmt::format("arcsine max err {:.2e}, slackness {:.2e}, MCMC L1 {:.4f} (mean size {:.1f}, {} samples)", arc,
                        slack, l1, avg.mean_size, avg.samples)};
}

Outcome legendre() {
    const auto V = xi_from_gaps(kThreeBand);
    const auto rep = legendre_check(V.xi(), 1.0);
    const double rel = rep.gap / std::abs(rep.action_route);
    return {rel <= 1e-3 && rep.gradient_rel_error <= 1e-3,
            fmt::format("F_dual action {:.10f}, prepotential {:.10f}, rel gap {:.2e}, gradient rel err {:.2e}",
                        rep.action_route, rep.prepotential_route, rel, rep.gradient_rel_error)};
}

Outcome stepped() {
    const auto P = PlaneCurve::line();
    double flat = 0.0;
    bool in_polygon = true;
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
            const double x = -4.0 + 0.2 * i, y = -4.0 + 0.2 * j;
            const auto g = ronkin_gradient(P, x, y);
            in_polygon = in_polygon && P.contains_slope(g[0], g[1], 1e-12);
            if (!amoeba_membership(P, x, y).member) flat = std::max(flat, std::abs(ronkin(P, x, y) - std::max({0.0, x, y})));
        }

    const Cardioid shape{3.0, 3.0, 0.5, 0.0};
    const auto B = cardioid_configuration(shape, 1.0);
    const double h = 1e-3;
    double pde = 0.0;
    for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j) {
            const double x = std::log(2.2 + 0.1 * i), y = std::log(2.7 + 0.1 * j);
            const auto p = burgers_solve(B, x, y);
            if (!p.liquid) continue;
            const cplx zx = (burgers_solve(B, x + h, y).z - burgers_solve(B, x - h, y).z) / (2 * h);
            const cplx wy = (burgers_solve(B, x, y + h).w - burgers_solve(B, x, y - h).w) / (2 * h);
            pde = std::max(pde, std::abs(zx / p.z + wy / p.w - B.c));
        }

    const auto fb = frozen_boundary(B, {0.3, 1.35, 0.45, 1.55}, 200);
    std::vector<std::array<double, 2>> XY;
    for (const auto& p : fb.points) XY.push_back({std::exp(p.x), std::exp(p.y)});
    const auto fit = fit_cardioid(XY);
    const double fit_rel = fit.max_residual / fit.scale;
    const auto generic = *std::max_element(fb.points.begin(), fb.points.end(),
                                           [](const auto& a, const auto& b) { return a.triple_gap < b.triple_gap; });
    const double expo = boundary_exponent(B, generic).exponent;
    const bool ok = flat <= 1e-6 && in_polygon && pde <= 1e-4 && fit_rel <= 1e-3 && std::abs(expo - 0.5) <= 0.05;
    return {ok, fmt::format("Ronkin flat err {:.2e}, grad in polygon {}, PDE residual {:.2e}, cardioid fit {:.2e} "
                            "({} points), exponent {:.4f}",
                            flat, in_polygon, pde, fit_rel, fb.points.size(), expo)};
}

}  // namespace

int main() {
    criterion(1, 1.0, closed_form);
    criterion(2, 60.0, quotients);
    criterion(3, 60.0, weights);
    criterion(4, 300.0, dual_identity);
    criterion(5, 600.0, main_theorem);
    criterion(6, 60.0, geometry);
    criterion(7, 600.0, limit_shape);
    criterion(8, 600.0, legendre);
    criterion(9, 600.0, stepped);
    fmt::print("{} of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}

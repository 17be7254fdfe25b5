#include "nekpart/limitshape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nekpart {

namespace {

double lambda_r(const SWCurve& C) { return std::pow(C.lambda_scale, C.r()); }

double others_product(const std::vector<double>& e, double x, std::size_t skip0, std::size_t skip1) {
    double p = 1.0;
    for (std::size_t j = 0; j < e.size(); ++j)
        if (j != skip0 && j != skip1) p *= std::abs(x - e[j]);
    return p;
}

// arg w(x + i0) on band i (0-based), written through phi with x = m + h cos(phi).
double band_theta(const SWCurve& C, const BandGapStructure& bg, int i, double phi) {
    const int r = C.r();
    const auto [lo, hi] = bg.band(i);
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double x = m + h * std::cos(phi);
    const double L = lambda_r(C);
    const double c = poly_eval(std::span<const double>(C.coeffs), x) / (2.0 * L);
    const double s = h * std::sin(phi) *
                     std::sqrt(others_product(bg.endpoints, x, static_cast<std::size_t>(2 * i),
                                              static_cast<std::size_t>(2 * i + 1))) /
                     (2.0 * L);
    const double alpha = std::atan2(s, c);
    const int k = i + 1;
    return ((r - k) % 2 == 0) ? -(r - k) * kPi - alpha : -(r - k + 1) * kPi + alpha;
}

double phi_of(double x, double lo, double hi) {
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    return std::acos(std::clamp((x - m) / h, -1.0, 1.0));
}

// Integral over [a, b] of f by an n-point Gauss-Legendre rule.
template <class F>
double gl(const QuadratureRule& rule, double a, double b, F&& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * pairwise_sum(terms);
}

double G_kernel(double u, double lambda_scale) {
    if (u == 0.0) return 0.0;
    return 0.5 * u * u * std::log(u / lambda_scale) - 0.75 * u * u;
}

double L_kernel(double u, double lambda_scale) {
    if (u == 0.0) return 0.0;
    return u * std::log(std::abs(u) / lambda_scale) - u;
}

// Integral of g(t) dmu(t) over band i, with dmu = psi''/2 = theta'/(pi r).
template <class F>
double band_measure_integral(const SWCurve& C, const BandGapStructure& bg, int i, const QuadratureRule& rule,
                             double phi_lo, double phi_hi, F&& g) {
    const auto [lo, hi] = bg.band(i);
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const auto dP = poly_derivative(C.coeffs);
    auto integrand = [&](double phi) {
        const double t = m + h * std::cos(phi);
        const double w = std::abs(poly_eval(std::span<const double>(dP), t)) /
                         std::sqrt(others_product(bg.endpoints, t, static_cast<std::size_t>(2 * i),
                                                  static_cast<std::size_t>(2 * i + 1)));
        return g(t) * w;
    };
    return gl(rule, phi_lo, phi_hi, integrand) / (kPi * C.r());
}

}  // namespace

cplx conformal_phi(cplx z, const SWCurve& C) {
    const int r = C.r();
    const cplx I(0.0, 1.0);
    if (z.imag() > 0.0) {
        const auto roots = polynomial_roots(std::span<const double>(C.coeffs));
        const cplx w = w_branch(z, C);
        cplx lw = static_cast<double>(r) * std::log(C.lambda_scale) + std::log(1.0 + w * w);
        for (const auto& p : roots) lw -= std::log(z - p);
        return 1.0 + 2.0 / (kPi * I * static_cast<double>(r)) * lw;
    }
    if (z.imag() < 0.0) throw std::domain_error("conformal_phi: lower half-plane");
    const double x = z.real();
    const auto bg = band_gap(C);
    if (x <= bg.endpoints.front()) {
        const double lw = std::log(std::abs(w_branch(z, C)));
        return {-1.0, -2.0 / (kPi * r) * lw};
    }
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg.band(i);
        if (x >= lo && x <= hi) return {1.0 + 2.0 / (kPi * r) * band_theta(C, bg, i, phi_of(x, lo, hi)), 0.0};
        if (i + 1 < r && x > hi && x < bg.band(i + 1).first) {
            const double lw = std::log(std::abs(w_branch(z, C)));
            return {LimitShape::facet_slope(i + 1, r), -2.0 / (kPi * r) * lw};
        }
    }
    const double lw = std::log(std::abs(w_branch(z, C)));
    return {1.0, -2.0 / (kPi * r) * lw};
}

LimitShape::LimitShape(SWCurve C, int nodes) : curve_(std::move(C)), bg_(band_gap(curve_)), nodes_(nodes) {
    const int r = curve_.r();
    endpoint_psi_.resize(bg_.endpoints.size());
    endpoint_psi_[0] = std::abs(bg_.endpoints[0]);
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg_.band(i);
        const auto ii = static_cast<std::size_t>(2 * i);
        endpoint_psi_[ii + 1] = endpoint_psi_[ii] + band_partial(i, hi);
        if (i + 1 < r)
            endpoint_psi_[ii + 2] = endpoint_psi_[ii + 1] + facet_slope(i + 1, r) * (bg_.endpoints[ii + 2] - hi);
    }
}

double LimitShape::band_partial(int i, double x) const {
    const auto [lo, hi] = bg_.band(i);
    const double h = 0.5 * (hi - lo);
    const double phx = phi_of(x, lo, hi);
    if (phx >= kPi) return 0.0;
    static thread_local std::vector<std::pair<int, QuadratureRule>> cache;
    const QuadratureRule* rule = nullptr;
    for (const auto& [n, q] : cache)
        if (n == nodes_) rule = &q;
    if (!rule) {
        cache.emplace_back(nodes_, gauss_legendre(nodes_));
        rule = &cache.back().second;
    }
    const double r = curve_.r();
    return gl(*rule, phx, kPi, [&](double phi) {
        return (1.0 + 2.0 / (kPi * r) * band_theta(curve_, bg_, i, phi)) * h * std::sin(phi);
    });
}

double LimitShape::psi_prime(double x) const {
    const int r = curve_.r();
    if (x <= bg_.endpoints.front()) return -1.0;
    if (x >= bg_.endpoints.back()) return 1.0;
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg_.band(i);
        if (x >= lo && x <= hi) return 1.0 + 2.0 / (kPi * r) * band_theta(curve_, bg_, i, phi_of(x, lo, hi));
        if (x < lo) return facet_slope(i, r);
    }
    return 1.0;
}

double LimitShape::psi_second(double x) const {
    const int r = curve_.r();
    const double L = lambda_r(curve_);
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg_.band(i);
        if (x > lo && x < hi) {
            const double P = poly_eval(std::span<const double>(curve_.coeffs), x);
            const double dP = poly_eval(std::span<const double>(poly_derivative(curve_.coeffs)), x);
            return 2.0 / (kPi * r) * std::abs(dP) / std::sqrt(4.0 * L * L - P * P);
        }
    }
    return 0.0;
}

double LimitShape::psi(double x) const {
    const int r = curve_.r();
    if (x <= bg_.endpoints.front() || x >= bg_.endpoints.back()) return std::abs(x);
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg_.band(i);
        const auto ii = static_cast<std::size_t>(2 * i);
        if (x >= lo && x <= hi) return endpoint_psi_[ii] + band_partial(i, x);
        if (i + 1 < r && x > hi && x < bg_.band(i + 1).first)
            return endpoint_psi_[ii + 1] + facet_slope(i + 1, r) * (x - hi);
    }
    return std::abs(x);
}

ProfileFunction LimitShape::to_profile(double spacing) const {
    if (!(spacing > 0.0)) throw std::invalid_argument("to_profile: spacing must be positive");
    std::vector<double> xs;
    const double lo = bg_.endpoints.front(), hi = bg_.endpoints.back();
    const auto n = static_cast<int>(std::ceil((hi - lo) / spacing));
    for (int k = 0; k <= n; ++k) xs.push_back(lo + (hi - lo) * k / n);
    xs.insert(xs.end(), bg_.endpoints.begin(), bg_.endpoints.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             xs.end());
    std::vector<double> ps;
    for (double x : xs) ps.push_back(psi(x));
    ps.front() = std::abs(xs.front());
    ps.back() = std::abs(xs.back());
    return ProfileFunction::from_samples(xs, ps, 1e-7);
}

ProfileFunction psi_star(const SWCurve& C, double spacing) { return LimitShape(C).to_profile(spacing); }

FacetReport facet_intercepts(const LimitShape& shape, double min_length) {
    const int r = shape.r();
    const auto& e = shape.bands().endpoints;
    const auto& v = shape.endpoint_values();
    FacetReport rep;
    rep.intercepts.push_back(0.0);
    for (int k = 1; k < r; ++k) {
        const auto j = static_cast<std::size_t>(2 * k - 1);
        if (e[j + 1] - e[j] < min_length)
            throw std::runtime_error(fmt::format("facet_intercepts: facet {} too short to fit", k));
        // Least-squares line through both facet ends; the slope is fixed by theory.
        const double s = LimitShape::facet_slope(k, r);
        rep.intercepts.push_back(0.5 * ((v[j] - s * e[j]) + (v[j + 1] - s * e[j + 1])));
    }
    rep.intercepts.push_back(0.0);
    for (int k = 1; k <= r; ++k)
        rep.a.push_back(0.5 * r * (rep.intercepts[static_cast<std::size_t>(k - 1)] -
                                   rep.intercepts[static_cast<std::size_t>(k)]));
    return rep;
}

SurfaceTension::SurfaceTension(const PeriodicPotential& V) : sorted_(V.xi()) {
    std::sort(sorted_.begin(), sorted_.end());
    values_.push_back(0.0);
    for (double x : sorted_) values_.push_back(values_.back() + x * 2.0 / r());
}

std::vector<double> SurfaceTension::breakpoints() const {
    std::vector<double> b;
    for (int i = 0; i <= r(); ++i) b.push_back(-1.0 + 2.0 * i / r());
    return b;
}

double SurfaceTension::operator()(double slope) const {
    if (std::abs(slope) > 1.0 + 1e-12) throw std::domain_error(fmt::format("sigma: slope {} outside [-1, 1]", slope));
    const int k = std::clamp(static_cast<int>(std::floor((slope + 1.0) * r() / 2.0)), 0, r() - 1);
    return values_[static_cast<std::size_t>(k)] + sorted_[static_cast<std::size_t>(k)] * (slope - (-1.0 + 2.0 * k / r()));
}

double action_surf(const ProfileFunction& psi, const SurfaceTension& S) {
    double s = 0.0;
    const auto& b = psi.breakpoints();
    for (std::size_t k = 0; k + 1 < b.size(); ++k) s += S(psi.slopes()[k]) * (b[k + 1] - b[k]);
    return 0.5 * s;
}

double action_surf(const LimitShape& shape, const SurfaceTension& S) {
    const int r = shape.r();
    if (S.r() != r) throw std::invalid_argument("action_surf: rank mismatch");
    const auto& e = shape.bands().endpoints;
    const auto& v = shape.endpoint_values();
    double s = 0.0;
    for (int k = 1; k <= r; ++k) {
        const auto j = static_cast<std::size_t>(2 * k - 2);
        const double len = e[j + 1] - e[j];
        const double s0 = LimitShape::facet_slope(k - 1, r);
        s += S(s0) * len + S.sorted_xi()[static_cast<std::size_t>(k - 1)] * (v[j + 1] - v[j] - s0 * len);
        if (k < r) s += S(LimitShape::facet_slope(k, r)) * (e[j + 2] - e[j + 1]);
    }
    return 0.5 * s;
}

double action_plancherel(const ProfileFunction& psi, double lambda_scale) {
    const auto& b = psi.breakpoints();
    if (b.empty()) return 0.0;
    std::vector<double> mass(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
        const double left = k == 0 ? -1.0 : psi.slopes()[k - 1];
        const double right = k + 1 == b.size() ? 1.0 : psi.slopes()[k];
        mass[k] = 0.5 * (right - left);
    }
    std::vector<double> terms;
    for (std::size_t j = 0; j < b.size(); ++j)
        for (std::size_t k = j + 1; k < b.size(); ++k)
            terms.push_back(2.0 * mass[j] * mass[k] * G_kernel(b[k] - b[j], lambda_scale));
    return pairwise_sum(terms);
}

double action_plancherel(const LimitShape& shape, int nodes) {
    const auto& C = shape.curve();
    const auto& bg = shape.bands();
    const int r = shape.r();
    const auto rule = gauss_legendre(nodes);
    auto H = [&](double s) {
        double acc = 0.0;
        for (int i = 0; i < r; ++i)
            acc += band_measure_integral(C, bg, i, rule, 0.0, kPi,
                                         [&](double t) { return G_kernel(std::abs(t - s), C.lambda_scale); });
        return acc;
    };
    // H is affine on every band, and the band mean of mu is a_i.
    const auto a = periods_a(C);
    double total = 0.0;
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg.band(i);
        const double hl = H(lo), hh = H(hi);
        total += hl + (hh - hl) * (a[static_cast<std::size_t>(i)] - lo) / (hi - lo);
    }
    return total / r;
}

PeriodicPotential xi_from_gaps(const SWCurve& C) {
    const int r = C.r();
    if (r == 1) return PeriodicPotential({0.0});
    const auto bg = band_gap(C);
    const auto rule = gauss_legendre(256);
    std::vector<double> neg_steps;
    for (int i = 0; i + 1 < r; ++i) {
        const auto [lo, hi] = bg.gap(i);
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        const double step = gl(rule, 0.0, kPi, [&](double phi) {
            const double x = m + h * std::cos(phi);
            return kPi * conformal_phi({x, 0.0}, C).imag() * h * std::sin(phi);
        });
        neg_steps.push_back(-step);
    }
    return PeriodicPotential(a_dual_from_differences(neg_steps), 1e-9);
}

double kernel_convolution(const LimitShape& shape, double x, int nodes) {
    const auto& C = shape.curve();
    const auto& bg = shape.bands();
    const auto rule = gauss_legendre(nodes);
    double acc = 0.0;
    auto g = [&](double t) { return L_kernel(x - t, C.lambda_scale); };
    for (int i = 0; i < shape.r(); ++i) {
        const auto [lo, hi] = bg.band(i);
        if (x > lo && x < hi) {
            const double px = phi_of(x, lo, hi);
            acc += band_measure_integral(C, bg, i, rule, 0.0, px, g);
            acc += band_measure_integral(C, bg, i, rule, px, kPi, g);
        } else {
            acc += band_measure_integral(C, bg, i, rule, 0.0, kPi, g);
        }
    }
    // psi'' = 2 mu.
    return 2.0 * acc;
}

VariationalReport slackness_check(const LimitShape& shape, const SurfaceTension& S, int samples_per_band,
                                  double tolerance) {
    const int r = shape.r();
    if (S.r() != r) throw std::invalid_argument("slackness_check: rank mismatch");
    const auto& bg = shape.bands();
    const auto& xi = S.sorted_xi();
    VariationalReport rep;
    rep.tolerance = tolerance;
    std::vector<std::vector<double>> band_vals(static_cast<std::size_t>(r));
    double shift = 0.0;
    int count = 0;
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg.band(i);
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int k = 0; k < samples_per_band; ++k) {
            const double phi = kPi * (k + 0.5) / samples_per_band;
            const double v = kernel_convolution(shape, m + h * std::cos(phi));
            band_vals[static_cast<std::size_t>(i)].push_back(v);
            shift += xi[static_cast<std::size_t>(i)] - v;
            ++count;
        }
    }
    rep.c0 = shift / count;
    for (int i = 0; i < r; ++i)
        for (double v : band_vals[static_cast<std::size_t>(i)])
            rep.band_residual = std::max(rep.band_residual, std::abs(v + rep.c0 - xi[static_cast<std::size_t>(i)]));
    for (int i = 0; i + 1 < r; ++i) {
        const auto [lo, hi] = bg.gap(i);
        double prev = -std::numeric_limits<double>::infinity();
        for (int k = 1; k < samples_per_band; ++k) {
            const double x = lo + (hi - lo) * k / samples_per_band;
            const double v = kernel_convolution(shape, x) + rep.c0;
            rep.gap_violation = std::max({rep.gap_violation, xi[static_cast<std::size_t>(i)] - v,
                                          v - xi[static_cast<std::size_t>(i + 1)]});
            if (v <= prev) rep.gap_monotone = false;
            prev = v;
        }
    }
    rep.action_value = action_plancherel(shape) + action_surf(shape, S);
    return rep;
}

double dual_free_energy(const std::vector<double>& xi, double lambda_scale) {
    const LimitShape shape(fit_curve_from_xi(xi, lambda_scale));
    return action_plancherel(shape) + action_surf(shape, SurfaceTension(PeriodicPotential(xi, 1e-9)));
}

LegendreReport legendre_check(const std::vector<double>& xi, double lambda_scale, double grid_step, double fd_step) {
    const int r = static_cast<int>(xi.size());
    LegendreReport rep;
    const SWCurve C = fit_curve_from_xi(xi, lambda_scale);
    const LimitShape shape(C);
    rep.action_route = action_plancherel(shape) + action_surf(shape, SurfaceTension(PeriodicPotential(xi, 1e-9)));
    rep.a = periods_a(C);

    if (r == 1) {
        rep.prepotential_route = prepotential_asymptotic({0.0}, lambda_scale);
    } else {
        // Quadratic fit of F(a)/r^2 - (xi, a)/r on a 3^(r-1) grid in reduced coordinates.
        const int n = r - 1;
        const auto ref = default_reference(rep.a, lambda_scale);
        std::vector<std::vector<double>> pts;
        std::vector<double> vals;
        std::vector<int> idx(static_cast<std::size_t>(n), -1);
        while (true) {
            std::vector<double> u(static_cast<std::size_t>(n));
            auto a = rep.a;
            for (int j = 0; j < n; ++j) {
                u[static_cast<std::size_t>(j)] = grid_step * idx[static_cast<std::size_t>(j)];
                a[static_cast<std::size_t>(j)] += u[static_cast<std::size_t>(j)];
                a.back() -= u[static_cast<std::size_t>(j)];
            }
            double pairing = 0.0;
            for (int j = 0; j < r; ++j) pairing += xi[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)];
            vals.push_back(prepotential(a, lambda_scale, ref) / (r * r) - pairing / r);
            pts.push_back(u);
            int j = 0;
            while (j < n && ++idx[static_cast<std::size_t>(j)] > 1) idx[static_cast<std::size_t>(j++)] = -1;
            if (j == n) break;
        }
        const int nb = 1 + n + n * (n + 1) / 2;
        Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), nb);
        Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t p = 0; p < pts.size(); ++p) {
            int c = 0;
            const auto row = static_cast<Eigen::Index>(p);
            A(row, c++) = 1.0;
            for (int j = 0; j < n; ++j) A(row, c++) = pts[p][static_cast<std::size_t>(j)];
            for (int j = 0; j < n; ++j)
                for (int k = j; k < n; ++k)
                    A(row, c++) = pts[p][static_cast<std::size_t>(j)] * pts[p][static_cast<std::size_t>(k)];
            y(row) = vals[p];
        }
        const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y);
        Eigen::VectorXd b(n);
        Eigen::MatrixXd Q(n, n);
        int c = 1 + n;
        for (int j = 0; j < n; ++j) b(j) = beta(1 + j);
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                Q(j, k) = Q(k, j) = (j == k ? 2.0 : 1.0) * beta(c);
                ++c;
            }
        const Eigen::VectorXd u = -Q.ldlt().solve(b);
        if (u.lpNorm<Eigen::Infinity>() > grid_step)
            throw ConvergenceError("legendre_check: grid minimum on the boundary, widen the grid",
                                   u.lpNorm<Eigen::Infinity>());
        rep.prepotential_route = beta(0) + 0.5 * b.dot(u);
    }
    rep.gap = std::abs(rep.action_route - rep.prepotential_route);

    for (int i = 0; i + 1 < r; ++i) {
        auto xp = xi, xm = xi;
        xp[static_cast<std::size_t>(i)] += fd_step;
        xp[static_cast<std::size_t>(i + 1)] -= fd_step;
        xm[static_cast<std::size_t>(i)] -= fd_step;
        xm[static_cast<std::size_t>(i + 1)] += fd_step;
        const double g = -(dual_free_energy(xp, lambda_scale) - dual_free_energy(xm, lambda_scale)) / (2.0 * fd_step);
        const double expect = (rep.a[static_cast<std::size_t>(i)] - rep.a[static_cast<std::size_t>(i + 1)]) / r;
        rep.gradient_fd.push_back(g);
        rep.gradient_expected.push_back(expect);
        rep.gradient_rel_error = std::max(rep.gradient_rel_error, std::abs(g - expect) / std::abs(expect));
    }
    return rep;
}

}  // namespace nekpart

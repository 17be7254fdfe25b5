#include "nekpart/stepped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace nekpart {

namespace {

long cross(const std::array<int, 2>& o, const std::array<int, 2>& a, const std::array<int, 2>& b) {
    return static_cast<long>(a[0] - o[0]) * (b[1] - o[1]) - static_cast<long>(a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<std::array<int, 2>> convex_hull(std::vector<std::array<int, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<std::array<int, 2>> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

// Trims exact zeros from the top of a lowest-first coefficient list.
template <class T>
void trim_top(std::vector<T>& c) {
    while (!c.empty() && c.back() == T(0)) c.pop_back();
}

// Roots of a lowest-first polynomial.
std::vector<cplx> roots_low_first(const std::vector<cplx>& c) {
    std::vector<cplx> hi(c.rbegin(), c.rend());
    if (hi.size() < 2) return {};
    return polynomial_roots(std::span<const cplx>(hi));
}

struct FiberRoots {
    int low = 0;
    cplx lead;
    std::vector<cplx> roots;
};

FiberRoots fiber(const PlaneCurve& P, cplx z) {
    auto a = P.w_coefficients(z);
    trim_top(a);
    FiberRoots f;
    if (a.empty()) return f;
    while (f.low < static_cast<int>(a.size()) && a[static_cast<std::size_t>(f.low)] == 0.0) ++f.low;
    f.lead = a.back();
    f.roots = roots_low_first(std::vector<cplx>(a.begin() + f.low, a.end()));
    return f;
}

// Angles where some |w_k(e^{x + i theta})| crosses e^y, found on a uniform scan and bisected.
std::vector<double> crossing_angles(const PlaneCurve& P, double x, double y, int samples, double* margin) {
    auto count = [&](double th) {
        const auto f = fiber(P, std::exp(cplx(x, th)));
        int n = f.low;
        for (const auto& w : f.roots) {
            const double d = std::log(std::abs(w)) - y;
            if (margin) *margin = std::min(*margin, std::abs(d));
            if (d < 0.0) ++n;
        }
        return n;
    };
    std::vector<double> out;
    const double step = 2.0 * kPi / samples;
    int prev = count(0.0);
    for (int k = 1; k <= samples; ++k) {
        const double th = k * step;
        const int cur = count(th);
        if (cur != prev) {
            double lo = th - step, hi = th;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (count(mid) == prev ? lo : hi) = mid;
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return out;
}

// Angles where the lowest or highest w-coefficient vanishes on |z| = e^x.
std::vector<double> singular_angles(const PlaneCurve& P, double x) {
    std::vector<double> out;
    const int top = P.degree_w();
    int low = top;
    for (const auto& m : P.monomials()) low = std::min(low, m.j);
    for (int j : {low, top}) {
        std::vector<cplx> c(static_cast<std::size_t>(P.degree_z() + 1), 0.0);
        for (const auto& m : P.monomials())
            if (m.j == j) c[static_cast<std::size_t>(m.i)] = m.coeff;
        trim_top(c);
        for (const auto& z : roots_low_first(c))
            if (std::abs(z) > 0.0 && std::abs(std::log(std::abs(z)) - x) < 1e-9) {
                double th = std::arg(z);
                if (th < 0.0) th += 2.0 * kPi;
                out.push_back(th);
            }
    }
    return out;
}

double ronkin_y_derivative(const PlaneCurve& P, double x, double y) {
    const auto cuts = crossing_angles(P, x, y, 1024, nullptr);
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(2.0 * kPi);
    std::vector<double> terms;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        const auto f = fiber(P, std::exp(cplx(x, mid)));
        int n = f.low;
        for (const auto& w : f.roots)
            if (std::abs(w) < std::exp(y)) ++n;
        terms.push_back(n * (edges[k + 1] - edges[k]));
    }
    return pairwise_sum(terms) / (2.0 * kPi);
}

}  // namespace

PlaneCurve::PlaneCurve(std::vector<Monomial> monomials) {
    std::map<std::pair<int, int>, double> merged;
    for (const auto& m : monomials) {
        if (m.i < 0 || m.j < 0) throw std::invalid_argument("PlaneCurve: negative exponent");
        merged[{m.i, m.j}] += m.coeff;
    }
    std::vector<std::array<int, 2>> pts;
    for (const auto& [e, c] : merged)
        if (c != 0.0) {
            monomials_.push_back({e.first, e.second, c});
            pts.push_back({e.first, e.second});
        }
    if (monomials_.size() < 2) throw std::invalid_argument("PlaneCurve: at least two monomials required");
    hull_ = convex_hull(pts);
}

PlaneCurve PlaneCurve::line() { return PlaneCurve({{1, 0, 1.0}, {0, 1, 1.0}, {0, 0, -1.0}}); }

int PlaneCurve::degree_z() const noexcept {
    int d = 0;
    for (const auto& m : monomials_) d = std::max(d, m.i);
    return d;
}

int PlaneCurve::degree_w() const noexcept {
    int d = 0;
    for (const auto& m : monomials_) d = std::max(d, m.j);
    return d;
}

cplx PlaneCurve::operator()(cplx z, cplx w) const {
    cplx s = 0.0;
    for (const auto& m : monomials_) s += m.coeff * std::pow(z, m.i) * std::pow(w, m.j);
    return s;
}

std::vector<cplx> PlaneCurve::w_coefficients(cplx z) const {
    std::vector<cplx> a(static_cast<std::size_t>(degree_w() + 1), 0.0);
    for (const auto& m : monomials_) a[static_cast<std::size_t>(m.j)] += m.coeff * std::pow(z, m.i);
    return a;
}

PlaneCurve PlaneCurve::swapped() const {
    std::vector<Monomial> m;
    for (const auto& x : monomials_) m.push_back({x.j, x.i, x.coeff});
    return PlaneCurve(m);
}

double PlaneCurve::coefficient(int i, int j) const {
    for (const auto& m : monomials_)
        if (m.i == i && m.j == j) return m.coeff;
    return 0.0;
}

bool PlaneCurve::contains_slope(double s1, double s2, double tol) const {
    if (hull_.size() == 1) return std::abs(s1 - hull_[0][0]) <= tol && std::abs(s2 - hull_[0][1]) <= tol;
    if (hull_.size() == 2) {
        const double dx = hull_[1][0] - hull_[0][0], dy = hull_[1][1] - hull_[0][1];
        const double len = std::hypot(dx, dy);
        const double t = ((s1 - hull_[0][0]) * dx + (s2 - hull_[0][1]) * dy) / (len * len);
        const double off = std::abs((s1 - hull_[0][0]) * dy - (s2 - hull_[0][1]) * dx) / len;
        return off <= tol && t >= -tol && t <= 1.0 + tol;
    }
    for (std::size_t k = 0; k < hull_.size(); ++k) {
        const auto& a = hull_[k];
        const auto& b = hull_[(k + 1) % hull_.size()];
        const double dx = b[0] - a[0], dy = b[1] - a[1];
        const double side = (dx * (s2 - a[1]) - dy * (s1 - a[0])) / std::hypot(dx, dy);
        if (side < -tol) return false;
    }
    return true;
}

double ronkin(const PlaneCurve& P, double x, double y, double tol) {
    auto J = [&](double th) {
        const auto f = fiber(P, std::exp(cplx(x, th)));
        double s = std::log(std::abs(f.lead)) + f.low * y;
        for (const auto& w : f.roots) s += std::max(std::log(std::abs(w)), y);
        return s;
    };
    const auto cuts = crossing_angles(P, x, y, 512, nullptr);
    const auto sing = singular_angles(P, x);
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.insert(edges.end(), sing.begin(), sing.end());
    edges.push_back(2.0 * kPi);
    std::sort(edges.begin(), edges.end());
    std::vector<double> parts;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k], L = edges[k + 1] - edges[k];
        if (!(L > 0.0)) continue;
        // theta = a + L t^2 (3 - 2t) flattens endpoint log singularities.
        // The offset turns the relative stopping rule into an absolute one when J is near zero.
        const double offset = 1.0 + std::abs(x) + std::abs(y);
        auto Jt = [&](double t) {
            const double u = t * t * (3.0 - 2.0 * t);
            return (J(a + L * u) + offset) * 6.0 * L * t * (1.0 - t);
        };
        parts.push_back(integrate_adaptive(Jt, 0.0, 1.0, tol) - offset * L);
    }
    return pairwise_sum(parts) / (2.0 * kPi);
}

std::array<double, 2> ronkin_gradient(const PlaneCurve& P, double x, double y, double tol) {
    (void)tol;
    return {ronkin_y_derivative(P.swapped(), y, x), ronkin_y_derivative(P, x, y)};
}

AmoebaTest amoeba_membership(const PlaneCurve& P, double x, double y, int samples, double tol) {
    AmoebaTest t;
    t.margin = std::numeric_limits<double>::infinity();
    const auto cuts = crossing_angles(P, x, y, samples, &t.margin);
    t.member = !cuts.empty();
    t.borderline = !t.member && t.margin <= tol;
    return t;
}

double surface_tension_step(const PlaneCurve& P, double s1, double s2, double tol) {
    if (!P.contains_slope(s1, s2, 1e-12))
        throw std::domain_error(fmt::format("surface_tension_step: slope ({}, {}) outside the Newton polygon", s1, s2));
    const auto& hull = P.newton_polygon();
    const double edge_tol = 1e-9;
    // Boundary slopes: one-dimensional Legendre transform of the edge polynomial's Ronkin function.
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const auto& A = hull[k];
        const auto& B = hull[(k + 1) % hull.size()];
        const int g = std::gcd(std::abs(B[0] - A[0]), std::abs(B[1] - A[1]));
        if (g == 0) continue;
        const double ex = static_cast<double>(B[0] - A[0]) / g, ey = static_cast<double>(B[1] - A[1]) / g;
        const double len2 = ex * ex + ey * ey;
        const double tau = ((s1 - A[0]) * ex + (s2 - A[1]) * ey) / len2;
        const double off = std::abs((s1 - A[0]) * ey - (s2 - A[1]) * ex) / std::sqrt(len2);
        if (off > edge_tol || tau < -edge_tol || tau > g + edge_tol) continue;
        std::vector<cplx> c(static_cast<std::size_t>(g + 1));
        for (int j = 0; j <= g; ++j)
            c[static_cast<std::size_t>(j)] = P.coefficient(A[0] + j * static_cast<int>(ex), A[1] + j * static_cast<int>(ey));
        std::vector<double> b;
        for (const auto& z : roots_low_first(c)) b.push_back(std::log(std::abs(z)));
        auto r = [&](double u) {
            double s = std::log(std::abs(c.back()));
            for (double bk : b) s += std::max(bk, u);
            return s;
        };
        if (b.empty()) return -std::log(std::abs(c[0]));
        double best = -std::numeric_limits<double>::infinity();
        for (double bk : b) best = std::max(best, tau * bk - r(bk));
        return best;
    }
    // Interior: damped Newton on grad R(p) = s, maximising s.p - R(p).
    const std::array<double, 2> s{s1, s2};
    std::array<double, 2> p{0.0, 0.0};
    auto objective = [&](const std::array<double, 2>& q) { return s[0] * q[0] + s[1] * q[1] - ronkin(P, q[0], q[1]); };
    double f = objective(p);
    const double h = 1e-5;
    for (int it = 0; it < 200; ++it) {
        const auto g = ronkin_gradient(P, p[0], p[1]);
        const double r0 = s[0] - g[0], r1 = s[1] - g[1];
        if (std::hypot(r0, r1) < tol) return f;
        const auto gxp = ronkin_gradient(P, p[0] + h, p[1]), gxm = ronkin_gradient(P, p[0] - h, p[1]);
        const auto gyp = ronkin_gradient(P, p[0], p[1] + h), gym = ronkin_gradient(P, p[0], p[1] - h);
        double H00 = (gxp[0] - gxm[0]) / (2 * h), H11 = (gyp[1] - gym[1]) / (2 * h);
        double H01 = 0.25 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / h;
        double det = H00 * H11 - H01 * H01;
        std::array<double, 2> step;
        if (det > 1e-14 && H00 > 0.0) step = {(H11 * r0 - H01 * r1) / det, (H00 * r1 - H01 * r0) / det};
        else step = {r0, r1};
        const double cap = 2.0;
        const double norm = std::hypot(step[0], step[1]);
        if (norm > cap) step = {step[0] * cap / norm, step[1] * cap / norm};
        double lam = 1.0;
        std::array<double, 2> q;
        double fq = f;
        for (int ls = 0; ls < 40; ++ls) {
            q = {p[0] + lam * step[0], p[1] + lam * step[1]};
            fq = objective(q);
            if (fq >= f - 1e-15) break;
            lam *= 0.5;
        }
        p = q;
        f = std::max(f, fq);
    }
    throw ConvergenceError("surface_tension_step: Newton did not converge", 0.0);
}

namespace {

using Poly = std::vector<double>;  // lowest degree first

Poly pmul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

void padd(Poly& a, const Poly& b, double scale) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
}

Poly ppow(const Poly& a, int n) {
    Poly r{1.0};
    for (int k = 0; k < n; ++k) r = pmul(r, a);
    return r;
}

double peval(const Poly& a, double x) {
    double s = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) s = s * x + a[k];
    return s;
}

cplx peval(const Poly& a, cplx x) {
    cplx s = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) s = s * x + a[k];
    return s;
}

Poly pderiv(const Poly& a) {
    Poly d;
    for (std::size_t k = 1; k < a.size(); ++k) d.push_back(static_cast<double>(k) * a[k]);
    return d;
}

std::pair<Poly, Poly> linear_w(const PlaneCurve& P) {
    if (P.degree_w() != 1) throw std::invalid_argument("burgers: P must have degree one in w");
    Poly a0(static_cast<std::size_t>(P.degree_z() + 1), 0.0), a1 = a0;
    for (const auto& m : P.monomials()) (m.j == 0 ? a0 : a1)[static_cast<std::size_t>(m.i)] += m.coeff;
    return {a0, a1};
}

Poly monic(Poly g) {
    double mx = 0.0;
    for (double c : g) mx = std::max(mx, std::abs(c));
    while (!g.empty() && std::abs(g.back()) <= 1e-14 * mx) g.pop_back();
    if (g.empty()) return g;
    const double lead = g.back();
    for (double& c : g) c /= lead;
    return g;
}

std::vector<cplx> proots(const Poly& g) {
    std::vector<double> hi(g.rbegin(), g.rend());
    if (hi.size() < 2) return {};
    return polynomial_roots(std::span<const double>(hi));
}

// Closest pair of roots, as the real double-root estimate.
double double_root(const std::vector<cplx>& roots, double* gap) {
    double best = std::numeric_limits<double>::infinity(), t = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            const double d = std::abs(roots[i] - roots[j]);
            if (d < best) {
                best = d;
                t = 0.5 * (roots[i] + roots[j]).real();
            }
        }
    if (gap) *gap = best;
    return t;
}


}  // namespace

std::vector<double> characteristic_polynomial(const BurgersData& B, double x, double y) {
    const auto [a0, a1] = linear_w(B.P);
    const int D = B.Q.degree_w();
    const double al = std::exp(-B.c * x), be = std::exp(-B.c * y);
    const Poly minus_a0 = pmul(a0, Poly{-1.0});
    Poly g;
    for (const auto& m : B.Q.monomials()) {
        Poly term = pmul(ppow(Poly{0.0, 1.0}, m.i), pmul(ppow(minus_a0, m.j), ppow(a1, D - m.j)));
        padd(g, term, m.coeff * std::pow(al, m.i) * std::pow(be, m.j));
    }
    return g;
}

double characteristic_discriminant(const BurgersData& B, double x, double y) {
    const Poly g = monic(characteristic_polynomial(B, x, y));
    const int n = static_cast<int>(g.size()) - 1;
    if (n < 1) throw std::domain_error("characteristic_discriminant: constant polynomial");
    if (n == 1) return 1.0;
    // Sylvester matrix of g and g', highest degree first.
    const Poly d = pderiv(g);
    const int N = 2 * n - 1;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
    for (int r = 0; r < n - 1; ++r)
        for (int k = 0; k <= n; ++k) S(r, r + k) = g[static_cast<std::size_t>(n - k)];
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= n - 1; ++k) S(n - 1 + r, r + k) = d[static_cast<std::size_t>(n - 1 - k)];
    const double res = S.fullPivLu().determinant();
    return ((n * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * res;
}

BurgersPoint burgers_solve(const BurgersData& B, double x, double y) {
    const auto [a0, a1] = linear_w(B.P);
    const Poly g = monic(characteristic_polynomial(B, x, y));
    if (g.size() < 2) throw std::domain_error("burgers_solve: characteristic system has no roots");
    BurgersPoint out;
    out.roots = proots(g);
    std::sort(out.roots.begin(), out.roots.end(),
              [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
    // The root below the real axis puts grad h in the triangle; its conjugate is the mirror solution.
    double best = 0.0;
    for (const auto& z : out.roots) {
        const double thr = 1e-10 * (1.0 + std::abs(z));
        if (z.imag() < -thr && -z.imag() > best) {
            const cplx den = peval(a1, z);
            if (std::abs(den) < 1e-14) continue;
            best = -z.imag();
            out.liquid = true;
            out.z = z;
            out.w = -peval(a0, z) / den;
        }
    }
    if (out.liquid) out.grad = {std::arg(out.w) / kPi, -std::arg(out.z) / kPi};
    return out;
}

TriplePoint refine_triple_point(const BurgersData& B, const BoundaryPoint& seed) {
    Eigen::Vector3d v(seed.x, seed.y, seed.t);
    auto F = [&](const Eigen::Vector3d& u) {
        const Poly g = monic(characteristic_polynomial(B, u(0), u(1)));
        const Poly d1 = pderiv(g), d2 = pderiv(d1);
        return Eigen::Vector3d(peval(g, u(2)), peval(d1, u(2)), peval(d2, u(2)));
    };
    const double h = 1e-7;
    for (int it = 0; it < 50; ++it) {
        const Eigen::Vector3d f = F(v);
        if (f.norm() < 1e-14) break;
        Eigen::Matrix3d J;
        for (int k = 0; k < 3; ++k) {
            Eigen::Vector3d vp = v, vm = v;
            vp(k) += h;
            vm(k) -= h;
            J.col(k) = (F(vp) - F(vm)) / (2 * h);
        }
        Eigen::Vector3d step = J.fullPivLu().solve(f);
        const double cap = 0.1 * (1.0 + std::abs(v(2)));
        if (step.norm() > cap) step *= cap / step.norm();
        v -= step;
        if (step.norm() < 1e-15) break;
    }
    TriplePoint c{v(0), v(1), v(2), 0.0, 0.0, false};
    c.discriminant = characteristic_discriminant(B, c.x, c.y);
    const double hd = 1e-8;
    const double gx = (characteristic_discriminant(B, c.x + hd, c.y) - characteristic_discriminant(B, c.x - hd, c.y)) / (2 * hd);
    const double gy = (characteristic_discriminant(B, c.x, c.y + hd) - characteristic_discriminant(B, c.x, c.y - hd)) / (2 * hd);
    c.discriminant_gradient = std::hypot(gx, gy);
    return c;
}

FrozenBoundary frozen_boundary(const BurgersData& B, const Region& region, int resolution) {
    if (resolution < 2) throw std::invalid_argument("frozen_boundary: resolution must be at least 2");
    const int n = resolution;
    const double dx = (region.x1 - region.x0) / n, dy = (region.y1 - region.y0) / n;
    std::vector<double> D(static_cast<std::size_t>((n + 1) * (n + 1)));
    auto at = [&](int i, int j) -> double& { return D[static_cast<std::size_t>(j * (n + 1) + i)]; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) at(i, j) = characteristic_discriminant(B, region.x0 + i * dx, region.y0 + j * dy);

    FrozenBoundary fb;
    auto refine = [&](double xa, double ya, double xb, double yb, double da) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double dm = characteristic_discriminant(B, xa + mid * (xb - xa), ya + mid * (yb - ya));
            ((dm > 0.0) == (da > 0.0) ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        BoundaryPoint p{xa + s * (xb - xa), ya + s * (yb - ya), 0.0, 0.0};
        const Poly g = monic(characteristic_polynomial(B, p.x, p.y));
        double gap = 0.0;
        p.t = double_root(proots(g), &gap);
        // A sign change through a pole of the normalisation is not a boundary point.
        if (!(gap < 1e-4 * (1.0 + std::abs(p.t)))) {
            ++fb.failures;
            return;
        }
        const auto roots = proots(g);
        p.triple_gap = std::numeric_limits<double>::infinity();
        int skipped = 0;
        std::vector<double> dist;
        for (const auto& r : roots) dist.push_back(std::abs(r - p.t));
        std::sort(dist.begin(), dist.end());
        for (double d : dist)
            if (skipped < 2) ++skipped;
            else {
                p.triple_gap = d / (1.0 + std::abs(p.t));
                break;
            }
        fb.points.push_back(p);
    };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double xa = region.x0 + i * dx, ya = region.y0 + j * dy;
            if (i < n && at(i, j) * at(i + 1, j) < 0.0) refine(xa, ya, xa + dx, ya, at(i, j));
            if (j < n && at(i, j) * at(i, j + 1) < 0.0) refine(xa, ya, xa, ya + dy, at(i, j));
        }

    // Newton from every traced point; converged triple roots are deduplicated and classified.
    const double radius = 6.0 * std::hypot(dx, dy);
    for (const auto& p : fb.points) {
        TriplePoint c;
        try {
            c = refine_triple_point(B, p);
        } catch (const std::domain_error&) {
            continue;
        }
        if (!(c.x >= region.x0 && c.x <= region.x1 && c.y >= region.y0 && c.y <= region.y1)) continue;
        const Poly g = monic(characteristic_polynomial(B, c.x, c.y));
        const Poly d1 = pderiv(g), d2 = pderiv(d1);
        const double res = std::abs(peval(g, c.t)) + std::abs(peval(d1, c.t)) + std::abs(peval(d2, c.t));
        if (!(res < 1e-10 * (1.0 + std::abs(c.t)))) continue;
        bool dup = false;
        for (const auto& e : fb.triple_points) dup = dup || std::hypot(e.x - c.x, e.y - c.y) < std::hypot(dx, dy);
        if (dup) continue;
        std::vector<std::array<double, 2>> dirs;
        for (const auto& q : fb.points) {
            const double ddx = q.x - c.x, ddy = q.y - c.y, r = std::hypot(ddx, ddy);
            if (r > 1e-12 && r < radius) dirs.push_back({ddx / r, ddy / r});
        }
        double min_dot = 1.0;
        for (std::size_t a = 0; a < dirs.size(); ++a)
            for (std::size_t b = a + 1; b < dirs.size(); ++b)
                min_dot = std::min(min_dot, dirs[a][0] * dirs[b][0] + dirs[a][1] * dirs[b][1]);
        c.cusp = dirs.size() >= 2 && min_dot > -0.5;
        fb.triple_points.push_back(c);
    }
    return fb;
}

ExponentFit boundary_exponent(const BurgersData& B, const BoundaryPoint& p, double d_min, double d_max, int samples) {
    const double h = 1e-7;
    double nx = (characteristic_discriminant(B, p.x + h, p.y) - characteristic_discriminant(B, p.x - h, p.y)) / (2 * h);
    double ny = (characteristic_discriminant(B, p.x, p.y + h) - characteristic_discriminant(B, p.x, p.y - h)) / (2 * h);
    const double len = std::hypot(nx, ny);
    if (len == 0.0) throw std::domain_error("boundary_exponent: singular boundary point");
    nx /= len;
    ny /= len;
    if (!burgers_solve(B, p.x + d_max * nx, p.y + d_max * ny).liquid) {
        nx = -nx;
        ny = -ny;
    }
    ExponentFit fit;
    for (int k = 0; k < samples; ++k) {
        const double d = d_min * std::pow(d_max / d_min, static_cast<double>(k) / (samples - 1));
        const auto a = burgers_solve(B, p.x + d * nx, p.y + d * ny);
        const auto b = burgers_solve(B, p.x + 2 * d * nx, p.y + 2 * d * ny);
        if (!a.liquid || !b.liquid) continue;
        fit.distances.push_back(d);
        fit.increments.push_back(std::hypot(b.grad[0] - a.grad[0], b.grad[1] - a.grad[1]));
    }
    const std::size_t m = fit.distances.size();
    if (m < 3) throw ConvergenceError("boundary_exponent: too few liquid samples", static_cast<double>(m));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double lx = std::log(fit.distances[k]), ly = std::log(fit.increments[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return fit;
}

std::array<double, 2> Cardioid::at(double t) const {
    const double u = rho * (2.0 * std::cos(t) - std::cos(2.0 * t));
    const double v = rho * (2.0 * std::sin(t) - std::sin(2.0 * t));
    const double c = std::cos(angle), s = std::sin(angle);
    return {X0 + c * u - s * v, Y0 + s * u + c * v};
}

double Cardioid::distance(double X, double Y) const {
    auto d2 = [&](double t) {
        const auto p = at(t);
        return (p[0] - X) * (p[0] - X) + (p[1] - Y) * (p[1] - Y);
    };
    const int n = 720;
    int best = 0;
    double bv = d2(0.0);
    for (int k = 1; k < n; ++k) {
        const double v = d2(2.0 * kPi * k / n);
        if (v < bv) {
            bv = v;
            best = k;
        }
    }
    // Golden-section refinement on the bracketing cell.
    double a = 2.0 * kPi * (best - 1) / n, b = 2.0 * kPi * (best + 1) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
        if (d2(c) < d2(d)) b = d;
        else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return std::sqrt(std::min(bv, d2(0.5 * (a + b))));
}

CardioidFit fit_cardioid(const std::vector<std::array<double, 2>>& points) {
    if (points.size() < 8) throw std::invalid_argument("fit_cardioid: at least eight points required");
    double xmin = points[0][0], xmax = xmin, ymin = points[0][1], ymax = ymin;
    for (const auto& p : points) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    CardioidFit out;
    out.scale = std::hypot(xmax - xmin, ymax - ymin);
    auto residuals = [&](const Eigen::Vector4d& q) {
        const Cardioid c{q(0), q(1), q(2), q(3)};
        Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
        for (std::size_t k = 0; k < points.size(); ++k)
            r(static_cast<Eigen::Index>(k)) = c.distance(points[k][0], points[k][1]);
        return r;
    };
    // Width 4.5 rho along the axis, 3 sqrt(3) rho across it; the cusp side is 3 rho from the centre.
    std::vector<Eigen::Vector4d> starts;
    const double wx = xmax - xmin, wy = ymax - ymin;
    starts.emplace_back(xmin + 3.0 * wx / 4.5, 0.5 * (ymin + ymax), wx / 4.5, 0.0);
    starts.emplace_back(xmax - 3.0 * wx / 4.5, 0.5 * (ymin + ymax), wx / 4.5, kPi);
    starts.emplace_back(0.5 * (xmin + xmax), ymin + 3.0 * wy / 4.5, wy / 4.5, 0.5 * kPi);
    starts.emplace_back(0.5 * (xmin + xmax), ymax - 3.0 * wy / 4.5, wy / 4.5, 1.5 * kPi);
    double best_cost = std::numeric_limits<double>::infinity();
    for (auto q : starts) {
        double mu = 1e-3;
        Eigen::VectorXd r = residuals(q);
        double cost = r.squaredNorm();
        for (int it = 0; it < 100; ++it) {
            Eigen::MatrixXd J(r.size(), 4);
            for (int k = 0; k < 4; ++k) {
                Eigen::Vector4d qp = q;
                const double h = 1e-7 * std::max(1.0, std::abs(q(k)));
                qp(k) += h;
                J.col(k) = (residuals(qp) - r) / h;
            }
            const Eigen::Matrix4d A = J.transpose() * J;
            const Eigen::Vector4d g = J.transpose() * r;
            Eigen::Matrix4d Ad = A;
            Ad.diagonal() *= 1.0 + mu;
            const Eigen::Vector4d step = Ad.ldlt().solve(-g);
            const Eigen::Vector4d qn = q + step;
            const Eigen::VectorXd rn = residuals(qn);
            if (rn.squaredNorm() < cost) {
                q = qn;
                r = rn;
                const double gain = cost - rn.squaredNorm();
                cost = rn.squaredNorm();
                mu = std::max(mu / 3.0, 1e-12);
                if (gain < 1e-30 || step.norm() < 1e-14) break;
            } else {
                mu *= 4.0;
                if (mu > 1e12) break;
            }
        }
        if (cost < best_cost) {
            best_cost = cost;
            out.shape = Cardioid{q(0), q(1), q(2), std::remainder(q(3), 2.0 * kPi)};
            out.max_residual = r.lpNorm<Eigen::Infinity>();
        }
    }
    return out;
}

BurgersData cardioid_configuration(const Cardioid& shape, double c) {
    // Tangent line a X + b Y = 1 at each cardioid point gives the point (a, b) of Q.
    std::vector<std::array<double, 2>> pts;
    const int n = 80;
    for (int k = 1; k < n; ++k) {
        const double t = 2.0 * kPi * k / n;
        const double h = 1e-6;
        const auto p = shape.at(t), pp = shape.at(t + h), pm = shape.at(t - h);
        const double tx = pp[0] - pm[0], ty = pp[1] - pm[1];
        const double den = p[0] * ty - p[1] * tx;
        if (std::abs(den) < 1e-3 * std::hypot(tx, ty) * std::hypot(p[0], p[1])) continue;
        pts.push_back({ty / den, -tx / den});
    }
    // Implicit cubic through the dual points: null vector of the monomial matrix.
    std::vector<std::array<int, 2>> exps;
    for (int d = 0; d <= 3; ++d)
        for (int i = d; i >= 0; --i) exps.push_back({i, d - i});
    Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(exps.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
        Eigen::VectorXd row(static_cast<Eigen::Index>(exps.size()));
        for (std::size_t k = 0; k < exps.size(); ++k)
            row(static_cast<Eigen::Index>(k)) = std::pow(pts[r][0], exps[k][0]) * std::pow(pts[r][1], exps[k][1]);
        M.row(static_cast<Eigen::Index>(r)) = row.transpose() / row.norm();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd q = svd.matrixV().col(static_cast<Eigen::Index>(exps.size()) - 1);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-8 * sv(0))
        throw ConvergenceError("cardioid_configuration: dual points do not lie on a cubic", sv(sv.size() - 1) / sv(0));
    const double mx = q.lpNorm<Eigen::Infinity>();
    std::vector<Monomial> mono;
    for (std::size_t k = 0; k < exps.size(); ++k) {
        const double v = q(static_cast<Eigen::Index>(k)) / mx;
        if (std::abs(v) > 1e-13) mono.push_back({exps[k][0], exps[k][1], v});
    }
    return BurgersData{PlaneCurve::line(), PlaneCurve(mono), c};
}

HeightField height_reconstruct(const Region& region, int nx, int ny, std::vector<std::array<double, 2>> grad,
                               std::vector<bool> liquid, double curl_tol) {
    const auto N = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    if (nx < 2 || ny < 2 || grad.size() != N || liquid.size() != N)
        throw std::invalid_argument("height_reconstruct: grid size mismatch");
    HeightField f;
    f.region = region;
    f.nx = nx;
    f.ny = ny;
    const double dx = (region.x1 - region.x0) / (nx - 1), dy = (region.y1 - region.y0) / (ny - 1);
    auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); };

    // Frozen nodes: breadth-first nearest liquid node, snapped to a vertex of the triangle.
    std::vector<int> src(N, -1);
    std::queue<std::size_t> bfs;
    for (std::size_t k = 0; k < N; ++k)
        if (liquid[k]) {
            src[k] = static_cast<int>(k);
            bfs.push(k);
        }
    while (!bfs.empty()) {
        const auto k = bfs.front();
        bfs.pop();
        const int i = static_cast<int>(k % static_cast<std::size_t>(nx)), j = static_cast<int>(k / static_cast<std::size_t>(nx));
        const std::array<std::array<int, 2>, 4> nb{{{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
        for (const auto& [a, b] : nb) {
            if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
            const auto q = idx(a, b);
            if (src[q] >= 0) continue;
            src[q] = src[k];
            bfs.push(q);
        }
    }
    const std::array<std::array<double, 2>, 3> verts{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    for (std::size_t k = 0; k < N; ++k) {
        if (liquid[k] || src[k] < 0) continue;
        const auto& g = grad[static_cast<std::size_t>(src[k])];
        std::size_t best = 0;
        for (std::size_t v = 1; v < 3; ++v)
            if (std::hypot(g[0] - verts[v][0], g[1] - verts[v][1]) <
                std::hypot(g[0] - verts[best][0], g[1] - verts[best][1]))
                best = v;
        grad[k] = verts[best];
    }

    f.h.assign(N, 0.0);
    for (int i = 1; i < nx; ++i) f.h[idx(i, 0)] = f.h[idx(i - 1, 0)] + 0.5 * dx * (grad[idx(i - 1, 0)][0] + grad[idx(i, 0)][0]);
    for (int i = 0; i < nx; ++i)
        for (int j = 1; j < ny; ++j)
            f.h[idx(i, j)] = f.h[idx(i, j - 1)] + 0.5 * dy * (grad[idx(i, j - 1)][1] + grad[idx(i, j)][1]);

    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const auto a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
            if (!(liquid[a] && liquid[b] && liquid[c] && liquid[d])) continue;
            const double circ = 0.5 * dx * (grad[a][0] + grad[b][0]) + 0.5 * dy * (grad[b][1] + grad[c][1]) -
                                0.5 * dx * (grad[d][0] + grad[c][0]) - 0.5 * dy * (grad[a][1] + grad[d][1]);
            f.curl_residual = std::max(f.curl_residual, std::abs(circ) / (dx * dy));
        }
    f.grad = std::move(grad);
    f.liquid = std::move(liquid);
    if (f.curl_residual > curl_tol)
        throw ConvergenceError(fmt::format("height_reconstruct: curl residual {:.3e} above tolerance", f.curl_residual),
                               f.curl_residual);
    return f;
}

HeightField burgers_height(const BurgersData& B, const Region& region, int nx, int ny, double curl_tol, int threads) {
    const auto N = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    std::vector<std::array<double, 2>> grad(N);
    std::vector<char> liq(N, 0);
    const double dx = (region.x1 - region.x0) / (nx - 1), dy = (region.y1 - region.y0) / (ny - 1);
    auto rows = [&](int j0, int stride) {
        for (int j = j0; j < ny; j += stride)
            for (int i = 0; i < nx; ++i) {
                const auto p = burgers_solve(B, region.x0 + i * dx, region.y0 + j * dy);
                const auto k = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
                liq[k] = p.liquid ? 1 : 0;
                grad[k] = p.grad;
            }
    };
    const int T = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < T; ++t) pool.emplace_back(rows, t, T);
    rows(0, T);
    for (auto& th : pool) th.join();
    return height_reconstruct(region, nx, ny, std::move(grad), std::vector<bool>(liq.begin(), liq.end()), curl_tol);
}

}  // namespace nekpart

#include "nekpart/swcurve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

namespace nekpart {

namespace {

constexpr int kMinNodes = 32;
constexpr int kMaxNodes = 8192;

double lambda_r(const SWCurve& C) { return std::pow(C.lambda_scale, C.r()); }

// Product of |x - e_j| over all endpoints except indices skip0 and skip1.
double others_product(const std::vector<double>& e, double x, std::size_t skip0, std::size_t skip1) {
    double p = 1.0;
    for (std::size_t j = 0; j < e.size(); ++j)
        if (j != skip0 && j != skip1) p *= std::abs(x - e[j]);
    return p;
}

// Gauss-Legendre on [0, pi] with node doubling until successive values agree.
template <class F>
double integrate_phi(F&& f, double tol, QuadratureReport* report) {
    auto rule_value = [&](int n) {
        const auto rule = gauss_legendre(n);
        std::vector<double> terms(rule.nodes.size());
        for (std::size_t k = 0; k < terms.size(); ++k)
            terms[k] = rule.weights[k] * f(0.5 * kPi * (rule.nodes[k] + 1.0));
        return 0.5 * kPi * pairwise_sum(terms);
    };
    int n = kMinNodes;
    double prev = rule_value(n), change = 0.0;
    while (n < kMaxNodes) {
        n *= 2;
        const double cur = rule_value(n);
        change = std::abs(cur - prev);
        prev = cur;
        if (change <= tol * (1.0 + std::abs(cur))) break;
    }
    if (change > 1e3 * tol * (1.0 + std::abs(prev)))
        throw ConvergenceError("period quadrature did not converge", change);
    if (report) {
        report->nodes = std::max(report->nodes, n);
        report->change = std::max(report->change, change);
    }
    return prev;
}

std::vector<double> expand_roots(const std::vector<double>& roots) {
    std::vector<double> c{1.0};
    for (double a : roots) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= a * c[i];
        }
        c = std::move(next);
    }
    return c;
}

bool is_maximal(const SWCurve& C) {
    try {
        band_gap(C);
        return true;
    } catch (const NotMaximal&) {
        return false;
    }
}

using VecMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Eigen::MatrixXd fd_jacobian(const VecMap& f, const Eigen::VectorXd& x, double step) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd J(f0.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = step * (1.0 + std::abs(x(j)));
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

// Damped Newton for f(x) = target; f throws NotMaximal outside the admissible set.
bool newton_solve(const VecMap& f, const Eigen::VectorXd& target, Eigen::VectorXd& x, const FitOptions& opt,
                  double& residual) {
    Eigen::VectorXd fx = f(x);
    residual = (fx - target).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opt.max_iter && residual > opt.tol * scale; ++it) {
        const Eigen::MatrixXd J = fd_jacobian(f, x, opt.fd_step);
        const Eigen::VectorXd dx = J.colPivHouseholderQr().solve(target - fx);
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, t *= 0.5) {
            const Eigen::VectorXd xn = x + t * dx;
            try {
                const Eigen::VectorXd fn = f(xn);
                const double rn = (fn - target).lpNorm<Eigen::Infinity>();
                if (rn < residual || rn <= opt.tol * scale) {
                    x = xn;
                    fx = fn;
                    residual = rn;
                    accepted = true;
                    break;
                }
            } catch (const NotMaximal&) {
            }
        }
        if (!accepted) return false;
    }
    return residual <= opt.tol * scale;
}

// Homotopy from f(x0) to target with adaptive step; x0 must be admissible.
Eigen::VectorXd continuation_solve(const VecMap& f, const Eigen::VectorXd& target, Eigen::VectorXd x,
                                   const FitOptions& opt) {
    const Eigen::VectorXd start = f(x);
    double t = 0.0, dt = 1.0, residual = 0.0;
    FitOptions loose = opt;
    loose.tol = std::max(opt.tol, 1e-6);
    while (t < 1.0) {
        const double tn = std::min(1.0, t + dt);
        Eigen::VectorXd trial = x;
        const Eigen::VectorXd goal = start + tn * (target - start);
        if (newton_solve(f, goal, trial, tn < 1.0 ? loose : opt, residual)) {
            x = trial;
            t = tn;
            dt = std::min(1.0, 2.0 * dt);
        } else {
            dt *= 0.5;
            if (dt < 1e-6) throw ConvergenceError("curve fit: continuation stalled", residual);
        }
    }
    return x;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Initial curve with roots at s * a, s grown until maximal.
SWCurve seed_curve(std::vector<double> roots, double lambda_scale) {
    double mean = 0.0;
    for (double v : roots) mean += v;
    mean /= static_cast<double>(roots.size());
    for (double& v : roots) v -= mean;
    for (double s = 1.0; s < 1e6; s *= 1.5) {
        std::vector<double> scaled = roots;
        for (double& v : scaled) v *= s;
        const auto c = expand_roots(scaled);
        SWCurve C{c, lambda_scale};
        C.coeffs[1] = 0.0;
        if (is_maximal(C)) return C;
    }
    throw ConvergenceError("curve fit: could not find a maximal starting curve", 0.0);
}

}  // namespace

void SWCurve::validate() const {
    if (coeffs.size() < 2) throw std::invalid_argument("SWCurve: degree must be at least 1");
    if (coeffs[0] != 1.0) throw std::invalid_argument("SWCurve: P must be monic");
    if (coeffs.size() > 2 && coeffs[1] != 0.0)
        throw std::invalid_argument("SWCurve: subleading coefficient must be zero");
    if (coeffs.size() == 2 && coeffs[1] != 0.0) throw std::invalid_argument("SWCurve: r = 1 requires P = z");
    if (!(lambda_scale > 0.0)) throw std::invalid_argument("SWCurve: Lambda must be positive");
}

SWCurve SWCurve::from_free(const std::vector<double>& free, double lambda_scale) {
    SWCurve C;
    C.coeffs = {1.0, 0.0};
    C.coeffs.insert(C.coeffs.end(), free.begin(), free.end());
    C.lambda_scale = lambda_scale;
    return C;
}

std::vector<double> SWCurve::free_coeffs() const { return {coeffs.begin() + 2, coeffs.end()}; }

std::pair<double, double> BandGapStructure::band(int i) const {
    return {endpoints[static_cast<std::size_t>(2 * i)], endpoints[static_cast<std::size_t>(2 * i + 1)]};
}

std::pair<double, double> BandGapStructure::gap(int i) const {
    return {endpoints[static_cast<std::size_t>(2 * i + 1)], endpoints[static_cast<std::size_t>(2 * i + 2)]};
}

BandGapStructure band_gap(const SWCurve& C, double tol) {
    C.validate();
    const double L = lambda_r(C);
    std::vector<cplx> all;
    for (double sign : {1.0, -1.0}) {
        auto c = C.coeffs;
        c.back() -= sign * 2.0 * L;
        const auto roots = polynomial_roots(std::span<const double>(c));
        all.insert(all.end(), roots.begin(), roots.end());
    }
    double scale = 1.0;
    for (const auto& z : all) scale = std::max(scale, std::abs(z));
    BandGapStructure bg;
    for (const auto& z : all) {
        if (std::abs(z.imag()) > tol * scale)
            throw NotMaximal(fmt::format("band_gap: non-real branch point {}{:+}i", z.real(), z.imag()), all);
        bg.endpoints.push_back(z.real());
    }
    std::sort(bg.endpoints.begin(), bg.endpoints.end());
    for (std::size_t j = 1; j < bg.endpoints.size(); ++j)
        if (bg.endpoints[j] - bg.endpoints[j - 1] <= tol * scale)
            throw NotMaximal("band_gap: repeated branch point", all);
    bg.maximal = true;
    return bg;
}

cplx w_branch(cplx z, const SWCurve& C) {
    const double L = lambda_r(C);
    const cplx P = poly_eval(std::span<const cplx>(std::vector<cplx>(C.coeffs.begin(), C.coeffs.end())), z);
    if (z.imag() == 0.0) {
        const double c = P.real() / (2.0 * L);
        if (std::abs(c) <= 1.0) {
            const double dP = poly_eval(std::span<const double>(poly_derivative(C.coeffs)), z.real());
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            return {c, dP >= 0.0 ? -s : s};
        }
    }
    const cplx disc = std::sqrt(P * P - 4.0 * L * L);
    const cplx big1 = (P + disc) / (2.0 * L), big2 = (P - disc) / (2.0 * L);
    const cplx big = std::abs(big1) >= std::abs(big2) ? big1 : big2;
    return 1.0 / big;
}

std::vector<double> periods_a(const SWCurve& C, double tol, QuadratureReport* report) {
    const auto bg = band_gap(C);
    const int r = C.r();
    const auto dP = poly_derivative(C.coeffs);
    std::vector<double> a(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        const auto [lo, hi] = bg.band(i);
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        auto f = [&](double phi) {
            const double x = m + h * std::cos(phi);
            const double g = std::abs(poly_eval(std::span<const double>(dP), x));
            return x * g / std::sqrt(others_product(bg.endpoints, x, static_cast<std::size_t>(2 * i),
                                                    static_cast<std::size_t>(2 * i + 1)));
        };
        a[static_cast<std::size_t>(i)] = integrate_phi(f, tol, report) / kPi;
    }
    return a;
}

std::vector<double> dual_gap_differences(const SWCurve& C, double tol, QuadratureReport* report) {
    const auto bg = band_gap(C);
    const int r = C.r();
    const double L = lambda_r(C);
    std::vector<double> d;
    for (int i = 0; i + 1 < r; ++i) {
        const auto [lo, hi] = bg.gap(i);
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        auto f = [&](double phi) {
            const double x = m + h * std::cos(phi);
            const double sinp = std::sin(phi);
            // sqrt(P^2/4L^2 - 1) as a product, exact near the gap ends.
            const double s = h * sinp *
                             std::sqrt(others_product(bg.endpoints, x, static_cast<std::size_t>(2 * i + 1),
                                                      static_cast<std::size_t>(2 * i + 2))) /
                             (2.0 * L);
            return std::asinh(s) * h * sinp;
        };
        d.push_back(2.0 * integrate_phi(f, tol, report));
    }
    return d;
}

std::vector<double> a_dual_from_differences(const std::vector<double>& diffs) {
    const auto r = static_cast<int>(diffs.size()) + 1;
    double first = 0.0;
    for (int i = 0; i + 1 < r; ++i) first += (r - 1 - i) * diffs[static_cast<std::size_t>(i)];
    first /= r;
    std::vector<double> ad{first};
    for (double d : diffs) ad.push_back(ad.back() - d);
    return ad;
}

std::vector<double> periods_a_dual(const SWCurve& C, double tol) {
    return a_dual_from_differences(dual_gap_differences(C, tol));
}

SWCurve fit_curve_from_a(const std::vector<double>& a_target, double lambda_scale, const FitOptions& opt) {
    const int r = static_cast<int>(a_target.size());
    if (r < 1) throw std::invalid_argument("fit_curve_from_a: empty target");
    if (r == 1) return SWCurve{{1.0, 0.0}, lambda_scale};
    std::vector<double> sorted = a_target;
    std::sort(sorted.begin(), sorted.end());
    const SWCurve seed = seed_curve(sorted, lambda_scale);
    VecMap f = [&](const Eigen::VectorXd& c) {
        const auto a = periods_a(SWCurve::from_free(to_std(c), lambda_scale));
        return Eigen::VectorXd(to_eigen(a).head(r - 1));
    };
    const Eigen::VectorXd target = to_eigen(a_target).head(r - 1);
    const auto c = continuation_solve(f, target, to_eigen(seed.free_coeffs()), opt);
    return SWCurve::from_free(to_std(c), lambda_scale);
}

SWCurve fit_curve_from_xi(const std::vector<double>& xi, double lambda_scale, const FitOptions& opt) {
    const int r = static_cast<int>(xi.size());
    if (r < 1) throw std::invalid_argument("fit_curve_from_xi: empty xi");
    if (r == 1) return SWCurve{{1.0, 0.0}, lambda_scale};
    Eigen::VectorXd target(r - 1);
    for (int i = 0; i + 1 < r; ++i) {
        target(i) = r * (xi[static_cast<std::size_t>(i + 1)] - xi[static_cast<std::size_t>(i)]);
        if (!(target(i) > 0.0))
            throw std::invalid_argument("fit_curve_from_xi: xi must be strictly increasing (chamber interior)");
    }
    std::vector<double> roots;
    for (int i = 0; i < r; ++i) roots.push_back(lambda_scale * (2.0 * i - (r - 1)));
    const SWCurve seed = seed_curve(roots, lambda_scale);
    VecMap f = [&](const Eigen::VectorXd& c) {
        return to_eigen(dual_gap_differences(SWCurve::from_free(to_std(c), lambda_scale)));
    };
    const auto c = continuation_solve(f, target, to_eigen(seed.free_coeffs()), opt);
    return SWCurve::from_free(to_std(c), lambda_scale);
}

double prepotential_asymptotic(const std::vector<double>& a, double lambda_scale) {
    const auto r = a.size();
    double F = 0.0;
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t l = k + 1; l < r; ++l) {
            const double d = a[k] - a[l];
            F += d * d * std::log(std::abs(d) / lambda_scale) - 1.5 * d * d;
        }
    double inst = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        double p = 1.0;
        for (std::size_t l = 0; l < r; ++l)
            if (l != k) p *= (a[k] - a[l]) * (a[k] - a[l]);
        inst += 1.0 / p;
    }
    return F - std::pow(lambda_scale, 2.0 * static_cast<double>(r)) * inst;
}

PrepotentialReference default_reference(const std::vector<double>& a, double lambda_scale) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t l = k + 1; l < a.size(); ++l) gap = std::min(gap, std::abs(a[k] - a[l]));
    PrepotentialReference ref;
    const double s = a.size() < 2 ? 1.0 : std::max(1.0, 10.0 * lambda_scale / gap);
    for (double v : a) ref.a.push_back(s * v);
    ref.value = prepotential_asymptotic(ref.a, lambda_scale);
    return ref;
}

double prepotential(const std::vector<double>& a_target, double lambda_scale, const PrepotentialReference& ref,
                    int nodes) {
    if (ref.a.size() != a_target.size()) throw std::invalid_argument("prepotential: rank mismatch");
    const auto rule = gauss_legendre(nodes);
    std::vector<double> terms;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        std::vector<double> a(a_target.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = ref.a[i] + t * (a_target[i] - ref.a[i]);
        const auto ad = periods_a_dual(fit_curve_from_a(a, lambda_scale));
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += ad[i] * (a_target[i] - ref.a[i]);
        terms.push_back(0.5 * rule.weights[q] * dot);
    }
    return ref.value - pairwise_sum(terms);
}

HessianReport prepotential_hessian(const SWCurve& C, double step) {
    const int r = C.r();
    const auto n = static_cast<Eigen::Index>(r - 1);
    const double L = C.lambda_scale;
    VecMap fa = [&](const Eigen::VectorXd& c) {
        return Eigen::VectorXd(to_eigen(periods_a(SWCurve::from_free(to_std(c), L))).head(n));
    };
    VecMap fd = [&](const Eigen::VectorXd& c) {
        const auto ad = periods_a_dual(SWCurve::from_free(to_std(c), L));
        Eigen::VectorXd out(n);
        for (Eigen::Index j = 0; j < n; ++j) out(j) = ad[static_cast<std::size_t>(j)] - ad.back();
        return out;
    };
    const Eigen::VectorXd c0 = to_eigen(C.free_coeffs());
    const Eigen::MatrixXd Ja = fd_jacobian(fa, c0, step);
    const Eigen::MatrixXd Jd = fd_jacobian(fd, c0, step);
    HessianReport rep;
    rep.hessian = -Jd * Ja.inverse();
    rep.asymmetry = (rep.hessian - rep.hessian.transpose()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd sym = 0.5 * (rep.hessian + rep.hessian.transpose());
    rep.eigenvalues = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues();
    return rep;
}

HessianReport prepotential_hessian(const std::vector<double>& a_target, double lambda_scale, double step) {
    return prepotential_hessian(fit_curve_from_a(a_target, lambda_scale), step);
}

}  // namespace nekpart

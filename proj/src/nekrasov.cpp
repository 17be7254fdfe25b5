#include "nekpart/nekrasov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace nekpart {

namespace {

using Laurent = std::map<int, long>;

void add_to(Laurent& p, int m, long c) {
    auto& v = p[m];
    v += c;
    if (v == 0) p.erase(m);
}

// p / (q - 1); p(1) must vanish.
Laurent divide_q_minus_one(const Laurent& p) {
    Laurent out;
    if (p.empty()) return out;
    long b = 0;
    const int lo = p.begin()->first, hi = p.rbegin()->first;
    for (int m = lo; m < hi; ++m) {
        const auto it = p.find(m);
        b -= (it == p.end() ? 0 : it->second);
        if (b != 0) out[m] = b;
    }
    long total = 0;
    for (const auto& [m, c] : p) total += c;
    if (total != 0) throw std::logic_error("tangent_character: numerator does not vanish at q = 1");
    return out;
}

// Particles above the vacuum count +1, holes -1; exponents are x - 1/2.
Laurent particle_hole(const Partition& lam) {
    Laurent d;
    const int depth = lam.length();
    for (int j = 1; j <= depth; ++j) {
        add_to(d, lam[j - 1] - j, +1);
        add_to(d, -j, -1);
    }
    return d;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    const auto t = static_cast<std::size_t>(std::max(1, threads));
    if (t == 1 || n < 2 * t) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Z is symmetric in a and even in eps; canonical inputs make both symmetries bit-exact.
GaugeParams canonical(const GaugeParams& g) {
    GaugeParams c = g;
    c.epsilon = std::abs(g.epsilon);
    std::sort(c.a.begin(), c.a.end());
    return c;
}

}  // namespace

double GaugeParams::beta() const { return -r() * std::log(lambda_scale) / (4.0 * kPi * kPi); }

void GaugeParams::validate(double margin) const {
    if (a.empty()) throw std::invalid_argument("GaugeParams: a is empty");
    if (epsilon == 0.0) throw std::invalid_argument("GaugeParams: eps = 0");
    if (!(lambda_scale >= 0.0)) throw std::invalid_argument("GaugeParams: Lambda must be nonnegative");
    double s = 0.0, scale = 1.0;
    for (double v : a) {
        s += v;
        scale = std::max(scale, std::abs(v));
    }
    if (std::abs(s) > 1e-12 * scale * r()) throw std::invalid_argument("GaugeParams: sum(a) != 0");
    for (int i = 0; i < r(); ++i)
        for (int j = i + 1; j < r(); ++j) {
            const double x = (a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)]) / epsilon;
            if (std::abs(x - std::round(x)) <= margin)
                throw PoleError(fmt::format("pole: a_{} - a_{} = {} eps", i + 1, j + 1, x), i, j);
        }
}

int PartitionTuple::total_size() const {
    int n = 0;
    for (const auto& p : parts) n += p.size();
    return n;
}

std::vector<PartitionTuple> tuples_of_size(int r, int n) {
    std::vector<PartitionTuple> out;
    if (r <= 0 || n < 0) return out;
    if (r == 1) {
        for (auto& p : partitions_of(n)) out.push_back({{std::move(p)}});
        return out;
    }
    for (int m = n; m >= 0; --m) {
        const auto head = partitions_of(m);
        const auto tails = tuples_of_size(r - 1, n - m);
        for (const auto& h : head)
            for (const auto& t : tails) {
                PartitionTuple f;
                f.parts.reserve(static_cast<std::size_t>(r));
                f.parts.push_back(h);
                f.parts.insert(f.parts.end(), t.parts.begin(), t.parts.end());
                out.push_back(std::move(f));
            }
    }
    return out;
}

std::vector<CharacterTerm> tangent_character(const PartitionTuple& F) {
    const int r = static_cast<int>(F.parts.size());
    std::vector<Laurent> d(static_cast<std::size_t>(r)), e(static_cast<std::size_t>(r));
    for (int k = 0; k < r; ++k) {
        d[static_cast<std::size_t>(k)] = particle_hole(F.parts[static_cast<std::size_t>(k)]);
        for (const auto& [m, c] : d[static_cast<std::size_t>(k)]) e[static_cast<std::size_t>(k)][-m] = c;
    }
    std::vector<CharacterTerm> out;
    for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
            const auto& dk = d[static_cast<std::size_t>(k)];
            const auto& el = e[static_cast<std::size_t>(l)];
            Laurent num = el;
            for (const auto& [m, c] : dk) add_to(num, m + 1, -c);
            Laurent t = divide_q_minus_one(num);
            for (const auto& [m1, c1] : dk)
                for (const auto& [m2, c2] : el) add_to(t, m1 + m2, c1 * c2);
            for (const auto& [m, c] : t) out.push_back({k, l, m, -c});
        }
    return out;
}

double tangent_weight(const PartitionTuple& F, const GaugeParams& g) {
    if (static_cast<int>(F.parts.size()) != g.r()) throw std::invalid_argument("tangent_weight: rank mismatch");
    double det = 1.0;
    for (const auto& t : tangent_character(F)) {
        const double w = g.a[static_cast<std::size_t>(t.k)] - g.a[static_cast<std::size_t>(t.l)] + t.m * g.epsilon;
        if (w == 0.0) throw PoleError(fmt::format("tangent_weight: zero weight for pair ({}, {})", t.k + 1, t.l + 1),
                                      t.k, t.l);
        // The determinant is positive, so the sign (-1)^{rn} of the raw product is dropped.
        det *= std::pow(std::abs(w), static_cast<double>(t.coeff));
    }
    return det;
}

Rational tangent_weight_exact(const PartitionTuple& F, const Rational& eps, const std::vector<Rational>& a) {
    if (F.parts.size() != a.size()) throw std::invalid_argument("tangent_weight_exact: rank mismatch");
    Rational det = 1;
    for (const auto& t : tangent_character(F)) {
        Rational w = a[static_cast<std::size_t>(t.k)] - a[static_cast<std::size_t>(t.l)] + t.m * eps;
        if (w == 0) throw PoleError("tangent_weight_exact: zero weight", t.k, t.l);
        if (w < 0) w = -w;
        for (long c = 0; c < t.coeff; ++c) det *= w;
        for (long c = 0; c < -t.coeff; ++c) det /= w;
    }
    return det;
}

double instanton_coefficient(int n, const GaugeParams& g, int threads) {
    if (n < 0) throw std::invalid_argument("instanton_coefficient: n < 0");
    const auto c = canonical(g);
    c.validate();
    const auto tuples = tuples_of_size(c.r(), n);
    std::vector<double> terms(tuples.size());
    parallel_for(tuples.size(), threads, [&](std::size_t i) { terms[i] = 1.0 / tangent_weight(tuples[i], c); });
    return pairwise_sum(terms);
}

Rational instanton_coefficient_exact(int n, const Rational& eps, const std::vector<Rational>& a) {
    Rational s = 0;
    for (const auto& f : tuples_of_size(static_cast<int>(a.size()), n)) s += 1 / tangent_weight_exact(f, eps, a);
    return s;
}

ZInstResult z_inst(const GaugeParams& g, int n_max, int threads) {
    ZInstResult res;
    const auto c = canonical(g);
    c.validate();
    const double step = std::pow(c.lambda_scale, 2 * c.r());
    std::vector<double> terms;
    double scale = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        const double coeff = instanton_coefficient(n, c, threads);
        res.coefficients.push_back(coeff);
        terms.push_back(scale * coeff);
        scale *= step;
    }
    res.value = pairwise_sum(terms);
    res.last_term = std::abs(terms.back());
    return res;
}

cplx log_z_pert(const GaugeParams& g) {
    const auto c = canonical(g);
    c.validate();
    const cplx log_m = std::log(cplx(0.0, c.epsilon / c.lambda_scale));
    cplx total = 0.0;
    for (double ak : c.a)
        for (double al : c.a) {
            const double x = (ak - al) / c.epsilon;
            total += (0.5 * x * x - 1.0 / 12.0) * log_m + log_gamma2_unit(x);
        }
    return -total;
}

ZFullResult z_full(const GaugeParams& g, int n_max, int threads) {
    ZFullResult res;
    res.log_z_pert = log_z_pert(g);
    res.inst = z_inst(g, n_max, threads);
    res.log_z = res.log_z_pert + std::log(cplx(res.inst.value, 0.0));
    return res;
}

Extrapolation richardson(const std::vector<double>& h, const std::vector<double>& f,
                         const std::vector<double>& exponents) {
    if (h.size() != f.size() || h.size() < exponents.size() + 1)
        throw std::invalid_argument("richardson: need at least one more point than exponents");
    Extrapolation out;
    out.raw = f;
    auto solve = [&](std::size_t first, std::size_t nexp) {
        const auto n = static_cast<Eigen::Index>(nexp + 1);
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto idx = first + static_cast<std::size_t>(i);
            A(i, 0) = 1.0;
            for (Eigen::Index j = 1; j < n; ++j) A(i, j) = std::pow(h[idx], exponents[static_cast<std::size_t>(j - 1)]);
            b(i) = f[idx];
        }
        return A.colPivHouseholderQr().solve(b)(0);
    };
    const std::size_t p = exponents.size();
    const std::size_t first = h.size() - (p + 1);
    out.value = solve(first, p);
    if (p == 0) {
        out.error = h.size() > 1 ? std::abs(f.back() - f[f.size() - 2]) : 0.0;
    } else {
        out.error = std::abs(out.value - solve(first + 1, p - 1));
    }
    for (std::size_t i = 2; i < f.size(); ++i)
        if (std::abs(f[i] - f[i - 1]) > std::abs(f[i - 1] - f[i - 2])) out.monotone = false;
    return out;
}

Extrapolation free_energy_estimate(const std::vector<double>& a, double lambda_scale,
                                   const std::vector<double>& eps_sequence, const std::vector<int>& n_max_sequence,
                                   const std::vector<double>& exponents, int threads) {
    if (eps_sequence.size() != n_max_sequence.size())
        throw std::invalid_argument("free_energy_estimate: eps and n_max sequences differ in length");
    std::vector<double> h, f;
    for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
        const double eps = eps_sequence[i];
        const auto z = z_full({eps, a, lambda_scale}, n_max_sequence[i], threads);
        h.push_back(std::abs(eps));
        f.push_back(-eps * eps * z.log_z.real());
    }
    return richardson(h, f, exponents);
}

Extrapolation free_energy_gradient(const std::vector<double>& a, double lambda_scale, int i,
                                   const std::vector<double>& eps_sequence, const std::vector<int>& n_max_sequence,
                                   double h, const std::vector<double>& exponents, int threads) {
    if (i < 0 || i + 1 >= static_cast<int>(a.size())) throw std::invalid_argument("free_energy_gradient: bad index");
    if (eps_sequence.size() != n_max_sequence.size())
        throw std::invalid_argument("free_energy_gradient: eps and n_max sequences differ in length");
    auto shifted = [&](double t) {
        auto b = a;
        b[static_cast<std::size_t>(i)] += t;
        b[static_cast<std::size_t>(i + 1)] -= t;
        return b;
    };
    const auto ap = shifted(h), am = shifted(-h);
    std::vector<double> hs, f;
    for (std::size_t k = 0; k < eps_sequence.size(); ++k) {
        const double eps = eps_sequence[k];
        const int nmax = n_max_sequence[k];
        const double fp = -eps * eps * z_full({eps, ap, lambda_scale}, nmax, threads).log_z.real();
        const double fm = -eps * eps * z_full({eps, am, lambda_scale}, nmax, threads).log_z.real();
        hs.push_back(std::abs(eps));
        f.push_back((fp - fm) / (2.0 * h));
    }
    return richardson(hs, f, exponents);
}

DualZResult dual_z_partitions(const PeriodicPotential& V, double eps, double lambda_scale, int size_max) {
    if (!(eps > 0.0)) throw std::invalid_argument("dual_z_partitions: eps must be positive");
    const double log_ratio = std::log(std::abs(lambda_scale / eps));
    std::vector<double> shells;
    for (int n = 0; n <= size_max; ++n) {
        std::vector<double> terms;
        for (const auto& lam : partitions_of(n)) {
            const double log_h = std::log(static_cast<double>(hook_product(lam)));
            terms.push_back(std::exp((2.0 * n - 1.0 / 12.0) * log_ratio - 2.0 * log_h +
                                     potential_energy(lam, V) / eps));
        }
        shells.push_back(pairwise_sum(terms));
    }
    const cplx prefactor = std::exp(cplx(kZetaPrimeMinus1, kPi / 24.0));
    DualZResult res;
    res.value = prefactor * pairwise_sum(shells);
    res.tail = std::abs(prefactor) * shells.back();
    return res;
}

DualZResult dual_z_lattice(const PeriodicPotential& V, double eps, double lambda_scale, int lattice_radius,
                           int n_max, int threads) {
    if (!(eps > 0.0)) throw std::invalid_argument("dual_z_lattice: eps must be positive");
    const int r = V.r();
    // Integer vectors with zero sum and entries in [-R, R], lexicographic.
    std::vector<std::vector<int>> points;
    std::vector<int> cur(static_cast<std::size_t>(r), -lattice_radius);
    const std::function<void(int, int)> rec = [&](int k, int sum) {
        if (k == r - 1) {
            if (std::abs(sum) <= lattice_radius) {
                cur[static_cast<std::size_t>(k)] = -sum;
                points.push_back(cur);
            }
            return;
        }
        for (int v = -lattice_radius; v <= lattice_radius; ++v) {
            cur[static_cast<std::size_t>(k)] = v;
            rec(k + 1, sum + v);
        }
    };
    rec(0, 0);

    DualZResult res;
    std::vector<double> re, im;
    for (const auto& n : points) {
        std::vector<double> a(static_cast<std::size_t>(r));
        double pairing = 0.0;
        for (int k = 0; k < r; ++k) {
            const double rho = 0.5 * (r + 1) - (k + 1);
            a[static_cast<std::size_t>(k)] = eps * (rho + r * n[static_cast<std::size_t>(k)]);
            pairing += V.xi()[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
        }
        cplx term;
        try {
            const auto z = z_full({r * eps, a, lambda_scale}, n_max, threads);
            term = std::exp(pairing / (r * eps * eps) + z.log_z);
        } catch (const PoleError&) {
            ++res.skipped;
            continue;
        }
        re.push_back(term.real());
        im.push_back(term.imag());
        const int shell = *std::max_element(n.begin(), n.end(), [](int x, int y) { return std::abs(x) < std::abs(y); });
        if (std::abs(shell) == lattice_radius) res.tail = std::max(res.tail, std::abs(term));
    }
    res.value = cplx(pairwise_sum(re), pairwise_sum(im));
    return res;
}

}  // namespace nekpart

#include "nekpart/barnes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace nekpart {

namespace {

constexpr int kSeriesTerms = 40;

cplx checked_log_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw PoleError(fmt::format("log_gamma2: argument hits the pole lattice (w/c = {})", z.real()));
    return log_gamma(z);
}

// e^{-wt}/((1 - e^{-c1 t})(1 - e^{-c2 t})) for t > 0, c1, c2 > 0.
cplx barnes_kernel(cplx w, double c1, double c2, double t) {
    return std::exp(-w * t) / (-std::expm1(-c1 * t) * -std::expm1(-c2 * t));
}

// zeta_2'(0; w | c1, c2) by direct quadrature; assumes c1, c2 > 0 and Re w comparable to c.
cplx zeta2_prime_direct(cplx w, double c1, double c2, double tol) {
    const auto bern = bernoulli_generating_coeffs(kSeriesTerms);
    std::vector<cplx> expw(kSeriesTerms);
    expw[0] = 1.0;
    for (int n = 1; n < kSeriesTerms; ++n) expw[static_cast<std::size_t>(n)] = expw[static_cast<std::size_t>(n - 1)] * (-w) / static_cast<double>(n);
    std::vector<double> e12(kSeriesTerms, 0.0);
    for (int n = 0; n < kSeriesTerms; ++n)
        for (int k = 0; k <= n; ++k)
            e12[static_cast<std::size_t>(n)] += bern[static_cast<std::size_t>(k)] * std::pow(c1, k) *
                                                bern[static_cast<std::size_t>(n - k)] * std::pow(c2, n - k);
    std::vector<cplx> s(kSeriesTerms, 0.0);
    for (int n = 0; n < kSeriesTerms; ++n)
        for (int k = 0; k <= n; ++k)
            s[static_cast<std::size_t>(n)] += expw[static_cast<std::size_t>(k)] * e12[static_cast<std::size_t>(n - k)];
    const double cc = c1 * c2;
    const cplx bm2 = s[0] / cc, bm1 = s[1] / cc, b0 = s[2] / cc;

    const double ts = 0.5 * std::min({1.0, 1.0 / std::max(c1, c2), 2.0 / std::max(std::abs(w), 1e-300)});
    cplx near = 0.0;
    for (int n = kSeriesTerms - 1; n >= 3; --n)
        near += s[static_cast<std::size_t>(n)] * std::pow(ts, n - 2) / (static_cast<double>(n - 2) * cc);

    auto mid = [&](double t) { return (barnes_kernel(w, c1, c2, t) - bm2 / (t * t) - bm1 / t - b0) / t; };
    auto far = [&](double t) { return barnes_kernel(w, c1, c2, t) / t; };
    const double inf = std::numeric_limits<double>::infinity();
    const cplx mid_int{integrate_adaptive([&](double t) { return mid(t).real(); }, ts, 1.0, tol),
                       integrate_adaptive([&](double t) { return mid(t).imag(); }, ts, 1.0, tol)};
    const cplx far_int{integrate_adaptive([&](double t) { return far(t).real(); }, 1.0, inf, tol),
                       integrate_adaptive([&](double t) { return far(t).imag(); }, 1.0, inf, tol)};
    return kEulerGamma * b0 + near + mid_int + far_int - bm1 - 0.5 * bm2;
}

cplx log_gamma2_positive(cplx w, double c1, double c2, double tol) {
    const double lo = std::max(c1, c2);
    const auto shifts = static_cast<long>(std::ceil((lo - w.real()) / c1));
    cplx acc = 0.0;
    if (shifts > 0) {
        for (long j = 0; j < shifts; ++j) acc += log_gamma1(w + static_cast<double>(j) * c1, c2);
    } else {
        for (long j = 1; j <= -shifts; ++j) acc -= log_gamma1(w - static_cast<double>(j) * c1, c2);
    }
    return zeta2_prime_direct(w + static_cast<double>(shifts) * c1, c1, c2, tol) + acc;
}

}  // namespace

cplx log_gamma1(cplx w, double c) {
    if (c == 0.0) throw std::invalid_argument("log_gamma1: c = 0");
    if (c < 0.0) return -log_gamma1(w - c, -c);
    return checked_log_gamma(w / c) + (w / c - 0.5) * std::log(c) - 0.5 * std::log(2.0 * kPi);
}

cplx log_gamma2(const BarnesParams& p, double tol) {
    if (p.c1 == 0.0 || p.c2 == 0.0) throw std::invalid_argument("log_gamma2: quasi-periods must be nonzero");
    if (p.c1 < 0.0) return -log_gamma2({p.w - p.c1, -p.c1, p.c2}, tol);
    if (p.c2 < 0.0) return -log_gamma2({p.w - p.c2, p.c1, -p.c2}, tol);
    return log_gamma2_positive(p.w, p.c1, p.c2, tol);
}

cplx log_gamma2_unit(double x, double tol) { return log_gamma2({cplx(x, 0.0), 1.0, -1.0}, tol); }

}  // namespace nekpart

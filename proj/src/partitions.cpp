#include "nekpart/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace nekpart {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const auto r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t m) {
    return (a - floor_mod(a, m)) / m;
}

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] <= 0) throw std::invalid_argument("Partition: parts must be positive");
        if (i > 0 && parts_[i] > parts_[i - 1])
            throw std::invalid_argument("Partition: parts must be weakly decreasing");
    }
    size_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

Partition Partition::conjugate() const {
    std::vector<int> c(parts_.empty() ? 0 : static_cast<std::size_t>(parts_.front()), 0);
    for (int p : parts_)
        for (int j = 0; j < p; ++j) ++c[static_cast<std::size_t>(j)];
    return Partition(std::move(c));
}

std::vector<Partition> partitions_of(int n) {
    std::vector<Partition> out;
    if (n < 0) return out;
    if (n == 0) {
        out.emplace_back();
        return out;
    }
    std::vector<int> a{n};
    while (true) {
        out.emplace_back(a);
        // Rightmost part greater than 1; decrement it and redistribute the remainder greedily.
        int rem = 0;
        while (!a.empty() && a.back() == 1) {
            ++rem;
            a.pop_back();
        }
        if (a.empty()) break;
        const int k = --a.back();
        ++rem;
        while (rem > 0) {
            const int p = std::min(k, rem);
            a.push_back(p);
            rem -= p;
        }
    }
    return out;
}

PeriodicPotential::PeriodicPotential(std::vector<double> xi, double tol) : xi_(std::move(xi)) {
    if (xi_.empty()) throw std::invalid_argument("PeriodicPotential: empty");
    double s = 0.0, scale = 1.0;
    for (double v : xi_) {
        s += v;
        scale = std::max(scale, std::abs(v));
    }
    if (std::abs(s) > tol * scale * static_cast<double>(xi_.size()))
        throw std::invalid_argument(fmt::format("PeriodicPotential: mean is not zero (sum {})", s));
}

double PeriodicPotential::at2(std::int64_t x2) const {
    const auto i = floor_mod((1 - x2) / 2, r());
    return xi_[static_cast<std::size_t>(i == 0 ? r() - 1 : i - 1)];
}

BigInt hook_product(const Partition& lambda) {
    const auto conj = lambda.conjugate();
    BigInt h = 1;
    for (int i = 0; i < lambda.length(); ++i)
        for (int j = 0; j < lambda[i]; ++j) h *= (lambda[i] - j) + (conj[j] - i) - 1;
    return h;
}

BigInt dim_partition(const Partition& lambda) {
    BigInt f = 1;
    for (int k = 2; k <= lambda.size(); ++k) f *= k;
    return f / hook_product(lambda);
}

Rational plancherel_mass(const Partition& lambda) {
    BigInt f = 1;
    for (int k = 2; k <= lambda.size(); ++k) f *= k;
    const BigInt d = dim_partition(lambda);
    return Rational(d * d, f);
}

FermionConfig fermion_set(const Partition& lambda, int depth) {
    if (depth < lambda.length())
        throw std::invalid_argument(
            fmt::format("fermion_set: depth {} below part count {}", depth, lambda.length()));
    FermionConfig fc;
    fc.cutoff = depth;
    fc.points2.reserve(static_cast<std::size_t>(depth));
    for (int i = 1; i <= depth; ++i) fc.points2.push_back(2 * (lambda[i - 1] - i) + 1);
    return fc;
}

RQuotients r_quotients(const Partition& lambda, int r) {
    if (r < 1) throw std::invalid_argument("r_quotients: r must be >= 1");
    const int depth = lambda.length() + r;
    const auto fc = fermion_set(lambda, depth);
    // Doubled positions above -2*depth are explicit; everything below is occupied.
    const std::int64_t floor2 = -2 * depth;

    RQuotients q;
    q.r = r;
    for (int k = 1; k <= r; ++k) {
        const std::int64_t c2 = 1 - 2 * k;  // doubled class representative
        std::vector<std::int64_t> present;
        for (auto x2 : fc.points2)
            if (floor_mod(x2 - c2, 2 * r) == 0) present.push_back((x2 - c2) / (2 * r));
        // present is decreasing. Window: m with c2 + 2 r m > floor2.
        const std::int64_t m_low = floor_div(floor2 - c2, 2 * r) + 1;
        std::int64_t q_charge = 0;
        for (auto m : present)
            if (m >= 0) ++q_charge;
        std::int64_t present_neg = 0;
        for (auto m : present)
            if (m < 0) ++present_neg;
        const std::int64_t window_neg = std::max<std::int64_t>(0, -m_low);
        q_charge -= window_neg - present_neg;

        std::vector<int> mu;
        for (std::size_t j = 0; j < present.size(); ++j)
            mu.push_back(static_cast<int>(present[j] - q_charge + static_cast<std::int64_t>(j) + 1));
        q.quotients.emplace_back(std::move(mu));
        q.shifts.emplace_back(Rational(2 * r * q_charge + 1 - 2 * k - r, 2 * r));
    }
    return q;
}

Partition combine_quotients(const RQuotients& q) {
    const int r = q.r;
    if (r < 1 || q.quotients.size() != static_cast<std::size_t>(r) ||
        q.shifts.size() != static_cast<std::size_t>(r))
        throw std::invalid_argument("combine_quotients: malformed quotient data");
    Rational total = 0;
    for (const auto& s : q.shifts) total += s;
    if (total != 0) throw std::invalid_argument("combine_quotients: shifts do not sum to zero");

    std::vector<std::int64_t> charges;
    int extra = 0;
    for (int k = 1; k <= r; ++k) {
        const Rational qk = q.shifts[static_cast<std::size_t>(k - 1)] - Rational(1 - 2 * k, 2 * r) +
                            Rational(1, 2);
        if (denominator(qk) != 1)
            throw std::invalid_argument("combine_quotients: shifts violate the congruence with rho");
        charges.push_back(static_cast<std::int64_t>(numerator(qk)));
        extra += q.quotients[static_cast<std::size_t>(k - 1)].size();
    }
    std::int64_t qmax = 0;
    for (auto c : charges) qmax = std::max<std::int64_t>(qmax, std::abs(c));
    const int window = extra + static_cast<int>(qmax) + 2;

    std::vector<std::int64_t> pos2;
    std::int64_t threshold = std::numeric_limits<std::int64_t>::min();
    for (int k = 1; k <= r; ++k) {
        const auto& mu = q.quotients[static_cast<std::size_t>(k - 1)];
        const std::int64_t c2 = 1 - 2 * k;
        const int count = mu.length() + window;
        std::int64_t lowest = 0;
        for (int j = 1; j <= count; ++j) {
            const std::int64_t m = mu[j - 1] - j + charges[static_cast<std::size_t>(k - 1)];
            lowest = c2 + 2 * r * m;
            pos2.push_back(lowest);
        }
        threshold = std::max(threshold, lowest);
    }
    std::sort(pos2.begin(), pos2.end(), std::greater<>());
    std::vector<int> parts;
    for (std::size_t i = 0; i < pos2.size() && pos2[i] >= threshold; ++i) {
        const auto idx = static_cast<std::int64_t>(i) + 1;
        parts.push_back(static_cast<int>((pos2[i] - 1) / 2 + idx));
    }
    while (!parts.empty() && parts.back() == 0) parts.pop_back();
    if (std::any_of(parts.begin(), parts.end(), [](int p) { return p < 0; }))
        throw std::invalid_argument("combine_quotients: inconsistent charges");
    return Partition(std::move(parts));
}

Rational size_from_quotients(const RQuotients& q) {
    Rational acc = 0;
    for (const auto& p : q.quotients) acc += p.size();
    for (const auto& s : q.shifts) acc += s * s / 2;
    return q.r * acc + Rational(1 - q.r * q.r, 24);
}

std::vector<Rational> potential_coefficients(const Partition& lambda, int r) {
    return r_quotients(lambda, r).shifts;
}

double potential_energy(const Partition& lambda, const PeriodicPotential& V) {
    const auto s = potential_coefficients(lambda, V.r());
    double e = 0.0;
    for (int k = 0; k < V.r(); ++k)
        e += static_cast<double>(s[static_cast<std::size_t>(k)]) * V.xi()[static_cast<std::size_t>(k)];
    return e;
}

std::complex<double> char_G(std::span<const Partition> tuple, std::complex<double> eps,
                            std::span<const std::complex<double>> a, int depth) {
    if (eps == 0.0) throw std::domain_error("char_G: eps = 0 is a pole of the tail");
    if (a.size() != tuple.size()) throw std::invalid_argument("char_G: size mismatch");
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> total = 0.0;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        const auto& lam = tuple[k];
        const int d = std::max(depth, lam.length());
        std::complex<double> s = 0.0;
        for (int j = 1; j <= d; ++j) s += std::exp(I * eps * (lam[j - 1] - j + 0.5));
        s += std::exp(I * eps * (-d - 0.5)) / (1.0 - std::exp(-I * eps));
        total += std::exp(I * a[k]) * s;
    }
    return total;
}

}  // namespace nekpart

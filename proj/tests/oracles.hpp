#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "nekpart/nekrasov.hpp"
#include "nekpart/partitions.hpp"

namespace oracle {

using nekpart::BigInt;
using nekpart::Partition;

inline long partition_count(int n) {
    std::vector<long> p(static_cast<std::size_t>(n + 1), 0);
    p[0] = 1;
    for (int m = 1; m <= n; ++m)
        for (int k = 1;; ++k) {
            const int g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
            if (g1 > m) break;
            const long sign = (k % 2) ? 1 : -1;
            p[static_cast<std::size_t>(m)] += sign * p[static_cast<std::size_t>(m - g1)];
            if (g2 <= m) p[static_cast<std::size_t>(m)] += sign * p[static_cast<std::size_t>(m - g2)];
        }
    return p[static_cast<std::size_t>(n)];
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline std::vector<Partition> remove_corners(const Partition& p) {
    std::vector<Partition> out;
    auto parts = p.parts();
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (i + 1 == parts.size() || parts[i] > parts[i + 1]) {
            auto q = parts;
            --q[i];
            out.emplace_back(q);
        }
    return out;
}

// Standard tableaux by placing the largest entry in a corner.
inline BigInt tableau_count(const Partition& p, std::map<std::vector<int>, BigInt>& memo) {
    if (p.size() <= 1) return 1;
    if (auto it = memo.find(p.parts()); it != memo.end()) return it->second;
    BigInt s = 0;
    for (const auto& q : remove_corners(p)) s += tableau_count(q, memo);
    return memo[p.parts()] = s;
}

// xi(x) at a doubled half-integer x2: class k (0-based) holds x = 1/2 - (k+1) mod r.
inline double xi_at(long x2, const std::vector<double>& xi) {
    const long r = static_cast<long>(xi.size());
    for (long k = 0; k < r; ++k) {
        const long d = x2 - (1 - 2 * (k + 1));
        if (((d / 2) % r + r) % r == 0) return xi[static_cast<std::size_t>(k)];
    }
    return 0.0;
}

// lim_{z -> 0+} sum over particles of xi(x) e^{z x}, with the vacuum tail summed per residue class.
inline double abel_energy(const Partition& p, const std::vector<double>& xi) {
    const long r = static_cast<long>(xi.size());
    const int depth = p.length() + static_cast<int>(r);
    // Finite part: particles minus the vacuum over the first `depth` rows.
    double finite = 0.0;
    for (int i = 1; i <= depth; ++i) {
        finite += xi_at(2L * (p[i - 1] - i) + 1, xi);
        finite -= xi_at(2L * (-i) + 1, xi);
    }
    // Vacuum: sum_{j >= 1} xi(1/2 - j) e^{z(1/2 - j)} = e^{z/2} sum_k xi_k e^{-z k} / (1 - e^{-r z}) with
    // the 1/z pole cancelling because sum xi_k = 0; the finite limit is -sum_k xi_k (k - 1/2) / r.
    double vac = 0.0;
    for (long k = 1; k <= r; ++k) vac -= xi[static_cast<std::size_t>(k - 1)] * (static_cast<double>(k) - 0.5);
    return finite + vac / static_cast<double>(r);
}

// Arm/leg product for eps1 = -eps2 = eps, oriented as a -> -a relative to the usual statement.
inline double arm_leg_weight(const nekpart::PartitionTuple& F, const nekpart::GaugeParams& g) {
    const int r = g.r();
    auto arm = [](const Partition& l, int i, int j) { return l[i - 1] - j; };
    auto leg = [](const Partition& l, int i, int j) { return l.conjugate()[j - 1] - i; };
    double det = 1.0;
    for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
            const auto& lk = F.parts[static_cast<std::size_t>(k)];
            const auto& ll = F.parts[static_cast<std::size_t>(l)];
            const double akl = g.a[static_cast<std::size_t>(l)] - g.a[static_cast<std::size_t>(k)];
            for (int i = 1; i <= lk.length(); ++i)
                for (int j = 1; j <= lk[i - 1]; ++j)
                    det *= std::abs(akl - g.epsilon * (leg(ll, i, j) + arm(lk, i, j) + 1));
            for (int i = 1; i <= ll.length(); ++i)
                for (int j = 1; j <= ll[i - 1]; ++j)
                    det *= std::abs(akl + g.epsilon * (leg(lk, i, j) + arm(ll, i, j) + 1));
        }
    return det;
}

}  // namespace oracle

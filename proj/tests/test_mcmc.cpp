#include <doctest.h>

#include <cmath>
#include <map>

#include "nekpart/limitshape.hpp"
#include "nekpart/mcmc.hpp"

using namespace nekpart;

namespace {

Partition add_box(const Partition& p, int row) {
    auto parts = p.parts();
    if (row == p.length()) parts.push_back(0);
    ++parts[static_cast<std::size_t>(row)];
    return Partition(parts);
}

bool addable(const Partition& p, int row) { return row == 0 || p[row - 1] > p[row]; }

}  // namespace

TEST_CASE("weight ratio from hooks and energies") {
    const PeriodicPotential V({0.45, -0.15, -0.3});
    const double eps = 0.3, L = 0.8;
    for (int n = 0; n <= 7; ++n)
        for (const auto& p : partitions_of(n))
            for (int row = 0; row <= p.length(); ++row) {
                if (!addable(p, row)) {
                    CHECK_THROWS(log_weight_ratio_add(p, row, V, eps, L));
                    continue;
                }
                const Partition q = add_box(p, row);
                const double hooks =
                    2.0 * (std::log(hook_product(p).convert_to<double>()) - std::log(hook_product(q).convert_to<double>()));
                const double expected =
                    2.0 * std::log(L / eps) + hooks + (potential_energy(q, V) - potential_energy(p, V)) / eps;
                CHECK(log_weight_ratio_add(p, row, V, eps, L) == doctest::Approx(expected).epsilon(1e-12));
                CHECK(log_dual_weight(q, V, eps, L) - log_dual_weight(p, V, eps, L) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
}

TEST_CASE("corner counts") {
    CHECK(corner_count(Partition()) == 1);
    CHECK(corner_count(Partition({1})) == 3);
    CHECK(corner_count(Partition({3, 3, 1})) == 5);
    for (const auto& p : partitions_of(9)) {
        int distinct = 0;
        for (int i = 0; i < p.length(); ++i) distinct += (i == 0 || p[i] != p[i - 1]);
        CHECK(corner_count(p) == 2 * distinct + 1);
    }
}

TEST_CASE("chain is deterministic in the seed") {
    const PeriodicPotential V({0.3, -0.3});
    PartitionChain a(V, 0.4, 1.0, 99), b(V, 0.4, 1.0, 99);
    a.run(20000);
    b.run(20000);
    CHECK(a.state() == b.state());
    CHECK(a.accepted() == b.accepted());
    CHECK(a.steps() == 20000);
    CHECK(a.state().size() == a.size());
}

TEST_CASE("stationary distribution on a truncated state space (batch means)") {
    const PeriodicPotential V({0.3, -0.3});
    const double eps = 0.5, L = 0.6;
    const int cap = 4;
    std::map<std::vector<int>, double> target;
    double Z = 0.0;
    for (int n = 0; n <= cap; ++n)
        for (const auto& p : partitions_of(n)) Z += (target[p.parts()] = std::exp(log_dual_weight(p, V, eps, L)));
    for (auto& [k, v] : target) v /= Z;

    PartitionChain chain(V, eps, L, 2024, cap);
    chain.run(20000);
    const int batches = 40;
    const std::int64_t per_batch = 50000;
    std::map<std::vector<int>, std::vector<double>> freq;
    for (const auto& [k, v] : target) freq[k].assign(batches, 0.0);
    for (int b = 0; b < batches; ++b)
        for (std::int64_t s = 0; s < per_batch; ++s) {
            chain.step();
            freq[chain.state().parts()][static_cast<std::size_t>(b)] += 1.0 / per_batch;
        }
    double worst = 0.0;
    for (const auto& [k, p] : target) {
        const auto& f = freq[k];
        double mean = 0.0, var = 0.0;
        for (double x : f) mean += x / batches;
        for (double x : f) var += (x - mean) * (x - mean) / (batches - 1);
        const double se = std::sqrt(var / batches);
        if (p > 1e-3) worst = std::max(worst, std::abs(mean - p) / std::max(se, 1e-12));
    }
    CHECK(worst < 4.5);
}

TEST_CASE("time-averaged profile approaches the arcsine shape") {
    const PeriodicPotential V({0.0});
    const auto avg = mcmc_average(V, 0.2, 1.0, 100000, 400000, 200, 5);
    CHECK(avg.mean_size == doctest::Approx(25.0).epsilon(0.1));
    const auto target = psi_star({{1.0, 0.0}, 1.0}, 0.01);
    CHECK(l1_distance(avg.profile, target) < 0.1);
    CHECK(avg.acceptance > 0.0);
    CHECK(avg.acceptance <= 1.0);
}

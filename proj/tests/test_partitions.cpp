#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "nekpart/partitions.hpp"
#include "nekpart/profile.hpp"
#include "oracles.hpp"

using namespace nekpart;

TEST_CASE("partition counts match the Euler recurrence") {
    for (int n = 0; n <= 20; ++n) CHECK(static_cast<long>(partitions_of(n).size()) == oracle::partition_count(n));
}

TEST_CASE("dim equals the number of standard tableaux") {
    CHECK(dim_partition(Partition()) == 1);
    CHECK(dim_partition(Partition({2, 1})) == 2);
    std::map<std::vector<int>, BigInt> memo;
    for (int n = 1; n <= 10; ++n)
        for (const auto& p : partitions_of(n)) CHECK(dim_partition(p) == oracle::tableau_count(p, memo));
}

TEST_CASE("branching rule on a large shape") {
    const Partition big({10, 8, 7, 4, 4, 3, 2, 2, 1, 1});
    BigInt sum = 0;
    for (const auto& q : oracle::remove_corners(big)) sum += dim_partition(q);
    CHECK(dim_partition(big) == sum);
    CHECK(hook_product(big) * dim_partition(big) == oracle::factorial(big.size()));
}

TEST_CASE("Plancherel masses") {
    CHECK(plancherel_mass(Partition({1})) == 1);
    CHECK(plancherel_mass(Partition({2, 1})) == Rational(2, 3));
    for (int n = 0; n <= 9; ++n) {
        Rational s = 0;
        for (const auto& p : partitions_of(n)) s += plancherel_mass(p);
        CHECK(s == 1);
    }
}

TEST_CASE("conjugation") {
    CHECK(Partition({3, 1}).conjugate() == Partition({2, 1, 1}));
    for (const auto& p : partitions_of(8)) CHECK(p.conjugate().conjugate() == p);
    CHECK_THROWS_AS(Partition({1, 2}), std::invalid_argument);
}

TEST_CASE("fermion sets") {
    CHECK(fermion_set(Partition(), 3).points2 == std::vector<std::int64_t>{-1, -3, -5});
    CHECK(fermion_set(Partition({1}), 3).points2 == std::vector<std::int64_t>{1, -3, -5});
    CHECK(fermion_set(Partition({3, 1}), 4).points2 == std::vector<std::int64_t>{5, -1, -5, -7});
    CHECK_THROWS_AS(fermion_set(Partition({2, 1, 1}), 2), std::invalid_argument);
}

TEST_CASE("r-quotients of small partitions") {
    const auto e = r_quotients(Partition(), 2);
    CHECK(e.quotients[0].empty());
    CHECK(e.quotients[1].empty());
    CHECK(e.shifts == std::vector<Rational>{Rational(1, 4), Rational(-1, 4)});
    const auto one = r_quotients(Partition({1}), 2);
    CHECK(one.shifts == std::vector<Rational>{Rational(-3, 4), Rational(3, 4)});
    CHECK(size_from_quotients(one) == 1);
    CHECK(combine_quotients(e) == Partition());
    CHECK(combine_quotients(one) == Partition({1}));
}

TEST_CASE("r-quotient round trip and size identity") {
    for (int r = 2; r <= 5; ++r)
        for (int n = 0; n <= 12; ++n)
            for (const auto& p : partitions_of(n)) {
                const auto q = r_quotients(p, r);
                Rational total = 0;
                for (const auto& s : q.shifts) total += s;
                CHECK(total == 0);
                CHECK(size_from_quotients(q) == n);
                CHECK(combine_quotients(q) == p);
            }
}

TEST_CASE("combine_quotients rejects bad shifts") {
    auto q = r_quotients(Partition({2}), 2);
    q.shifts[0] += Rational(1, 2);
    q.shifts[1] -= Rational(1, 2);
    CHECK_THROWS_AS(combine_quotients(q), std::invalid_argument);
}

TEST_CASE("potential energy against Abel summation") {
    const PeriodicPotential V({1.0, -1.0});
    CHECK(potential_energy(Partition(), V) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(potential_energy(Partition({1}), V) == doctest::Approx(-1.5).epsilon(1e-14));
    const PeriodicPotential Z({0.0, 0.0, 0.0});
    CHECK(potential_energy(Partition({4, 2, 1}), Z) == 0.0);
    const PeriodicPotential W({0.7, -0.2, -0.5});
    for (int n = 0; n <= 7; ++n)
        for (const auto& p : partitions_of(n))
            CHECK(potential_energy(p, W) == doctest::Approx(oracle::abel_energy(p, W.xi())).epsilon(1e-9));
}

TEST_CASE("potential coefficients are the shifts") {
    for (const auto& p : partitions_of(6)) CHECK(potential_coefficients(p, 3) == r_quotients(p, 3).shifts);
}

TEST_CASE("char_G quotient identity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(0.2, 1.5);
    for (int r : {2, 3})
        for (int n = 0; n <= 6; ++n)
            for (const auto& p : partitions_of(n)) {
                const auto q = r_quotients(p, r);
                for (int k = 0; k < 3; ++k) {
                    const cplx eps(re(rng), im(rng));
                    const std::vector<Partition> one{p};
                    const std::vector<cplx> zero{0.0};
                    std::vector<cplx> a;
                    for (const auto& s : q.shifts) a.push_back(eps * s.convert_to<double>());
                    const cplx lhs = char_G(one, eps / static_cast<double>(r), zero);
                    const cplx rhs = char_G(q.quotients, eps, a);
                    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
                }
            }
}

TEST_CASE("char_G vacuum") {
    const cplx eps(0.3, 0.7);
    const std::vector<Partition> one{Partition()};
    const std::vector<cplx> zero{0.0};
    const cplx i(0.0, 1.0);
    const cplx expected = 1.0 / (std::exp(i * eps / 2.0) - std::exp(-i * eps / 2.0));
    CHECK(std::abs(char_G(one, eps, zero) - expected) < 1e-14);
    CHECK_THROWS(char_G(one, cplx(0.0), zero));
}

TEST_CASE("profile geometry") {
    const auto e = profile(Partition(), 0.7);
    for (double x : {-3.0, -0.2, 0.0, 1.4}) CHECK(e.value(x) == doctest::Approx(std::abs(x)));
    const auto b = profile(Partition({1}), 1.0);
    CHECK(b.value(0.0) == doctest::Approx(2.0));
    CHECK(b.value(-1.0) == doctest::Approx(1.0));
    CHECK(b.area_deviation() == doctest::Approx(2.0));
    for (double eps : {1.0, 0.25})
        for (int n = 0; n <= 10; ++n)
            for (const auto& p : partitions_of(n))
                CHECK(profile(p, eps).area_deviation() == doctest::Approx(2.0 * eps * eps * n).epsilon(1e-12));
}

TEST_CASE("profile slopes and L1 distance") {
    const auto f = profile(Partition({3, 1}), 0.5);
    for (double s : f.slopes()) CHECK(std::abs(s) == doctest::Approx(1.0));
    CHECK(l1_distance(f, f) == 0.0);
    const auto g = profile(Partition(), 0.5);
    CHECK(l1_distance(f, g) == doctest::Approx(f.area_deviation()));
    CHECK_THROWS_AS(ProfileFunction({0.0, 1.0}, {1.5}), std::invalid_argument);
}

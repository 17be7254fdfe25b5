#include "nekpart/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nekpart {

namespace {

// Doubled position of the particle for row i before a box is added there.
std::int64_t particle2(int part, int row) { return 2 * static_cast<std::int64_t>(part - row) - 1; }

double energy_step(const PeriodicPotential& V, std::int64_t x2) { return V.at2(x2 + 2) - V.at2(x2); }

}  // namespace

double log_dual_weight(const Partition& lambda, const PeriodicPotential& V, double eps, double lambda_scale) {
    const double log_h = std::log(static_cast<double>(hook_product(lambda)));
    return 2.0 * lambda.size() * std::log(lambda_scale / eps) - 2.0 * log_h + potential_energy(lambda, V) / eps;
}

double log_weight_ratio_add(const Partition& lambda, int row, const PeriodicPotential& V, double eps,
                            double lambda_scale) {
    if (row < 0 || row > lambda.length() || (row > 0 && lambda[row - 1] == lambda[row]))
        throw std::invalid_argument("log_weight_ratio_add: no addable corner in this row");
    const int col = lambda[row];
    const auto conj = lambda.conjugate();
    double log_ratio = 0.0;
    for (int j = 0; j < col; ++j) {
        const double h = (lambda[row] - j - 1) + (conj[j] - row - 1) + 1;
        log_ratio += std::log(h / (h + 1.0));
    }
    for (int i = 0; i < row; ++i) {
        const double h = (lambda[i] - col - 1) + (conj[col] - i - 1) + 1;
        log_ratio += std::log(h / (h + 1.0));
    }
    return 2.0 * std::log(lambda_scale / eps) + 2.0 * log_ratio +
           energy_step(V, particle2(lambda[row], row)) / eps;
}

int corner_count(const Partition& lambda) {
    int distinct = 0;
    for (int i = 0; i < lambda.length(); ++i)
        if (i + 1 == lambda.length() || lambda[i + 1] < lambda[i]) ++distinct;
    return 2 * distinct + 1;
}

PartitionChain::PartitionChain(PeriodicPotential V, double eps, double lambda_scale, std::uint64_t seed,
                               int max_size)
    : V_(std::move(V)), eps_(eps), log_scale_(std::log(lambda_scale / eps)), max_size_(max_size), rng_(seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("PartitionChain: eps must be positive");
}

int PartitionChain::distinct_parts() const {
    int d = 0;
    const auto n = rows_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (i + 1 == n || rows_[i + 1] < rows_[i]) ++d;
    return d;
}

double PartitionChain::log_hook_ratio_add(int row, int col) const {
    const int len = static_cast<int>(rows_.size());
    const int rlen = row < len ? rows_[static_cast<std::size_t>(row)] : 0;
    const int clen = col < static_cast<int>(cols_.size()) ? cols_[static_cast<std::size_t>(col)] : 0;
    double s = 0.0;
    for (int j = 0; j < col; ++j) {
        const double h = (rlen - j - 1) + (cols_[static_cast<std::size_t>(j)] - row - 1) + 1;
        s += std::log(h / (h + 1.0));
    }
    for (int i = 0; i < row; ++i) {
        const double h = (rows_[static_cast<std::size_t>(i)] - col - 1) + (clen - i - 1) + 1;
        s += std::log(h / (h + 1.0));
    }
    return s;
}

double PartitionChain::delta_energy_add(int row) const {
    const int part = row < static_cast<int>(rows_.size()) ? rows_[static_cast<std::size_t>(row)] : 0;
    return energy_step(V_, particle2(part, row)) / eps_;
}

void PartitionChain::step() {
    ++steps_;
    const int len = static_cast<int>(rows_.size());
    // Corners in a fixed order: addable rows 0..len, then removable rows.
    std::vector<int> add_rows, rem_rows;
    for (int i = 0; i <= len; ++i) {
        const int cur = i < len ? rows_[static_cast<std::size_t>(i)] : 0;
        if (i == 0 || rows_[static_cast<std::size_t>(i - 1)] > cur) add_rows.push_back(i);
    }
    for (int i = 0; i < len; ++i)
        if (i + 1 == len || rows_[static_cast<std::size_t>(i + 1)] < rows_[static_cast<std::size_t>(i)])
            rem_rows.push_back(i);
    const int n_here = static_cast<int>(add_rows.size() + rem_rows.size());
    std::uniform_int_distribution<int> pick(0, n_here - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int k = pick(rng_);
    const double u = unif(rng_);

    if (k < static_cast<int>(add_rows.size())) {
        if (max_size_ > 0 && size_ + 1 > max_size_) return;
        const int row = add_rows[static_cast<std::size_t>(k)];
        const int col = row < len ? rows_[static_cast<std::size_t>(row)] : 0;
        double log_a = 2.0 * log_scale_ + 2.0 * log_hook_ratio_add(row, col) + delta_energy_add(row);
        if (row == len) rows_.push_back(1);
        else ++rows_[static_cast<std::size_t>(row)];
        const int n_there = 2 * distinct_parts() + 1;
        if (row == len) rows_.pop_back();
        else --rows_[static_cast<std::size_t>(row)];
        log_a += std::log(static_cast<double>(n_here) / n_there);
        if (log_a >= 0.0 || u < std::exp(log_a)) {
            if (row == len) rows_.push_back(1);
            else ++rows_[static_cast<std::size_t>(row)];
            if (col == static_cast<int>(cols_.size())) cols_.push_back(1);
            else ++cols_[static_cast<std::size_t>(col)];
            ++size_;
            ++accepted_;
        }
    } else {
        const int row = rem_rows[static_cast<std::size_t>(k) - add_rows.size()];
        const int col = rows_[static_cast<std::size_t>(row)] - 1;
        // Reverse of adding (row, col) to the smaller partition.
        --rows_[static_cast<std::size_t>(row)];
        --cols_[static_cast<std::size_t>(col)];
        double log_a = -(2.0 * log_scale_ + 2.0 * log_hook_ratio_add(row, col) + delta_energy_add(row));
        if (rows_.back() == 0) rows_.pop_back();
        if (cols_.back() == 0) cols_.pop_back();
        const int n_there = 2 * distinct_parts() + 1;
        log_a += std::log(static_cast<double>(n_here) / n_there);
        if (log_a >= 0.0 || u < std::exp(log_a)) {
            --size_;
            ++accepted_;
        } else {
            if (row == static_cast<int>(rows_.size())) rows_.push_back(1);
            else ++rows_[static_cast<std::size_t>(row)];
            if (col == static_cast<int>(cols_.size())) cols_.push_back(1);
            else ++cols_[static_cast<std::size_t>(col)];
        }
    }
}

void PartitionChain::run(std::int64_t steps) {
    if (steps < 0) throw std::invalid_argument("PartitionChain::run: negative step count");
    for (std::int64_t s = 0; s < steps; ++s) step();
}

Partition mcmc_sample(const PeriodicPotential& V, double eps, double lambda_scale, std::int64_t steps,
                      std::uint64_t seed, int max_size) {
    PartitionChain chain(V, eps, lambda_scale, seed, max_size);
    chain.run(steps);
    return chain.state();
}

ChainAverage mcmc_average(const PeriodicPotential& V, double eps, double lambda_scale, std::int64_t burn_in,
                          std::int64_t steps, std::int64_t thin, std::uint64_t seed, int max_size) {
    if (thin <= 0) throw std::invalid_argument("mcmc_average: thin must be positive");
    PartitionChain chain(V, eps, lambda_scale, seed, max_size);
    chain.run(burn_in);
    // Unscaled profile sums at integer points -K..K; |u| is implied beyond K.
    int K = 1;
    std::vector<double> sums(3, 0.0);
    ChainAverage out;
    double size_sum = 0.0;
    const auto acc0 = chain.accepted();
    for (std::int64_t s = 0; s < steps; ++s) {
        chain.step();
        if ((s + 1) % thin != 0) continue;
        const auto lam = chain.state();
        const int need = std::max(lam.length(), lam[0]) + 1;
        if (need > K) {
            std::vector<double> grown(static_cast<std::size_t>(2 * need + 1));
            for (int u = -need; u <= need; ++u)
                grown[static_cast<std::size_t>(u + need)] =
                    std::abs(u) <= K ? sums[static_cast<std::size_t>(u + K)]
                                     : static_cast<double>(out.samples) * std::abs(u);
            sums = std::move(grown);
            K = need;
        }
        const auto f = profile(lam, 1.0);
        for (int u = -K; u <= K; ++u) sums[static_cast<std::size_t>(u + K)] += f.value(u);
        size_sum += lam.size();
        ++out.samples;
    }
    if (out.samples == 0) throw std::invalid_argument("mcmc_average: no samples retained");
    std::vector<double> xs, ps;
    for (int u = -K; u <= K; ++u) {
        xs.push_back(eps * u);
        ps.push_back(eps * sums[static_cast<std::size_t>(u + K)] / static_cast<double>(out.samples));
    }
    ps.front() = std::abs(xs.front());
    ps.back() = std::abs(xs.back());
    out.profile = ProfileFunction::from_samples(xs, ps, 1e-9);
    out.mean_size = size_sum / static_cast<double>(out.samples);
    out.acceptance = static_cast<double>(chain.accepted() - acc0) / static_cast<double>(steps);
    return out;
}

}  // namespace nekpart

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nekpart/partitions.hpp"
#include "nekpart/profile.hpp"

namespace nekpart {

/// ln of (Lambda/eps)^{2|lambda|} / H(lambda)^2 * exp(Xi(lambda)/eps), H the hook product.
double log_dual_weight(const Partition& lambda, const PeriodicPotential& V, double eps, double lambda_scale);

/// ln w(lambda + box in row) - ln w(lambda), from the hooks in the affected row and column.
double log_weight_ratio_add(const Partition& lambda, int row, const PeriodicPotential& V, double eps,
                            double lambda_scale);

/// Addable plus removable corners.
int corner_count(const Partition& lambda);

/// Metropolis-Hastings chain on partitions with single-corner moves proposed uniformly.
class PartitionChain {
public:
    /// max_size <= 0 leaves the size unbounded; otherwise larger states are rejected.
    PartitionChain(PeriodicPotential V, double eps, double lambda_scale, std::uint64_t seed, int max_size = 0);

    void step();
    void run(std::int64_t steps);

    Partition state() const { return Partition(rows_); }
    int size() const noexcept { return size_; }
    std::int64_t accepted() const noexcept { return accepted_; }
    std::int64_t steps() const noexcept { return steps_; }

private:
    // Hook product ratio H(lambda)/H(lambda + box at (row, col)) in log form.
    double log_hook_ratio_add(int row, int col) const;
    double delta_energy_add(int row) const;
    int distinct_parts() const;

    PeriodicPotential V_;
    double eps_;
    double log_scale_;
    int max_size_;
    std::mt19937_64 rng_;
    std::vector<int> rows_;
    std::vector<int> cols_;
    int size_ = 0;
    std::int64_t accepted_ = 0;
    std::int64_t steps_ = 0;
};

Partition mcmc_sample(const PeriodicPotential& V, double eps, double lambda_scale, std::int64_t steps,
                      std::uint64_t seed, int max_size = 0);

struct ChainAverage {
    /// Time average of the eps-scaled profile over the retained samples.
    ProfileFunction profile;
    double mean_size = 0.0;
    std::int64_t samples = 0;
    double acceptance = 0.0;
};

/// Runs burn_in steps, then `steps` more, sampling the profile every `thin` steps.
ChainAverage mcmc_average(const PeriodicPotential& V, double eps, double lambda_scale, std::int64_t burn_in,
                          std::int64_t steps, std::int64_t thin, std::uint64_t seed, int max_size = 0);

}  // namespace nekpart

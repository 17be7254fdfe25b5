#pragma once

#include <vector>

#include "nekpart/partitions.hpp"

namespace nekpart {

/// Continuous piecewise-linear function equal to |x| outside [breakpoints.front(), breakpoints.back()].
class ProfileFunction {
public:
    ProfileFunction() = default;
    /// slopes[k] applies on (breakpoints[k], breakpoints[k+1]); psi(breakpoints[0]) = |breakpoints[0]|.
    /// Throws std::invalid_argument on |slope| > 1 or a discontinuity at the right end.
    ProfileFunction(std::vector<double> breakpoints, std::vector<double> slopes, double tol = 1e-9);

    /// Builds the PL interpolant of samples (x_k, psi_k); endpoints must lie on |x|.
    static ProfileFunction from_samples(const std::vector<double>& x, const std::vector<double>& psi,
                                        double tol = 1e-9);

    double value(double x) const;
    /// Right derivative.
    double slope(double x) const;
    /// Integral of psi - |x|.
    double area_deviation() const;

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& slopes() const noexcept { return slopes_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> breakpoints_;
    std::vector<double> slopes_;
    std::vector<double> values_;
};

/// Boundary profile of lambda in rotated coordinates, scaled by eps in both directions.
ProfileFunction profile(const Partition& lambda, double eps);

/// L1 distance between two profiles.
double l1_distance(const ProfileFunction& f, const ProfileFunction& g);

}  // namespace nekpart

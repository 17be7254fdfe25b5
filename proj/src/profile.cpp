#include "nekpart/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nekpart {

ProfileFunction::ProfileFunction(std::vector<double> breakpoints, std::vector<double> slopes, double tol)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
    if (breakpoints_.empty()) {
        slopes_.clear();
        return;
    }
    if (slopes_.size() + 1 != breakpoints_.size())
        throw std::invalid_argument("ProfileFunction: need one slope per segment");
    values_.resize(breakpoints_.size());
    values_[0] = std::abs(breakpoints_[0]);
    for (std::size_t k = 0; k < slopes_.size(); ++k) {
        if (std::abs(slopes_[k]) > 1.0 + tol) throw std::invalid_argument("ProfileFunction: |slope| > 1");
        const double h = breakpoints_[k + 1] - breakpoints_[k];
        if (!(h > 0.0)) throw std::invalid_argument("ProfileFunction: breakpoints must increase");
        values_[k + 1] = values_[k] + slopes_[k] * h;
    }
    const double end = breakpoints_.back();
    if (std::abs(values_.back() - std::abs(end)) > tol * (1.0 + std::abs(end)))
        throw std::invalid_argument("ProfileFunction: does not rejoin |x| at the right end");
    values_.back() = std::abs(end);
}

ProfileFunction ProfileFunction::from_samples(const std::vector<double>& x, const std::vector<double>& psi,
                                              double tol) {
    if (x.size() != psi.size() || x.size() < 2)
        throw std::invalid_argument("ProfileFunction::from_samples: need matching samples");
    if (std::abs(psi.front() - std::abs(x.front())) > tol)
        throw std::invalid_argument("ProfileFunction::from_samples: left end off |x|");
    std::vector<double> slopes(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        const double s = (psi[k + 1] - psi[k]) / (x[k + 1] - x[k]);
        slopes[k] = std::clamp(s, -1.0, 1.0);
    }
    return ProfileFunction(x, slopes, std::max(tol, 1e-6));
}

double ProfileFunction::value(double x) const {
    if (breakpoints_.empty() || x <= breakpoints_.front() || x >= breakpoints_.back()) return std::abs(x);
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[k] + slopes_[k] * (x - breakpoints_[k]);
}

double ProfileFunction::slope(double x) const {
    if (breakpoints_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return x < 0 ? -1.0 : 1.0;
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return slopes_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

namespace {

// Integral of |x| over [a, b].
double abs_integral(double a, double b) {
    auto F = [](double t) { return 0.5 * t * std::abs(t); };
    return F(b) - F(a);
}

}  // namespace

double ProfileFunction::area_deviation() const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
        const double a = breakpoints_[k], b = breakpoints_[k + 1];
        s += 0.5 * (values_[k] + values_[k + 1]) * (b - a) - abs_integral(a, b);
    }
    return s;
}

ProfileFunction profile(const Partition& lambda, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("profile: eps must be positive");
    if (lambda.empty()) return {};
    const int depth = lambda.length();
    const auto fc = fermion_set(lambda, depth);
    // Unit cells [k, k+1] for k = -depth .. lambda_1 - 1; slope -1 where a particle sits at k + 1/2.
    const int lo = -depth, hi = lambda[0];
    std::vector<char> occupied(static_cast<std::size_t>(hi - lo), 0);
    for (auto x2 : fc.points2) occupied[static_cast<std::size_t>((x2 - 1) / 2 - lo)] = 1;

    std::vector<double> bp{eps * lo};
    std::vector<double> slopes;
    for (int k = lo; k < hi; ++k) {
        const double s = occupied[static_cast<std::size_t>(k - lo)] ? -1.0 : 1.0;
        if (!slopes.empty() && slopes.back() == s) {
            bp.back() = eps * (k + 1);
        } else {
            slopes.push_back(s);
            bp.push_back(eps * (k + 1));
        }
    }
    return ProfileFunction(std::move(bp), std::move(slopes));
}

double l1_distance(const ProfileFunction& f, const ProfileFunction& g) {
    std::vector<double> pts = f.breakpoints();
    pts.insert(pts.end(), g.breakpoints().begin(), g.breakpoints().end());
    pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1];
        const double da = f.value(a) - g.value(a), db = f.value(b) - g.value(b);
        if (da * db >= 0.0) {
            s += 0.5 * (std::abs(da) + std::abs(db)) * (b - a);
        } else {
            const double t = da / (da - db);
            s += 0.5 * (std::abs(da) * t + std::abs(db) * (1.0 - t)) * (b - a);
        }
    }
    return s;
}

}  // namespace nekpart

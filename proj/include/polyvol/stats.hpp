#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace polyvol {

/// Sample median; mean of the middle two for even counts. Non-finite entries
/// are ignored.
inline double median(std::span<const double> values) {
    std::vector<double> v;
    v.reserve(values.size());
    for (double x : values)
        if (std::isfinite(x)) v.push_back(x);
    if (v.empty()) throw std::invalid_argument("median: no finite values");
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

struct RobustStats {
    double median;
    double scaled_mad; // 1.4826 * MAD, consistent for sigma in the Gaussian case
};

inline RobustStats robust_stats(std::span<const double> values) {
    const double med = polyvol::median(values);
    std::vector<double> dev;
    dev.reserve(values.size());
    for (double x : values)
        if (std::isfinite(x)) dev.push_back(std::abs(x - med));
    return {med, 1.4826 * polyvol::median(dev)};
}

/// Mean bounded error: mean of |T - theta| / (|T - theta| + 1); a non-finite
/// estimate contributes 1 (the limit value).
inline double mean_bounded_error(std::span<const double> estimates, double theta) {
    if (estimates.empty()) throw std::invalid_argument("mean_bounded_error: empty list");
    if (!std::isfinite(theta)) throw std::invalid_argument("mean_bounded_error: theta must be finite");
    double acc = 0.0;
    for (double t : estimates) {
        if (!std::isfinite(t)) {
            acc += 1.0;
            continue;
        }
        const double a = std::abs(t - theta);
        acc += std::isfinite(a) ? a / (a + 1.0) : 1.0;
    }
    return acc / static_cast<double>(estimates.size());
}

} // namespace polyvol

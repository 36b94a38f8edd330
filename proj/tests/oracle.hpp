// Test-only numerical oracles, independent of the library's computation
// paths: Gauss-Legendre quadrature, central finite differences, a Box-Muller
// normal stream, and a brute-force distance minimizer.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "polyvol/geometry.hpp"
#include "polyvol/rng.hpp"

namespace oracle {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], via
/// Newton iteration on the Legendre recurrence.
inline void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

/// Composite 64-point Gauss-Legendre integral of f on [a, b].
template <class F>
double integrate(F&& f, double a, double b, int panels = 4) {
    static std::vector<double> nodes, weights;
    if (nodes.empty()) gauss_legendre_rule(64, nodes, weights);
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(mid + 0.5 * h * nodes[i]);
        total += 0.5 * h * acc;
    }
    return total;
}

/// Central finite difference d f / d x.
template <class F>
double derivative(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Standard normal stream (Box-Muller over a splitmix64 stream).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = rng_.next_double();
        while (u1 <= 0.0) u1 = rng_.next_double();
        const double u2 = rng_.next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    polyvol::SplitMix64 rng_;
    double spare_ = 0.0;
    bool have_ = false;
};

/// chi-square(35) upper 0.001 critical value (for the 36-bin uniformity test).
inline constexpr double kChi2_35_999 = 66.61882884370104;

/// Brute-force distance to a point cloud sampled densely from a shape's
/// boundary/body; used to cross-check closed-form distance functions.
inline double min_distance_to_cloud(polyvol::Vec2 p, const std::vector<polyvol::Vec2>& cloud) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : cloud) best = std::min(best, polyvol::norm(p - q));
    return best;
}

inline double min_distance_to_cloud(polyvol::Vec3 p, const std::vector<polyvol::Vec3>& cloud) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : cloud) best = std::min(best, polyvol::norm(p - q));
    return best;
}

} // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyvol/common.hpp"

namespace polyvol {

/// Brent's zero finder on a bracket [a, b] with f(a) and f(b) of opposite
/// sign. Combines bisection with inverse quadratic interpolation, so it
/// converges for any continuous f and never leaves the bracket.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double rel_tol = 1e-12, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NumericalError("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                           0.5 * rel_tol * std::abs(b);
        const double mid = 0.5 * (c - b);
        if (std::abs(mid) <= tol || fb == 0.0) return b;

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) { // secant
                p = 2.0 * mid * s;
                q = 1.0 - s;
            } else { // inverse quadratic
                const double qq = fa / fc;
                const double rr = fb / fc;
                p = s * (2.0 * mid * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * mid * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = mid;
                e = d;
            }
        } else {
            d = mid;
            e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (mid > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return b;
}

} // namespace polyvol

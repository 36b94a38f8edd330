#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polyvol/common.hpp"

namespace polyvol {

/// Polynomial volume function of a compact set S:
///   d = 2:  V(r) = mu + l0*r + phi0*pi*r^2
///   d = 3:  V(r) = mu + l0*r + m*r^2 + phi0*(4*pi/3)*r^3
/// valid on [0, r_max]. mu is the volume of S, l0 the boundary measure
/// coefficient, m the integrated mean curvature (3-d only), phi0 the leading
/// coefficient (Euler characteristic for positive-reach sets). phi0 may be
/// zero or negative as long as V stays strictly increasing on (0, r_max].
struct VolumePolynomial {
    int dimension = 2;
    double mu = 0.0;
    double l0 = 0.0;
    double m = 0.0;
    double phi0 = 1.0;
    double r_max = std::numeric_limits<double>::infinity();

    static VolumePolynomial dim2(double mu, double l0, double phi0, double r_max) {
        VolumePolynomial p{2, mu, l0, 0.0, phi0, r_max};
        p.validate();
        return p;
    }

    static VolumePolynomial dim3(double mu, double l0, double m, double phi0, double r_max) {
        VolumePolynomial p{3, mu, l0, m, phi0, r_max};
        p.validate();
        return p;
    }

    double value(double r) const {
        if (dimension == 2) return mu + l0 * r + phi0 * kPi * r * r;
        return mu + l0 * r + m * r * r + phi0 * (4.0 * kPi / 3.0) * cube(r);
    }

    /// V'(r); by continuity this equals the average of the one-sided
    /// derivatives wherever both exist.
    double derivative(double r) const {
        if (dimension == 2) return l0 + 2.0 * phi0 * kPi * r;
        return l0 + 2.0 * m * r + 4.0 * phi0 * kPi * r * r;
    }

    /// mu(B(S,r) \ S) = V(r) - mu.
    double band_measure(double r) const { return value(r) - mu; }

    void validate() const {
        if (dimension != 2 && dimension != 3)
            throw std::invalid_argument("VolumePolynomial: dimension must be 2 or 3");
        if (!(l0 > 0.0)) throw std::invalid_argument("VolumePolynomial: l0 must be > 0");
        if (!(r_max > 0.0)) throw std::invalid_argument("VolumePolynomial: r_max must be > 0");
        if (!std::isfinite(phi0)) throw std::invalid_argument("VolumePolynomial: phi0 must be finite");
        if (dimension == 2 && m != 0.0)
            throw std::invalid_argument("VolumePolynomial: m must be 0 in dimension 2");
        if (!(mu >= 0.0)) throw std::invalid_argument("VolumePolynomial: mu must be >= 0");
        // strict monotonicity of V on (0, r_max]: V' is linear (2-d) or a
        // quadratic (3-d), so its minimum over the interval is attained at an
        // endpoint or the single interior critical point.
        bool increasing;
        if (std::isinf(r_max)) {
            if (dimension == 2) {
                increasing = phi0 >= 0.0;
            } else if (phi0 > 0.0) {
                const double r_crit = -m / (4.0 * phi0 * kPi);
                increasing = r_crit <= 0.0 || derivative(r_crit) > 0.0;
            } else {
                increasing = phi0 == 0.0 && m >= 0.0;
            }
        } else {
            double min_deriv = std::min(derivative(0.0), derivative(r_max));
            if (dimension == 3 && phi0 > 0.0) {
                const double r_crit = -m / (4.0 * phi0 * kPi);
                if (r_crit > 0.0 && r_crit < r_max)
                    min_deriv = std::min(min_deriv, derivative(r_crit));
            }
            increasing = min_deriv > 0.0;
        }
        if (!increasing)
            throw std::invalid_argument("VolumePolynomial: V must be strictly increasing on (0, r_max]");
    }
};

} // namespace polyvol

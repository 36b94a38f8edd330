#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "polyvol/common.hpp"
#include "polyvol/volume_polynomial.hpp"

namespace polyvol {

// ---------------------------------------------------------------------------
// 2-d parametric family: V(r) = mu + l0*r + phi0*pi*r^2 on [0, R]
// ---------------------------------------------------------------------------

struct Params2D {
    double l0 = kPi;
    double phi0 = 1.0;
    double R = 1.0;

    void validate() const {
        if (!(l0 > 0.0)) throw std::invalid_argument("Params2D: l0 must be > 0");
        if (!(phi0 >= 0.0)) throw std::invalid_argument("Params2D: phi0 must be >= 0");
        if (!(R > 0.0)) throw std::invalid_argument("Params2D: R must be > 0");
    }

    double normalizer() const { return l0 * R + phi0 * kPi * R * R; }
};

/// f(r) = (l0 + 2*phi0*pi*r) / (l0*R + phi0*pi*R^2) on [0, R).
inline double density2d(double r, const Params2D& p) {
    p.validate();
    if (!(r >= 0.0 && r < p.R)) throw std::domain_error("density2d: r must be in [0, R)");
    return (p.l0 + 2.0 * p.phi0 * kPi * r) / p.normalizer();
}

/// F(r) = (l0*r + phi0*pi*r^2) / (l0*R + phi0*pi*R^2) on [0, R].
inline double cdf2d(double r, const Params2D& p) {
    p.validate();
    if (!(r >= 0.0 && r <= p.R)) throw std::domain_error("cdf2d: r must be in [0, R]");
    return (p.l0 * r + p.phi0 * kPi * r * r) / p.normalizer();
}

/// Inverse of cdf2d (exact: root of a quadratic).
inline double quantile2d(double u, const Params2D& p) {
    p.validate();
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile2d: u must be in [0, 1]");
    const double c = u * p.normalizer();
    const double q = p.phi0 * kPi;
    if (q == 0.0) return c / p.l0;
    return (-p.l0 + std::sqrt(p.l0 * p.l0 + 4.0 * q * c)) / (2.0 * q);
}

/// f = lambda*f1 + (1-lambda)*f2 with f1 uniform on (0,R) and f2 the density
/// of R*Beta(2,1).
struct Mixture2D {
    double lambda;
    double R;
    double f1(double r) const { return (r >= 0.0 && r <= R) ? 1.0 / R : 0.0; }
    double f2(double r) const { return (r >= 0.0 && r <= R) ? 2.0 * r / (R * R) : 0.0; }
    double density(double r) const { return lambda * f1(r) + (1.0 - lambda) * f2(r); }
};

inline Mixture2D mixture2d(const Params2D& p) {
    p.validate();
    return {p.l0 / (p.l0 + p.phi0 * kPi * p.R), p.R};
}

struct Moments2D {
    double mean;
    double variance;
};

/// E(D) = (3*l0*R + 4*P*R^2) / (6*(l0 + P*R)),
/// Var(D) = R^2*(3*l0^2 + 6*P*l0*R + 2*P^2*R^2) / (36*(l0 + P*R)^2),
/// with P = phi0*pi.
inline Moments2D moments2d(const Params2D& p) {
    p.validate();
    const double P = p.phi0 * kPi;
    const double mean = (3.0 * p.l0 * p.R + 4.0 * P * square(p.R)) / (6.0 * (p.l0 + P * p.R));
    const double variance = square(p.R) * (3.0 * square(p.l0) + 6.0 * P * p.l0 * p.R + 2.0 * square(P * p.R)) /
                            (36.0 * square(p.l0 + P * p.R));
    return {mean, variance};
}

// ---------------------------------------------------------------------------
// 3-d parametric family: V(r) = mu + l0*r + m*r^2 + phi0*(4*pi/3)*r^3 on [0, R]
// ---------------------------------------------------------------------------

struct Params3D {
    double l0 = kPi;
    double m = 0.0;
    double R = 1.0;
    double phi0 = 1.0;

    void validate() const {
        if (!(l0 >= 0.0)) throw std::invalid_argument("Params3D: l0 must be >= 0");
        if (!(R > 0.0)) throw std::invalid_argument("Params3D: R must be > 0");
        if (!(phi0 > 0.0)) throw std::invalid_argument("Params3D: phi0 must be > 0");
        // the density numerator l0 + 2*m*r + 4*phi0*pi*r^2 must stay positive
        // on the open interval (mildly negative m is allowed, and the
        // numerator may vanish at an endpoint, e.g. l0 = 0)
        const double q = 4.0 * phi0 * kPi;
        const double r_crit = -m / q;
        bool ok = l0 >= 0.0 && l0 + 2.0 * m * R + q * R * R >= 0.0;
        if (r_crit > 0.0 && r_crit < R) ok = ok && (l0 - m * m / q > 0.0);
        if (!ok) throw std::invalid_argument("Params3D: density must be positive on (0, R)");
    }

    double normalizer() const { return l0 * R + m * R * R + (4.0 / 3.0) * phi0 * kPi * cube(R); }
};

/// f(r) = (l0 + 2*m*r + 4*phi0*pi*r^2) / (l0*R + m*R^2 + (4/3)*phi0*pi*R^3).
inline double density3d(double r, const Params3D& p) {
    p.validate();
    if (!(r >= 0.0 && r < p.R)) throw std::domain_error("density3d: r must be in [0, R)");
    return (p.l0 + 2.0 * p.m * r + 4.0 * p.phi0 * kPi * r * r) / p.normalizer();
}

inline double cdf3d(double r, const Params3D& p) {
    p.validate();
    if (!(r >= 0.0 && r <= p.R)) throw std::domain_error("cdf3d: r must be in [0, R]");
    return (p.l0 * r + p.m * r * r + (4.0 / 3.0) * p.phi0 * kPi * cube(r)) / p.normalizer();
}

/// Inverse of cdf3d by safeguarded Newton (the cdf is strictly increasing).
inline double quantile3d(double u, const Params3D& p) {
    p.validate();
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile3d: u must be in [0, 1]");
    const double target = u * p.normalizer();
    double lo = 0.0, hi = p.R;
    double r = u * p.R;
    for (int i = 0; i < 200; ++i) {
        const double g = p.l0 * r + p.m * r * r + (4.0 / 3.0) * p.phi0 * kPi * cube(r) - target;
        if (g > 0.0) hi = r; else lo = r;
        const double gp = p.l0 + 2.0 * p.m * r + 4.0 * p.phi0 * kPi * r * r;
        double next = r - g / gp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-15 * p.R) return next;
        r = next;
    }
    return r;
}

/// f = lambda1*f1 + lambda2*f2 + lambda3*f3 with f_i the densities of R*Z_i,
/// Z_1 uniform, Z_2 Beta(2,1), Z_3 Beta(3,1). With m < 0 the decomposition is
/// still algebraically valid but lambda2 < 0 is not a probability
/// (negative_weight is set).
struct Mixture3D {
    double lambda1;
    double lambda2;
    double lambda3;
    double R;
    bool negative_weight;

    double f1(double r) const { return (r >= 0.0 && r <= R) ? 1.0 / R : 0.0; }
    double f2(double r) const { return (r >= 0.0 && r <= R) ? 2.0 * r / (R * R) : 0.0; }
    double f3(double r) const { return (r >= 0.0 && r <= R) ? 3.0 * r * r / cube(R) : 0.0; }
    double density(double r) const { return lambda1 * f1(r) + lambda2 * f2(r) + lambda3 * f3(r); }
};

inline Mixture3D mixture3d(const Params3D& p) {
    p.validate();
    const double t = p.l0 + p.m * p.R + (4.0 / 3.0) * p.phi0 * kPi * square(p.R);
    const double l1 = p.l0 / t;
    const double l2 = p.m * p.R / t;
    const double l3 = (4.0 / 3.0) * p.phi0 * kPi * square(p.R) / t;
    return {l1, l2, l3, p.R, p.m < 0.0};
}

struct Moments3D {
    double mean;        // E(D)
    double mean_sq;     // E(D^2)
    double mean_cube;   // E(D^3)
    double var_d;       // Var(D)
    double var_d2;      // Var(D^2)
    double cov_d_d2;    // Cov(D, D^2)
};

/// Closed-form moments and the covariance matrix of (D, D^2); the pi in the
/// displayed forms generalizes to phi0*pi.
inline Moments3D moments3d(const Params3D& p) {
    p.validate();
    const double P = p.phi0 * kPi;
    const double R = p.R, l0 = p.l0, m = p.m;
    const double t = l0 + m * R + (4.0 / 3.0) * P * R * R;
    Moments3D out;
    out.mean = (3.0 * l0 * R + 4.0 * m * R * R + 6.0 * P * cube(R)) / (6.0 * t);
    out.mean_sq = (10.0 * l0 * R * R + 15.0 * m * cube(R) + 24.0 * P * square(R * R)) / (30.0 * t);
    out.mean_cube = (15.0 * l0 * cube(R) + 24.0 * m * square(R * R) + 40.0 * P * square(R) * cube(R)) / (60.0 * t);
    const double s = 4.0 * P * R * R + 3.0 * m * R + 3.0 * l0; // = 3t
    const double den = 20.0 * s * s;
    out.var_d = R * R *
                (12.0 * P * P * square(R * R) + 24.0 * P * m * cube(R) + 10.0 * m * m * R * R +
                 44.0 * P * l0 * R * R + 30.0 * l0 * m * R + 15.0 * l0 * l0) /
                den;
    out.var_d2 = square(R * R) *
                 (768.0 * P * P * square(R * R) + 1360.0 * P * m * cube(R) + 525.0 * m * m * R * R +
                  1920.0 * P * l0 * R * R + 1260.0 * l0 * m * R + 560.0 * l0 * l0) /
                 (35.0 * den);
    out.cov_d_d2 = cube(R) *
                   (16.0 * P * P * square(R * R) + 30.0 * P * m * cube(R) + 12.0 * m * m * R * R +
                    48.0 * P * l0 * R * R + 32.0 * l0 * m * R + 15.0 * l0 * l0) /
                   den;
    return out;
}

// ---------------------------------------------------------------------------
// links to the volume polynomial
// ---------------------------------------------------------------------------

/// The derivative of the volume polynomial: the boundary measure of the
/// offset set at radius r.
inline double offset_boundary_measure(double r, const VolumePolynomial& poly) {
    if (!(r > 0.0 && r < poly.r_max))
        throw std::domain_error("offset_boundary_measure: r must be in (0, r_max)");
    return poly.derivative(r);
}

/// F(r) = (V(r) - mu) / (V(R) - mu): the distance cdf induced by a volume
/// polynomial with band radius R.
inline double band_cdf(const VolumePolynomial& poly, double R, double r) {
    if (!(R > 0.0 && R <= poly.r_max)) throw std::domain_error("band_cdf: R must be in (0, r_max]");
    if (!(r >= 0.0 && r <= R)) throw std::domain_error("band_cdf: r must be in [0, R]");
    return poly.band_measure(r) / poly.band_measure(R);
}

inline Params2D params_from(const VolumePolynomial& poly, double R) {
    if (poly.dimension != 2) throw std::invalid_argument("params_from: expected a 2-d polynomial");
    Params2D p{poly.l0, poly.phi0, R};
    p.validate();
    return p;
}

inline Params3D params3_from(const VolumePolynomial& poly, double R) {
    if (poly.dimension != 3) throw std::invalid_argument("params3_from: expected a 3-d polynomial");
    Params3D p{poly.l0, poly.m, R, poly.phi0};
    p.validate();
    return p;
}

} // namespace polyvol

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

#include "polyvol/common.hpp"
#include "polyvol/estimators2d.hpp"
#include "polyvol/model.hpp"
#include "polyvol/nelder_mead.hpp"
#include "polyvol/sampler.hpp"

namespace polyvol {

struct Estimate3D {
    double l0 = 0.0;
    double m = 0.0;
    Method method = Method::mom3d;
    std::size_t n = 0;
    std::optional<double> asymp_var_l0; // variance of the estimate (sigma^2 / n), plug-in
    std::optional<double> asymp_var_m;
    EstimateFlags flags;
};

namespace detail {

struct Moments12 {
    double d1; // mean of D
    double d2; // mean of D^2
    double d3; // mean of D^3
};

inline Moments12 sample_moments(const DistanceSample& s) {
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;
    for (double d : s.values) {
        m1 += d;
        m2 += d * d;
        m3 += d * d * d;
    }
    const double n = static_cast<double>(s.size());
    return {m1 / n, m2 / n, m3 / n};
}

} // namespace detail

// ---------------------------------------------------------------------------
// joint method of moments for (L0, M), phi0 = 1
// ---------------------------------------------------------------------------

/// Delta-method variances of sqrt(n)(L~-L0) and sqrt(n)(M~-M):
/// grad(g_i)^t Sigma_{D,D^2} grad(g_i) with the closed-form gradients at the
/// population moments.
inline std::pair<double, double> mom3d_asymp_var(double l0, double m, double R) {
    const Params3D p{l0, m, R, 1.0};
    const Moments3D mo = moments3d(p);
    const double S = 4.0 * kPi * R * R + 3.0 * m * R + 3.0 * l0;
    const double g1u = 3.0 * (5.0 * l0 - 4.0 * kPi * R * R) * S / (kPi * cube(R));
    const double g1v = 5.0 * (2.0 * kPi * R * R - 3.0 * l0) * S / (kPi * square(R * R));
    const double g2u = (32.0 * kPi * R + 15.0 * m) * S / (kPi * cube(R));
    const double g2v = -15.0 * (2.0 * kPi * R + m) * S / (kPi * square(R * R));
    const auto quad = [&](double du, double dv) {
        return du * du * mo.var_d + 2.0 * du * dv * mo.cov_d_d2 + dv * dv * mo.var_d2;
    };
    return {quad(g1u, g1v), quad(g2u, g2v)};
}

/// L~ = (2 pi R^2/5) (3R^2 - 12 Dbar R + 10 D2bar) / (R^2 - 6 Dbar R + 6 D2bar),
/// M~ = -(4 pi R/5) (3R^2 - 16 Dbar R + 15 D2bar) / (same denominator).
inline Estimate3D mom3d_from_moments(double d1, double d2, double R, std::size_t n = 0) {
    if (!(R > 0.0)) throw std::invalid_argument("mom_3d: R must be > 0");
    const double den = R * R - 6.0 * d1 * R + 6.0 * d2;
    if (den == 0.0) throw NumericalError("mom_3d: moment system denominator is exactly zero");
    Estimate3D e;
    e.method = Method::mom3d;
    e.n = n;
    e.l0 = (2.0 * kPi * R * R / 5.0) * (3.0 * R * R - 12.0 * d1 * R + 10.0 * d2) / den;
    e.m = -(4.0 * kPi * R / 5.0) * (3.0 * R * R - 16.0 * d1 * R + 15.0 * d2) / den;
    e.flags.pole_proximity = std::abs(den) < 1e-6 * R * R;
    if (n > 0) {
        try {
            const auto [vl, vm] = mom3d_asymp_var(e.l0, e.m, R);
            e.asymp_var_l0 = vl / static_cast<double>(n);
            e.asymp_var_m = vm / static_cast<double>(n);
        } catch (const std::invalid_argument&) {
            // plug-in parameters outside the family; report the point estimate only
        }
    }
    return e;
}

inline Estimate3D mom_3d(const DistanceSample& sample) {
    detail::require_nonempty(sample, "mom_3d");
    const auto mo = detail::sample_moments(sample);
    return mom3d_from_moments(mo.d1, mo.d2, sample.band_radius, sample.size());
}

// ---------------------------------------------------------------------------
// mixture-weight system and truncated estimators
// ---------------------------------------------------------------------------

/// Solution of the three-moment system for (lambda1, lambda2, lambda3):
/// lambda1 = 12 (6 R^2 Dbar - 20 R D2bar + 15 D3bar) / R^3, etc.
inline std::array<double, 3> lambda3_from_moments(double d1, double d2, double d3, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("lambda3_mom: R must be > 0");
    const double R3 = cube(R);
    return {12.0 * (6.0 * R * R * d1 - 20.0 * R * d2 + 15.0 * d3) / R3,
            -30.0 * (4.0 * R * R * d1 - 15.0 * R * d2 + 12.0 * d3) / R3,
            20.0 * (3.0 * R * R * d1 - 12.0 * R * d2 + 10.0 * d3) / R3};
}

inline std::array<double, 3> lambda3_mom(const DistanceSample& sample) {
    detail::require_nonempty(sample, "lambda3_mom");
    const auto mo = detail::sample_moments(sample);
    return lambda3_from_moments(mo.d1, mo.d2, mo.d3, sample.band_radius);
}

/// Truncated series estimators built from (lambda1, lambda2). With
/// a = l1/(1-l1), b = l2/(1-l2), q = a*b:
///   L~ = (4 pi R^2 / (3 l2)) sum_{j=1..K} q^j = (4 pi R^2/3) (a/(1-l2)) sum_{j=0..K-1} q^j
///   M~ = (4 pi R / 3) (1/(1-l2)) [ sum_{j=1..K} q^j + l2 ]
/// (the second form of L~ is used: it is algebraically identical for l2 != 0
/// and continuous at l2 = 0). Inputs are clamped into [0, 1-1e-9] first.
inline Estimate3D truncated_3d(double lambda1, double lambda2, int K, double R,
                               std::size_t n = 0) {
    if (K < 1) throw std::invalid_argument("truncated_3d: K must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("truncated_3d: R must be > 0");
    static constexpr double kTop = 1.0 - 1e-9;
    const auto clamp01 = [](double x) {
        return std::isfinite(x) ? std::clamp(x, 0.0, kTop) : (x > 0.0 ? kTop : 0.0);
    };
    const double l1 = clamp01(lambda1);
    const double l2 = clamp01(lambda2);
    Estimate3D e;
    e.method = Method::tmom3d;
    e.n = n;
    e.flags.clamp_applied = (l1 != lambda1) || (l2 != lambda2);
    const double a = l1 / (1.0 - l1);
    const double b = l2 / (1.0 - l2);
    const double q = a * b;
    double sum0 = 0.0, pow = 1.0; // sum_{j=0..K-1} q^j
    for (int j = 0; j < K; ++j) {
        sum0 += pow;
        pow *= q;
    }
    const double sum1 = q * sum0; // sum_{j=1..K} q^j
    e.l0 = (4.0 * kPi * R * R / 3.0) * (a / (1.0 - l2)) * sum0;
    e.m = (4.0 * kPi * R / 3.0) * (sum1 + l2) / (1.0 - l2);
    return e;
}

// ---------------------------------------------------------------------------
// numerically maximized likelihood
// ---------------------------------------------------------------------------

struct SearchBox3D {
    double l0_min = 1e-8;
    double l0_max = 1e3;
    double m_min = -1e2;
    double m_max = 1e3;
};

/// Maximizes sum_i log f(D_i; L0, M) over the box by Nelder-Mead from the
/// method-of-moments start (projected to a feasible point). The returned
/// log-likelihood never falls below the start's.
inline Estimate3D mle_3d(const DistanceSample& sample, SearchBox3D box = {}) {
    detail::require_nonempty(sample, "mle_3d");
    if (!(box.l0_min > 0.0 && box.l0_max > box.l0_min && box.m_max > box.m_min))
        throw std::invalid_argument("mle_3d: invalid search box");
    const double R = sample.band_radius;
    const double n = static_cast<double>(sample.size());
    const double inf = std::numeric_limits<double>::infinity();

    const auto feasible = [&](double L, double M) {
        if (!(L >= box.l0_min && L <= box.l0_max && M >= box.m_min && M <= box.m_max)) return false;
        const double norm = L * R + M * R * R + (4.0 / 3.0) * kPi * cube(R);
        if (!(norm > 0.0)) return false;
        // density numerator positive on [0, R]
        if (!(L > 0.0) || !(L + 2.0 * M * R + 4.0 * kPi * R * R > 0.0)) return false;
        const double r_crit = -M / (4.0 * kPi);
        if (r_crit > 0.0 && r_crit < R && !(L - M * M / (4.0 * kPi) > 0.0)) return false;
        return true;
    };
    const auto neg_loglik = [&](std::array<double, 2> p) {
        const auto [L, M] = p;
        if (!feasible(L, M)) return inf;
        double acc = 0.0;
        for (double d : sample.values) {
            const double dens = L + 2.0 * M * d + 4.0 * kPi * d * d;
            if (!(dens > 0.0)) return inf;
            acc += std::log(dens);
        }
        const double norm = L * R + M * R * R + (4.0 / 3.0) * kPi * cube(R);
        return -(acc - n * std::log(norm));
    };

    // start from the MOM point, pulled into the feasible region if needed
    Estimate3D start_est;
    try {
        start_est = mom_3d(sample);
    } catch (const NumericalError&) {
        start_est.l0 = kPi;
        start_est.m = 0.0;
    }
    double L0 = std::clamp(start_est.l0, box.l0_min, box.l0_max);
    double M0 = std::clamp(start_est.m, box.m_min, box.m_max);
    for (int k = 0; k < 64 && !feasible(L0, M0); ++k) M0 *= 0.5;
    if (!feasible(L0, M0)) {
        L0 = std::clamp(kPi, box.l0_min, box.l0_max);
        M0 = 0.0;
    }
    if (!feasible(L0, M0)) throw NumericalError("mle_3d: no feasible starting point in the box");

    const std::array<double, 2> start{L0, M0};
    const std::array<double, 2> step{std::max(0.1 * std::abs(L0), 0.05 * kPi * R * R),
                                     std::max(0.1 * std::abs(M0), 0.05 * kPi * R)};
    const auto res = nelder_mead_2d(neg_loglik, start, step, 1e-10, 1e-13, 800);

    const double f_start = neg_loglik(start);
    if (!(res.f <= f_start))
        throw NumericalError("mle_3d: optimizer failed to improve on the moment start");

    Estimate3D e;
    e.method = Method::mle3d;
    e.n = sample.size();
    e.l0 = res.x[0];
    e.m = res.x[1];
    const double eps_l = 1e-6 * (box.l0_max - box.l0_min);
    const double eps_m = 1e-6 * (box.m_max - box.m_min);
    e.flags.boundary_hit = (e.l0 - box.l0_min < eps_l) || (box.l0_max - e.l0 < eps_l) ||
                           (e.m - box.m_min < eps_m) || (box.m_max - e.m < eps_m);
    return e;
}

} // namespace polyvol

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "polyvol/common.hpp"
#include "polyvol/model.hpp"
#include "polyvol/root_finding.hpp"
#include "polyvol/sampler.hpp"

namespace polyvol {

enum class Method { mom, mle, tmom, tmle, em, mom3d, mle3d, tmom3d };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::mom: return "mom";
        case Method::mle: return "mle";
        case Method::tmom: return "tmom";
        case Method::tmle: return "tmle";
        case Method::em: return "em";
        case Method::mom3d: return "mom3d";
        case Method::mle3d: return "mle3d";
        case Method::tmom3d: return "tmom3d";
    }
    return "?";
}

struct EstimateFlags {
    bool pole_proximity = false; // the moment equation was nearly singular
    bool boundary_hit = false;   // the optimizer/solver stopped on a boundary
    bool clamp_applied = false;  // a lambda estimate was clamped before use
};

struct Estimate {
    double value = 0.0;
    Method method = Method::mom;
    std::size_t n = 0;
    std::optional<double> asymp_variance; // variance of the estimate (sigma^2 / n), plug-in
    EstimateFlags flags;
};

namespace detail {

inline double sample_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

inline void require_nonempty(const DistanceSample& s, const char* who) {
    if (s.values.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
}

} // namespace detail

// ---------------------------------------------------------------------------
// method of moments
// ---------------------------------------------------------------------------

/// Asymptotic variance of sqrt(n)*(L~ - L0). For phi0 = 1 this is the closed
/// form (L0+pi R)^2 [3 (1 + L0/(pi R))^2 - 1]; in general it is
/// g'(mu)^2 Var(D) with g the moment inverse, which reduces to the same
/// expression at phi0 = 1.
inline double mom_asymp_var(double l0, double R, double phi0 = 1.0) {
    if (!(l0 > 0.0 && R > 0.0 && phi0 > 0.0))
        throw std::invalid_argument("mom_asymp_var: l0, R, phi0 must be > 0");
    if (phi0 == 1.0) {
        const double t = 1.0 + l0 / (kPi * R);
        return square(l0 + kPi * R) * (3.0 * t * t - 1.0);
    }
    const Params2D p{l0, phi0, R};
    const Moments2D mo = moments2d(p);
    const double C = 2.0 * phi0 * kPi * R / 3.0;
    const double gprime = -C * R / square(2.0 * mo.mean - R);
    return gprime * gprime * mo.variance;
}

/// L~ = (2*phi0*pi*R/3) * (2R - 3*Dbar) / (2*Dbar - R). Returns the raw value
/// (possibly negative); pole_proximity is set when |2*Dbar - R| < 1e-3*R and
/// the exact pole 2*Dbar = R throws.
inline Estimate mom_l0_from_mean(double dbar, double R, double phi0 = 1.0, std::size_t n = 0) {
    if (!(phi0 > 0.0)) throw std::invalid_argument("mom_l0: phi0 must be > 0");
    if (!(R > 0.0)) throw std::invalid_argument("mom_l0: R must be > 0");
    const double denom = 2.0 * dbar - R;
    if (denom == 0.0) throw NumericalError("mom_l0: sample mean sits exactly on the pole 2*Dbar = R");
    Estimate e;
    e.method = Method::mom;
    e.n = n;
    e.value = (2.0 * phi0 * kPi * R / 3.0) * (2.0 * R - 3.0 * dbar) / denom;
    e.flags.pole_proximity = std::abs(denom) < 1e-3 * R;
    if (e.value > 0.0 && n > 0)
        e.asymp_variance = mom_asymp_var(e.value, R, phi0) / static_cast<double>(n);
    return e;
}

inline Estimate mom_l0(const DistanceSample& sample, double phi0 = 1.0) {
    detail::require_nonempty(sample, "mom_l0");
    return mom_l0_from_mean(detail::sample_mean(sample.values), sample.band_radius, phi0,
                            sample.size());
}

// ---------------------------------------------------------------------------
// maximum likelihood
// ---------------------------------------------------------------------------

/// Fisher information for L0 in the 2-d family:
/// I(L0) = (1/(L0+P R)) [ (1/(2 P R)) log(1 + 2 P R / L0) - 1/(L0+P R) ],
/// P = phi0*pi.
inline double fisher_info_2d(double l0, double R, double phi0 = 1.0) {
    if (!(l0 > 0.0 && R > 0.0 && phi0 > 0.0))
        throw std::invalid_argument("fisher_info_2d: l0, R, phi0 must be > 0");
    const double P = phi0 * kPi;
    return (1.0 / (l0 + P * R)) *
           (std::log1p(2.0 * P * R / l0) / (2.0 * P * R) - 1.0 / (l0 + P * R));
}

/// Inverse Fisher information: the Frechet-Cramer-Rao bound attained by the MLE.
inline double mle_asymp_var(double l0, double R, double phi0 = 1.0) {
    return 1.0 / fisher_info_2d(l0, R, phi0);
}

/// Solves the likelihood equation sum_i 1/(L + 2 P D_i) = n/(L + P R) on
/// (0, search_cap]. The score has no interior upcrossing, so a sign check at
/// the ends routes the boundary cases: score <= 0 at 0 means the maximum is at
/// L = 0, score >= 0 at the cap means the root lies beyond it (it is at
/// +infinity when all D_i < R/2); both return flagged values, not errors.
inline Estimate mle_l0(const DistanceSample& sample, double phi0 = 1.0, double search_cap = 0.0) {
    detail::require_nonempty(sample, "mle_l0");
    if (!(phi0 > 0.0)) throw std::invalid_argument("mle_l0: phi0 must be > 0");
    const double R = sample.band_radius;
    const double P = phi0 * kPi;
    if (search_cap == 0.0) search_cap = 1e3 * P * R;
    if (!(search_cap > 0.0)) throw std::invalid_argument("mle_l0: search_cap must be > 0");
    const double n = static_cast<double>(sample.size());

    const auto score = [&](double L) {
        double acc = 0.0;
        for (double d : sample.values) acc += 1.0 / (L + 2.0 * P * d);
        return acc - n / (L + P * R);
    };

    Estimate e;
    e.method = Method::mle;
    e.n = sample.size();

    double lo = 0.0;
    double f_lo = score(lo);
    if (std::isinf(f_lo)) { // a zero distance in a manifold sample
        lo = 1e-12 * P * R;
        f_lo = score(lo);
    }
    if (!(f_lo > 0.0)) {
        e.value = 0.0;
        e.flags.boundary_hit = true;
        return e;
    }
    const double f_hi = score(search_cap);
    if (!(f_hi < 0.0)) {
        e.value = search_cap;
        e.flags.boundary_hit = true;
        return e;
    }
    e.value = brent_root(score, lo, search_cap, f_lo, f_hi, 1e-12);
    e.asymp_variance = mle_asymp_var(e.value, R, phi0) / n;
    return e;
}

// ---------------------------------------------------------------------------
// mixture-weight estimators and truncation
// ---------------------------------------------------------------------------

/// lambda~ = 4 - 6*Dbar/R (from E(D) = 2R/3 - lambda R/6); unclamped.
inline double lambda_mom(const DistanceSample& sample) {
    detail::require_nonempty(sample, "lambda_mom");
    return 4.0 - 6.0 * detail::sample_mean(sample.values) / sample.band_radius;
}

inline double lambda_mom_clamped(const DistanceSample& sample) {
    return std::clamp(lambda_mom(sample), 0.0, 1.0);
}

struct EmResult {
    double lambda = 0.5;
    std::size_t iterations = 0;
    std::vector<double> lambda_trace;  // lambda after each M step
    std::vector<double> loglik_trace;  // observed-data log likelihood, non-decreasing
};

/// EM for the mixture weight of f = lambda f1 + (1-lambda) f2 (f1 uniform on
/// (0,R), f2 the R*Beta(2,1) density). E step: Y_i = lambda f1(D_i) / (lambda
/// f1(D_i) + (1-lambda) f2(D_i)); M step: lambda <- mean(Y). Starts at 0.5.
inline EmResult lambda_em(const DistanceSample& sample, double tolerance = 1e-5,
                          std::size_t max_iter = 500) {
    detail::require_nonempty(sample, "lambda_em");
    if (!(tolerance > 0.0)) throw std::invalid_argument("lambda_em: tolerance must be > 0");
    const double R = sample.band_radius;
    const double f1 = 1.0 / R;
    const double n = static_cast<double>(sample.size());

    EmResult res;
    res.lambda = 0.5;
    res.lambda_trace.push_back(res.lambda); // the fixed starting value
    const auto loglik = [&](double lam) {
        double acc = 0.0;
        for (double d : sample.values) acc += std::log(lam * f1 + (1.0 - lam) * 2.0 * d / (R * R));
        return acc;
    };
    for (std::size_t k = 0; k < max_iter; ++k) {
        double acc = 0.0;
        for (double d : sample.values) {
            const double a = res.lambda * f1;
            const double b = (1.0 - res.lambda) * 2.0 * d / (R * R);
            acc += a / (a + b);
        }
        const double next = acc / n;
        res.lambda_trace.push_back(next);
        res.loglik_trace.push_back(loglik(next));
        ++res.iterations;
        const bool converged = std::abs(next - res.lambda) < tolerance;
        res.lambda = next;
        if (converged) return res;
    }
    throw NumericalError("lambda_em: no convergence after max_iter iterations");
}

/// Truncated series estimator L^ = phi0*pi*R * sum_{k=1..K} lambda^k with the
/// lambda estimate clamped to [0,1] first. Finite for every input.
inline Estimate truncated_l0(double lambda_hat, int K, double R, double phi0 = 1.0,
                             Method tag = Method::tmom, std::size_t n = 0) {
    if (K < 1) throw std::invalid_argument("truncated_l0: K must be >= 1");
    if (!(R > 0.0 && phi0 > 0.0)) throw std::invalid_argument("truncated_l0: R, phi0 must be > 0");
    Estimate e;
    e.method = tag;
    e.n = n;
    const double lam = std::isfinite(lambda_hat) ? std::clamp(lambda_hat, 0.0, 1.0)
                                                 : (lambda_hat > 0.0 ? 1.0 : 0.0);
    e.flags.clamp_applied = lam != lambda_hat;
    double sum = 0.0, pow = 1.0;
    for (int k = 1; k <= K; ++k) {
        pow *= lam;
        sum += pow;
    }
    e.value = phi0 * kPi * R * sum;
    return e;
}

} // namespace polyvol

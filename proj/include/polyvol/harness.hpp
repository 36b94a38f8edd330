#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "polyvol/common.hpp"
#include "polyvol/estimators2d.hpp"
#include "polyvol/estimators3d.hpp"
#include "polyvol/model.hpp"
#include "polyvol/sampler.hpp"
#include "polyvol/stats.hpp"

namespace polyvol {

// ---------------------------------------------------------------------------
// replication engine
// ---------------------------------------------------------------------------

struct ReplicationConfig {
    std::variant<Shape2D, Shape3D> shape;
    double R = 1.0;
    std::optional<double> phi0_override;
    std::size_t n = 100;
    std::size_t B = 1;
    std::vector<Method> methods;
    int K = 5;
    double em_tolerance = 1e-5;
    std::uint64_t master_seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency

    bool is_2d() const { return std::holds_alternative<Shape2D>(shape); }

    void validate() const {
        if (!(R > 0.0)) throw std::invalid_argument("ReplicationConfig: R must be > 0");
        if (n < 2) throw std::invalid_argument("ReplicationConfig: n must be >= 2");
        if (B < 1) throw std::invalid_argument("ReplicationConfig: B must be >= 1");
        if (K < 1) throw std::invalid_argument("ReplicationConfig: K must be >= 1");
        if (!(em_tolerance > 0.0)) throw std::invalid_argument("ReplicationConfig: emTolerance must be > 0");
        if (methods.empty()) throw std::invalid_argument("ReplicationConfig: methods must be nonempty");
        for (Method m : methods) {
            const bool is3d = m == Method::mom3d || m == Method::mle3d || m == Method::tmom3d;
            const bool is2d = m == Method::mom || m == Method::mle || m == Method::tmom || m == Method::tmle;
            if (!is2d && !is3d)
                throw std::invalid_argument("ReplicationConfig: unsupported method in study");
            if (is3d == is_2d())
                throw std::invalid_argument("ReplicationConfig: method dimension does not match shape");
        }
    }
};

/// One estimate series (a method/parameter pair) across all replications.
/// Failed replications hold NaN: they are excluded from the median/MAD but
/// contribute the limit value 1 to the bounded error.
struct EstimateSeries {
    Method method;
    std::string parameter; // "L0" or "M"
    double target = 0.0;
    std::vector<double> estimates;
    std::size_t n_failed = 0;
    std::size_t n_pole = 0;
    std::size_t n_boundary = 0;
    std::size_t n_clamped = 0;
};

struct SummaryRow {
    Method method;
    std::string parameter;
    double target;
    double median;
    double scaled_mad;
    double mean_dbe;
    std::size_t n_ok;
    std::size_t n_failed;
    std::size_t n_pole;
    std::size_t n_boundary;
    std::size_t n_clamped;
};

struct ReplicationSummary {
    std::vector<EstimateSeries> series;
    bool r_exceeds_r_max = false;
    double phi0 = 1.0;

    std::vector<SummaryRow> rows() const {
        std::vector<SummaryRow> out;
        for (const auto& s : series) {
            const RobustStats rs = robust_stats(s.estimates);
            out.push_back({s.method, s.parameter, s.target, rs.median, rs.scaled_mad,
                           mean_bounded_error(s.estimates, s.target),
                           s.estimates.size() - s.n_failed, s.n_failed, s.n_pole, s.n_boundary,
                           s.n_clamped});
        }
        return out;
    }

    const EstimateSeries& find(Method m, const std::string& parameter = "L0") const {
        for (const auto& s : series)
            if (s.method == m && s.parameter == parameter) return s;
        throw std::invalid_argument("ReplicationSummary: no such series");
    }
};

namespace detail {

struct SeriesLayout {
    Method method;
    std::string parameter;
    double target;
};

inline void record(EstimateSeries& s, std::size_t r, double value, const EstimateFlags& f) {
    s.estimates[r] = value;
    if (f.pole_proximity) ++s.n_pole;
    if (f.boundary_hit) ++s.n_boundary;
    if (f.clamp_applied) ++s.n_clamped;
}

inline void record_failure(EstimateSeries& s, std::size_t r) {
    s.estimates[r] = std::numeric_limits<double>::quiet_NaN();
    ++s.n_failed;
}

} // namespace detail

/// Runs B independent replications; replication r is seeded with
/// derive_stream_seed(master_seed, r), so the output is identical for any
/// thread count. All requested methods are applied to the same sample within
/// a replication. Per-replication numerical failures are recorded, not fatal,
/// unless a method fails in more than half the replications.
inline ReplicationSummary replicate(const ReplicationConfig& config) {
    config.validate();

    const VolumePolynomial poly = config.is_2d()
                                      ? analytic_volume(std::get<Shape2D>(config.shape))
                                      : analytic_volume(std::get<Shape3D>(config.shape));
    const double phi0 = config.phi0_override.value_or(poly.phi0);

    ReplicationSummary summary;
    summary.phi0 = phi0;
    summary.r_exceeds_r_max = config.R > poly.r_max;

    if (config.is_2d() && !(phi0 > 0.0))
        throw std::invalid_argument("replicate: 2-d estimation needs phi0 > 0 (supply an override)");

    for (Method m : config.methods) {
        const bool has_m = m == Method::mom3d || m == Method::mle3d || m == Method::tmom3d;
        summary.series.push_back({m, "L0", poly.l0, std::vector<double>(config.B), 0, 0, 0, 0});
        if (has_m)
            summary.series.push_back({m, "M", poly.m, std::vector<double>(config.B), 0, 0, 0, 0});
    }

    std::mutex flag_mutex; // protects the flag/failure counters only
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= config.B) return;
            try {
                DistanceSample sample;
                try {
                    const std::uint64_t seed = derive_stream_seed(config.master_seed, r);
                    if (config.is_2d())
                        sample = sample_distances(std::get<Shape2D>(config.shape), config.R,
                                                  config.n, seed);
                    else
                        sample = sample_distances(std::get<Shape3D>(config.shape), config.R,
                                                  config.n, seed);
                } catch (const NumericalError&) {
                    std::lock_guard lock(flag_mutex);
                    for (auto& s : summary.series) detail::record_failure(s, r);
                    continue;
                }

                std::size_t idx = 0;
                for (Method m : config.methods) {
                    auto apply2d = [&](EstimateSeries& s, auto&& fn) {
                        try {
                            const Estimate e = fn();
                            std::lock_guard lock(flag_mutex);
                            detail::record(s, r, e.value, e.flags);
                        } catch (const NumericalError&) {
                            std::lock_guard lock(flag_mutex);
                            detail::record_failure(s, r);
                        }
                    };
                    auto apply3d = [&](EstimateSeries& sl, EstimateSeries& sm, auto&& fn) {
                        try {
                            const Estimate3D e = fn();
                            std::lock_guard lock(flag_mutex);
                            detail::record(sl, r, e.l0, e.flags);
                            detail::record(sm, r, e.m, e.flags);
                        } catch (const NumericalError&) {
                            std::lock_guard lock(flag_mutex);
                            detail::record_failure(sl, r);
                            detail::record_failure(sm, r);
                        }
                    };
                    switch (m) {
                        case Method::mom:
                            apply2d(summary.series[idx], [&] { return mom_l0(sample, phi0); });
                            idx += 1;
                            break;
                        case Method::mle:
                            apply2d(summary.series[idx], [&] { return mle_l0(sample, phi0); });
                            idx += 1;
                            break;
                        case Method::tmom:
                            apply2d(summary.series[idx], [&] {
                                return truncated_l0(lambda_mom(sample), config.K, config.R, phi0,
                                                    Method::tmom, config.n);
                            });
                            idx += 1;
                            break;
                        case Method::tmle:
                            apply2d(summary.series[idx], [&] {
                                const EmResult em = lambda_em(sample, config.em_tolerance);
                                return truncated_l0(em.lambda, config.K, config.R, phi0,
                                                    Method::tmle, config.n);
                            });
                            idx += 1;
                            break;
                        case Method::mom3d:
                            apply3d(summary.series[idx], summary.series[idx + 1],
                                    [&] { return mom_3d(sample); });
                            idx += 2;
                            break;
                        case Method::mle3d:
                            apply3d(summary.series[idx], summary.series[idx + 1],
                                    [&] { return mle_3d(sample); });
                            idx += 2;
                            break;
                        case Method::tmom3d:
                            apply3d(summary.series[idx], summary.series[idx + 1], [&] {
                                const auto lam = lambda3_mom(sample);
                                return truncated_3d(lam[0], lam[1], config.K, config.R, config.n);
                            });
                            idx += 2;
                            break;
                        default:
                            break;
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(config.B));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (const auto& s : summary.series)
        if (2 * s.n_failed > config.B)
            throw NumericalError("replicate: failure rate above 50% for method " +
                                 std::string(to_string(s.method)));
    return summary;
}

// ---------------------------------------------------------------------------
// asymptotic variance curves (figure generation)
// ---------------------------------------------------------------------------

struct VarCurvePoint {
    double R;
    double sd_first;  // 2-d: sigma of the moment estimator; 3-d: sigma of L~
    double sd_second; // 2-d: sigma of the MLE; 3-d: sigma of M~
};

inline std::vector<double> radius_grid(double r_min, double r_max, std::size_t steps) {
    if (!(r_min > 0.0 && r_max >= r_min)) throw std::invalid_argument("radius grid: need 0 < rmin <= rmax");
    if (steps < 1) throw std::invalid_argument("radius grid: steps must be >= 1");
    std::vector<double> rs;
    rs.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i)
        rs.push_back(steps == 1 ? r_min
                                : r_min + (r_max - r_min) * static_cast<double>(i) /
                                      static_cast<double>(steps - 1));
    return rs;
}

inline std::vector<VarCurvePoint> var_curve_2d(double l0, double r_min, double r_max,
                                               std::size_t steps, double phi0 = 1.0) {
    std::vector<VarCurvePoint> out;
    for (double R : radius_grid(r_min, r_max, steps))
        out.push_back({R, std::sqrt(mom_asymp_var(l0, R, phi0)), std::sqrt(mle_asymp_var(l0, R, phi0))});
    return out;
}

inline std::vector<VarCurvePoint> var_curve_3d(double l0, double m, double r_min, double r_max,
                                               std::size_t steps) {
    std::vector<VarCurvePoint> out;
    for (double R : radius_grid(r_min, r_max, steps)) {
        const auto [vl, vm] = mom3d_asymp_var(l0, m, R);
        out.push_back({R, std::sqrt(vl), std::sqrt(vm)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// volume-polynomial fitting (membership diagnostic)
// ---------------------------------------------------------------------------

struct VolFitResult {
    int degree = 2;
    std::vector<double> coefficients;   // c0 + c1 r + ... + c_degree r^degree
    std::vector<double> coefficient_se; // from (X^t W X)^{-1}
    double max_studentized_residual = 0.0;
    std::vector<VolumeEstimate> points;
};

namespace detail {

/// Solves A x = b (small dense system) by Gaussian elimination with partial
/// pivoting; also returns A^{-1} for the coefficient covariance.
inline void solve_spd(std::vector<long double>& A, std::vector<long double>& b, int k,
                      std::vector<long double>& inv) {
    inv.assign(static_cast<std::size_t>(k) * k, 0.0L);
    for (int i = 0; i < k; ++i) inv[i * k + i] = 1.0L;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(static_cast<double>(A[r * k + col])) >
                std::abs(static_cast<double>(A[piv * k + col])))
                piv = r;
        if (A[piv * k + col] == 0.0L) throw NumericalError("vol_fit: singular normal equations");
        if (piv != col) {
            for (int c = 0; c < k; ++c) {
                std::swap(A[piv * k + c], A[col * k + c]);
                std::swap(inv[piv * k + c], inv[col * k + c]);
            }
            std::swap(b[piv], b[col]);
        }
        const long double d = A[col * k + col];
        for (int c = 0; c < k; ++c) {
            A[col * k + c] /= d;
            inv[col * k + c] /= d;
        }
        b[col] /= d;
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const long double f = A[r * k + col];
            if (f == 0.0L) continue;
            for (int c = 0; c < k; ++c) {
                A[r * k + c] -= f * A[col * k + c];
                inv[r * k + c] -= f * inv[col * k + c];
            }
            b[r] -= f * b[col];
        }
    }
}

} // namespace detail

/// Weighted least-squares polynomial fit to Monte Carlo volume estimates,
/// weights 1/se^2. The coefficient standard errors are exact for independent
/// grid batches (which monte_carlo_volume provides).
template <class Shape>
VolFitResult vol_fit(const Shape& shape, std::span<const double> r_grid, std::size_t n_mc,
                     int degree, std::uint64_t seed) {
    if (degree != 2 && degree != 3) throw std::invalid_argument("vol_fit: degree must be 2 or 3");
    std::vector<double> distinct(r_grid.begin(), r_grid.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) < degree + 1)
        throw std::invalid_argument("vol_fit: grid has too few distinct radii for the degree");

    VolFitResult out;
    out.degree = degree;
    out.points = monte_carlo_volume(shape, r_grid, n_mc, seed);

    const int k = degree + 1;
    std::vector<long double> A(static_cast<std::size_t>(k) * k, 0.0L), b(k, 0.0L), inv;
    for (const auto& pt : out.points) {
        if (!(pt.std_error > 0.0))
            throw NumericalError("vol_fit: degenerate Monte Carlo estimate (zero standard error)");
        const long double w = 1.0L / (static_cast<long double>(pt.std_error) * pt.std_error);
        long double xi = 1.0L;
        std::vector<long double> pows(k);
        for (int j = 0; j < k; ++j) {
            pows[j] = xi;
            xi *= pt.r;
        }
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) A[i * k + j] += w * pows[i] * pows[j];
            b[i] += w * pows[i] * pt.value;
        }
    }
    detail::solve_spd(A, b, k, inv);
    out.coefficients.resize(k);
    out.coefficient_se.resize(k);
    for (int i = 0; i < k; ++i) {
        out.coefficients[i] = static_cast<double>(b[i]);
        out.coefficient_se[i] = std::sqrt(std::max(0.0, static_cast<double>(inv[i * k + i])));
    }
    for (const auto& pt : out.points) {
        double fit = 0.0, xi = 1.0;
        for (int j = 0; j < k; ++j) {
            fit += out.coefficients[j] * xi;
            xi *= pt.r;
        }
        out.max_studentized_residual =
            std::max(out.max_studentized_residual, std::abs(pt.value - fit) / pt.std_error);
    }
    return out;
}

// ---------------------------------------------------------------------------
// flat-file output
// ---------------------------------------------------------------------------

inline void write_summary_csv(const ReplicationSummary& summary, std::ostream& os) {
    os << "method,parameter,target,median,scaled_mad,mean_dbe,n_ok,n_failed,n_pole,n_boundary,n_clamped\n";
    for (const auto& row : summary.rows()) {
        os << to_string(row.method) << ',' << row.parameter << ',' << detail::format_double(row.target)
           << ',' << detail::format_double(row.median) << ',' << detail::format_double(row.scaled_mad)
           << ',' << detail::format_double(row.mean_dbe) << ',' << row.n_ok << ',' << row.n_failed
           << ',' << row.n_pole << ',' << row.n_boundary << ',' << row.n_clamped << "\n";
    }
}

inline void write_raw_csv(const ReplicationSummary& summary, std::ostream& os) {
    os << "replication,method,parameter,estimate\n";
    if (summary.series.empty()) return;
    const std::size_t B = summary.series.front().estimates.size();
    for (std::size_t r = 0; r < B; ++r)
        for (const auto& s : summary.series)
            os << r << ',' << to_string(s.method) << ',' << s.parameter << ','
               << detail::format_double(s.estimates[r]) << "\n";
}

inline void write_curve_csv(std::span<const VarCurvePoint> curve, bool is_2d, std::ostream& os) {
    os << (is_2d ? "R,sd_mom,sd_mle\n" : "R,sd_l0,sd_m\n");
    for (const auto& p : curve)
        os << detail::format_double(p.R) << ',' << detail::format_double(p.sd_first) << ','
           << detail::format_double(p.sd_second) << "\n";
}

inline void write_volfit_csv(const VolFitResult& fit, std::ostream& os) {
    os << "coefficient,value,std_error\n";
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i)
        os << 'c' << i << ',' << detail::format_double(fit.coefficients[i]) << ','
           << detail::format_double(fit.coefficient_se[i]) << "\n";
    os << "# max_studentized_residual=" << detail::format_double(fit.max_studentized_residual) << "\n";
    os << "r,volume,std_error\n";
    for (const auto& p : fit.points)
        os << detail::format_double(p.r) << ',' << detail::format_double(p.value) << ','
           << detail::format_double(p.std_error) << "\n";
}

/// Minimal SVG line plot: axes plus one polyline per series.
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
    std::string stroke = "#1f77b4";
    bool dashed = false;
};

inline void write_svg_plot(std::span<const SvgSeries> series, const std::string& x_label,
                           const std::string& y_label, std::ostream& os) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
    y_lo = std::min(y_lo, 0.0);
    const auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
    const auto py = [&](double y) { return H - mb - (y - y_lo) / (y_hi - y_lo) * (H - mt - mb); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
       << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";
    os << "<text x=\"" << ml << "\" y=\"" << H - mb + 18 << "\" font-size=\"12\" text-anchor=\"middle\">"
       << detail::format_double(x_lo) << "</text>\n";
    os << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 18
       << "\" font-size=\"12\" text-anchor=\"middle\">" << detail::format_double(x_hi) << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(y_lo) << "\" font-size=\"12\" text-anchor=\"end\">"
       << detail::format_double(y_lo) << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(y_hi) + 4
       << "\" font-size=\"12\" text-anchor=\"end\">" << detail::format_double(y_hi) << "</text>\n";
    int legend_y = static_cast<int>(mt) + 14;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.stroke << "\" stroke-width=\"1.5\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (const auto& [x, y] : s.points) os << px(x) << ',' << py(y) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << W - mr - 150 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
           << s.stroke << "\">" << s.name << (s.dashed ? " (dashed)" : "") << "</text>\n";
        legend_y += 16;
    }
    os << "</svg>\n";
}

} // namespace polyvol

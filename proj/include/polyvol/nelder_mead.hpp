#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace polyvol {

struct NelderMeadResult {
    std::array<double, 2> x;
    double f = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Two-dimensional Nelder-Mead simplex minimizer. The objective may return
/// +infinity outside its feasible region; the start point must be feasible.
template <class F>
NelderMeadResult nelder_mead_2d(F&& f, std::array<double, 2> start, std::array<double, 2> step,
                                double x_tol = 1e-9, double f_tol = 1e-12,
                                std::size_t max_iter = 600) {
    using Pt = std::array<double, 2>;
    struct Vertex {
        Pt x;
        double f;
    };
    std::array<Vertex, 3> s;
    s[0] = {start, f(start)};
    for (int i = 0; i < 2; ++i) {
        Pt p = start;
        p[i] += step[i];
        double fp = f(p);
        for (int shrink = 0; shrink < 60 && !std::isfinite(fp); ++shrink) {
            p[i] = start[i] + 0.5 * (p[i] - start[i]);
            fp = f(p);
        }
        s[i + 1] = {p, fp};
    }

    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        const double size = std::max(
            std::max(std::abs(s[1].x[0] - s[0].x[0]), std::abs(s[2].x[0] - s[0].x[0])),
            std::max(std::abs(s[1].x[1] - s[0].x[1]), std::abs(s[2].x[1] - s[0].x[1])));
        const double fspread = std::abs(s[2].f - s[0].f);
        if (size <= x_tol * (1.0 + std::abs(s[0].x[0]) + std::abs(s[0].x[1])) &&
            (fspread <= f_tol * (1.0 + std::abs(s[0].f)) || !std::isfinite(fspread))) {
            res.converged = true;
            break;
        }
        const Pt centroid{0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
        const auto along = [&](double t) {
            return Pt{centroid[0] + t * (centroid[0] - s[2].x[0]),
                      centroid[1] + t * (centroid[1] - s[2].x[1])};
        };
        const Pt xr = along(1.0);
        const double fr = f(xr);
        if (fr < s[0].f) {
            const Pt xe = along(2.0);
            const double fe = f(xe);
            s[2] = (fe < fr) ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < s[1].f) {
            s[2] = {xr, fr};
        } else {
            const Pt xc = (fr < s[2].f) ? along(0.5) : along(-0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, s[2].f)) {
                s[2] = {xc, fc};
            } else { // shrink toward the best vertex
                for (int i = 1; i < 3; ++i) {
                    s[i].x[0] = 0.5 * (s[i].x[0] + s[0].x[0]);
                    s[i].x[1] = 0.5 * (s[i].x[1] + s[0].x[1]);
                    s[i].f = f(s[i].x);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    res.x = s[0].x;
    res.f = s[0].f;
    return res;
}

} // namespace polyvol

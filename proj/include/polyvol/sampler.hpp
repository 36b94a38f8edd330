#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "polyvol/common.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/shapes.hpp"

namespace polyvol {

/// The observed distances D_1..D_n from points uniform on the band B(S,R)\S.
struct DistanceSample {
    std::vector<double> values;
    double band_radius = 0.0;
    ModelTag model = ModelTag::solid;
    std::uint64_t seed = 0;
    std::string shape_ref; // optional shape description (compact json)

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (!(band_radius > 0.0)) throw std::invalid_argument("DistanceSample: band radius must be > 0");
        for (double v : values)
            if (!(v > 0.0 && v <= band_radius) && !(model == ModelTag::manifold && v == 0.0))
                throw std::invalid_argument("DistanceSample: values must lie in (0, R]");
    }
};

namespace detail {

inline bool band_accepts(ModelTag model, double d, double R) {
    if (d > R) return false;
    return model == ModelTag::manifold ? d >= 0.0 : d > 0.0;
}

// Rejection from the margin-R bounding box. Gives up if, after a large probe,
// the acceptance rate is still below 1e-4 (degenerate geometry).
template <class Shape, class Point, class Draw>
std::vector<Point> rejection_sample(const Shape& shape, double R, std::size_t n,
                                    std::uint64_t seed, Draw draw) {
    if (!(R > 0.0)) throw std::invalid_argument("sample_band: R must be > 0");
    if (n < 1) throw std::invalid_argument("sample_band: n must be >= 1");
    validate(shape);
    const ModelTag model = model_tag(shape);
    SplitMix64 rng(seed);
    std::vector<Point> out;
    out.reserve(n);
    std::size_t candidates = 0;
    constexpr std::size_t kProbe = 200000;
    while (out.size() < n) {
        const Point p = draw(rng);
        ++candidates;
        if (band_accepts(model, distance(shape, p), R)) out.push_back(p);
        if (candidates == kProbe && out.size() < kProbe / 10000)
            throw NumericalError("sample_band: acceptance rate below 1e-4 over probe batch");
    }
    return out;
}

} // namespace detail

/// n i.i.d. points uniform on B(S,R)\S (solid) or B(S,R) (manifold).
/// Deterministic given the seed.
inline std::vector<Vec2> sample_band(const Shape2D& shape, double R, std::size_t n,
                                     std::uint64_t seed) {
    const Box2 box = bounding_box(shape, R);
    return detail::rejection_sample<Shape2D, Vec2>(shape, R, n, seed, [&](SplitMix64& rng) {
        const double x = rng.next_in(box.lo.x, box.hi.x);
        const double y = rng.next_in(box.lo.y, box.hi.y);
        return Vec2{x, y};
    });
}

inline std::vector<Vec3> sample_band(const Shape3D& shape, double R, std::size_t n,
                                     std::uint64_t seed) {
    const Box3 box = bounding_box(shape, R);
    return detail::rejection_sample<Shape3D, Vec3>(shape, R, n, seed, [&](SplitMix64& rng) {
        const double x = rng.next_in(box.lo.x, box.hi.x);
        const double y = rng.next_in(box.lo.y, box.hi.y);
        const double z = rng.next_in(box.lo.z, box.hi.z);
        return Vec3{x, y, z};
    });
}

/// Elementwise distances; preserves order and count.
inline std::vector<double> distances(const Shape2D& shape, std::span<const Vec2> points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Vec2& p : points) out.push_back(distance(shape, p));
    return out;
}

inline std::vector<double> distances(const Shape3D& shape, std::span<const Vec3> points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Vec3& p : points) out.push_back(distance(shape, p));
    return out;
}

/// sample_band + distances + metadata in one step.
template <class Shape>
DistanceSample sample_distances(const Shape& shape, double R, std::size_t n, std::uint64_t seed) {
    const auto points = sample_band(shape, R, n, seed);
    DistanceSample s;
    s.values = distances(shape, points);
    s.band_radius = R;
    s.model = model_tag(shape);
    s.seed = seed;
    s.shape_ref = to_json(shape).dump();
    return s;
}

/// Right-continuous empirical cdf on [0, R].
class Ecdf {
public:
    explicit Ecdf(const DistanceSample& sample)
        : sorted_(sample.values), band_radius_(sample.band_radius) {
        if (sorted_.empty()) throw std::invalid_argument("Ecdf: empty sample");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double operator()(double r) const {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), r);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    double band_radius() const { return band_radius_; }
    const std::vector<double>& sorted_values() const { return sorted_; }

    /// sup_r |F_hat(r) - F(r)| against a reference cdf.
    template <class Cdf>
    double kolmogorov_distance(Cdf&& cdf) const {
        const double n = static_cast<double>(sorted_.size());
        double sup = 0.0;
        for (std::size_t i = 0; i < sorted_.size(); ++i) {
            const double F = cdf(sorted_[i]);
            sup = std::max(sup, std::max((i + 1.0) / n - F, F - i / n));
        }
        return sup;
    }

private:
    std::vector<double> sorted_;
    double band_radius_;
};

inline Ecdf empirical_cdf(const DistanceSample& sample) { return Ecdf(sample); }

/// Hit-count estimate of mu(B(S,r)) with its standard error.
struct VolumeEstimate {
    double r;
    double value;
    double std_error;
};

/// Independent batch of n_mc box points per grid radius, so the estimates
/// (and their standard errors) are independent across the grid.
template <class Shape>
std::vector<VolumeEstimate> monte_carlo_volume(const Shape& shape, std::span<const double> r_grid,
                                               std::size_t n_mc, std::uint64_t seed) {
    if (n_mc < 10000) throw std::invalid_argument("monte_carlo_volume: n_mc must be >= 1e4");
    validate(shape);
    std::vector<VolumeEstimate> out;
    out.reserve(r_grid.size());
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        const double r = r_grid[k];
        if (!(r > 0.0)) throw std::invalid_argument("monte_carlo_volume: grid radii must be > 0");
        const auto box = bounding_box(shape, r);
        SplitMix64 rng(derive_stream_seed(seed, k));
        std::size_t hits = 0;
        if constexpr (std::is_same_v<Shape, Shape2D>) {
            for (std::size_t i = 0; i < n_mc; ++i) {
                const Vec2 p{rng.next_in(box.lo.x, box.hi.x), rng.next_in(box.lo.y, box.hi.y)};
                if (distance(shape, p) <= r) ++hits;
            }
        } else {
            for (std::size_t i = 0; i < n_mc; ++i) {
                const Vec3 p{rng.next_in(box.lo.x, box.hi.x), rng.next_in(box.lo.y, box.hi.y),
                             rng.next_in(box.lo.z, box.hi.z)};
                if (distance(shape, p) <= r) ++hits;
            }
        }
        const double vol = box.volume();
        const double prob = static_cast<double>(hits) / static_cast<double>(n_mc);
        out.push_back({r, vol * prob, vol * std::sqrt(prob * (1.0 - prob) / static_cast<double>(n_mc))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV persistence: header line `# R=<value> model=<tag> seed=<int>`, then one
// value per line.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_csv(const DistanceSample& sample, std::ostream& os) {
    os << "# R=" << detail::format_double(sample.band_radius) << " model=" << to_string(sample.model)
       << " seed=" << sample.seed << "\n";
    for (double v : sample.values) os << detail::format_double(v) << "\n";
}

inline void write_csv(const DistanceSample& sample, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open for writing: " + path);
    write_csv(sample, os);
}

inline DistanceSample read_sample_csv(std::istream& is) {
    DistanceSample s;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# R=", 0) != 0)
        throw std::invalid_argument("distance sample csv: missing `# R=...` header");
    std::istringstream hs(line.substr(2));
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "R") s.band_radius = std::stod(val);
        else if (key == "seed") s.seed = std::stoull(val);
        else if (key == "model") {
            if (val == "manifold") s.model = ModelTag::manifold;
            else if (val == "solid") s.model = ModelTag::solid;
            else throw std::invalid_argument("distance sample csv: unknown model tag " + val);
        }
    }
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        s.values.push_back(std::stod(line));
    }
    s.validate();
    return s;
}

inline DistanceSample read_sample_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open: " + path);
    return read_sample_csv(is);
}

} // namespace polyvol

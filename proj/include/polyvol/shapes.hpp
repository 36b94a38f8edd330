#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "polyvol/common.hpp"
#include "polyvol/geometry.hpp"
#include "polyvol/volume_polynomial.hpp"

namespace polyvol {

/// Sampling model: manifold sets have measure zero (distances are taken to
/// the set itself, points with distance 0 form a null set); solid sets have
/// interior and the band excludes the set.
enum class ModelTag { manifold, solid };

inline const char* to_string(ModelTag t) { return t == ModelTag::manifold ? "manifold" : "solid"; }

// ---------------------------------------------------------------------------
// 2-d shapes
// ---------------------------------------------------------------------------

struct Disk {
    Vec2 center;
    double radius = 1.0;
};

/// Union of pairwise disjoint solid disks (positive surface gaps).
struct DiskUnion {
    std::vector<Disk> disks;
};

/// Union of circle curves (manifold model): the boundaries only, no interior.
struct CircleUnion {
    std::vector<Disk> circles;
};

struct Rectangle {
    Vec2 lo;
    Vec2 hi;
};

/// Strictly convex polygon, vertices in counterclockwise order.
struct ConvexPolygon {
    std::vector<Vec2> vertices;
};

/// Open polygonal curve (manifold model).
struct Polyline {
    std::vector<Vec2> vertices;
};

/// Closed unit disk minus the open sector of angle `wedge_angle` centered on
/// the +x axis, 0 < wedge_angle < pi/2.
struct WedgeCutDisk {
    double wedge_angle = kPi / 3.0;
};

using Shape2D = std::variant<Disk, DiskUnion, CircleUnion, Rectangle, ConvexPolygon, Polyline, WedgeCutDisk>;

// ---------------------------------------------------------------------------
// 3-d shapes
// ---------------------------------------------------------------------------

struct Ball {
    Vec3 center;
    double radius = 1.0;
};

/// Union of solid balls with pairwise disjoint interiors; balls may touch.
struct BallUnion {
    std::vector<Ball> balls;
};

/// Solid cone in canonical pose: base disk of radius height*tan(aperture/2)
/// on z = 0, apex at (0,0,height). `aperture` is the full apex angle.
struct Cone {
    double height = 1.0;
    double aperture = kPi / 3.0;
};

/// B(A,1) where A is the segment from (0,0,-1) to (0,0,-1/2) together with
/// the point (0,0,1): a unit ball overlapping a unit capsule.
struct SegmentPointDilation {};

using Shape3D = std::variant<Ball, BallUnion, Cone, SegmentPointDilation>;

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

namespace detail {

inline double disk_gap(const Disk& a, const Disk& b) {
    return norm(a.center - b.center) - a.radius - b.radius;
}

inline double ball_gap(const Ball& a, const Ball& b) {
    return norm(a.center - b.center) - a.radius - b.radius;
}

/// Interior angle at vertex i of a polyline, in (0, pi].
inline double polyline_angle(const Polyline& p, std::size_t i) {
    const Vec2 u = p.vertices[i - 1] - p.vertices[i];
    const Vec2 v = p.vertices[i + 1] - p.vertices[i];
    const double c = std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0);
    return std::acos(c);
}

} // namespace detail

inline void validate(const Shape2D& shape) {
    struct V {
        void operator()(const Disk& d) const {
            if (!(d.radius > 0.0)) throw std::invalid_argument("Disk: radius must be > 0");
        }
        void operator()(const DiskUnion& u) const {
            if (u.disks.empty()) throw std::invalid_argument("DiskUnion: needs at least one disk");
            for (const auto& d : u.disks) (*this)(d);
            for (std::size_t i = 0; i < u.disks.size(); ++i)
                for (std::size_t j = i + 1; j < u.disks.size(); ++j)
                    if (!(detail::disk_gap(u.disks[i], u.disks[j]) > 0.0))
                        throw std::invalid_argument("DiskUnion: disks must be disjoint with positive gaps");
        }
        void operator()(const CircleUnion& u) const {
            if (u.circles.empty()) throw std::invalid_argument("CircleUnion: needs at least one circle");
            for (const auto& d : u.circles)
                if (!(d.radius > 0.0)) throw std::invalid_argument("CircleUnion: radius must be > 0");
            for (std::size_t i = 0; i < u.circles.size(); ++i)
                for (std::size_t j = i + 1; j < u.circles.size(); ++j)
                    if (!(detail::disk_gap(u.circles[i], u.circles[j]) > 0.0))
                        throw std::invalid_argument("CircleUnion: circles must be disjoint with positive gaps");
        }
        void operator()(const Rectangle& r) const {
            if (!(r.hi.x > r.lo.x && r.hi.y > r.lo.y))
                throw std::invalid_argument("Rectangle: hi must exceed lo componentwise");
        }
        void operator()(const ConvexPolygon& p) const {
            const auto& v = p.vertices;
            if (v.size() < 3) throw std::invalid_argument("ConvexPolygon: needs at least 3 vertices");
            for (std::size_t i = 0; i < v.size(); ++i) {
                const Vec2 a = v[i];
                const Vec2 b = v[(i + 1) % v.size()];
                const Vec2 c = v[(i + 2) % v.size()];
                if (!(cross(b - a, c - b) > 0.0))
                    throw std::invalid_argument("ConvexPolygon: vertices must be strictly convex, counterclockwise");
            }
        }
        void operator()(const Polyline& p) const {
            const auto& v = p.vertices;
            if (v.size() < 2) throw std::invalid_argument("Polyline: needs at least 2 vertices");
            for (std::size_t i = 0; i + 1 < v.size(); ++i)
                if (!(norm(v[i + 1] - v[i]) > 0.0))
                    throw std::invalid_argument("Polyline: consecutive vertices must be distinct");
            for (std::size_t i = 1; i + 1 < v.size(); ++i)
                if (!(detail::polyline_angle(p, i) > 1e-9))
                    throw std::invalid_argument("Polyline: interior angles must be positive");
        }
        void operator()(const WedgeCutDisk& w) const {
            if (!(w.wedge_angle > 0.0 && w.wedge_angle < kPi / 2.0))
                throw std::invalid_argument("WedgeCutDisk: wedge angle must be in (0, pi/2)");
        }
    };
    std::visit(V{}, shape);
}

inline void validate(const Shape3D& shape) {
    struct V {
        void operator()(const Ball& b) const {
            if (!(b.radius > 0.0)) throw std::invalid_argument("Ball: radius must be > 0");
        }
        void operator()(const BallUnion& u) const {
            if (u.balls.empty()) throw std::invalid_argument("BallUnion: needs at least one ball");
            for (const auto& b : u.balls) (*this)(b);
            for (std::size_t i = 0; i < u.balls.size(); ++i)
                for (std::size_t j = i + 1; j < u.balls.size(); ++j)
                    if (detail::ball_gap(u.balls[i], u.balls[j]) < -1e-12)
                        throw std::invalid_argument("BallUnion: ball interiors must be disjoint");
        }
        void operator()(const Cone& c) const {
            if (!(c.height > 0.0)) throw std::invalid_argument("Cone: height must be > 0");
            if (!(c.aperture > 0.0 && c.aperture < kPi))
                throw std::invalid_argument("Cone: aperture must be in (0, pi)");
        }
        void operator()(const SegmentPointDilation&) const {}
    };
    std::visit(V{}, shape);
}

// ---------------------------------------------------------------------------
// model tag
// ---------------------------------------------------------------------------

inline ModelTag model_tag(const Shape2D& shape) {
    if (std::holds_alternative<CircleUnion>(shape) || std::holds_alternative<Polyline>(shape))
        return ModelTag::manifold;
    return ModelTag::solid;
}

inline ModelTag model_tag(const Shape3D&) { return ModelTag::solid; }

// ---------------------------------------------------------------------------
// distance
// ---------------------------------------------------------------------------

inline double distance(const Shape2D& shape, Vec2 p) {
    struct V {
        Vec2 p;
        double operator()(const Disk& d) const {
            return std::max(norm(p - d.center) - d.radius, 0.0);
        }
        double operator()(const DiskUnion& u) const {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& d : u.disks)
                best = std::min(best, std::max(norm(p - d.center) - d.radius, 0.0));
            return best;
        }
        double operator()(const CircleUnion& u) const {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : u.circles)
                best = std::min(best, std::abs(norm(p - c.center) - c.radius));
            return best;
        }
        double operator()(const Rectangle& r) const {
            const double dx = std::max({r.lo.x - p.x, 0.0, p.x - r.hi.x});
            const double dy = std::max({r.lo.y - p.y, 0.0, p.y - r.hi.y});
            return std::hypot(dx, dy);
        }
        double operator()(const ConvexPolygon& poly) const {
            const auto& v = poly.vertices;
            bool inside = true;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const Vec2 a = v[i];
                const Vec2 b = v[(i + 1) % v.size()];
                if (cross(b - a, p - a) < 0.0) inside = false;
                best = std::min(best, segment_distance(p, a, b));
            }
            return inside ? 0.0 : best;
        }
        double operator()(const Polyline& poly) const {
            const auto& v = poly.vertices;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < v.size(); ++i)
                best = std::min(best, segment_distance(p, v[i], v[i + 1]));
            return best;
        }
        double operator()(const WedgeCutDisk& w) const {
            // fold to the upper half plane; S is symmetric about the x axis
            const Vec2 q{p.x, std::abs(p.y)};
            const double rho = w.wedge_angle;
            const double r = norm(q);
            const double theta = std::atan2(q.y, q.x); // in [0, pi]
            if (r <= 1.0 && theta >= rho / 2.0) return 0.0;
            const Vec2 corner{std::cos(rho / 2.0), std::sin(rho / 2.0)};
            const double d_arc = (theta >= rho / 2.0) ? std::abs(r - 1.0) : norm(q - corner);
            const double d_edge = segment_distance(q, Vec2{0.0, 0.0}, corner);
            return std::min(d_arc, d_edge);
        }
    };
    return std::visit(V{p}, shape);
}

inline double distance(const Shape3D& shape, Vec3 p) {
    struct V {
        Vec3 p;
        double operator()(const Ball& b) const {
            return std::max(norm(p - b.center) - b.radius, 0.0);
        }
        double operator()(const BallUnion& u) const {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : u.balls)
                best = std::min(best, std::max(norm(p - b.center) - b.radius, 0.0));
            return best;
        }
        double operator()(const Cone& c) const {
            // reduce to the (radial, axial) half plane; the cross-section is
            // the triangle (0,0), (a,0), (0,h) and the reduction is exact for
            // a solid of revolution.
            const double a = c.height * std::tan(c.aperture / 2.0);
            const Vec2 q{std::hypot(p.x, p.y), p.z};
            if (q.y >= 0.0 && q.x / a + q.y / c.height <= 1.0) return 0.0;
            return std::min(segment_distance(q, {0.0, 0.0}, {a, 0.0}),
                            segment_distance(q, {a, 0.0}, {0.0, c.height}));
        }
        double operator()(const SegmentPointDilation&) const {
            const double d_point = norm(p - Vec3{0.0, 0.0, 1.0});
            const double d_seg = segment_distance(p, {0.0, 0.0, -1.0}, {0.0, 0.0, -0.5});
            return std::max(std::min(d_point, d_seg) - 1.0, 0.0);
        }
    };
    return std::visit(V{p}, shape);
}

// ---------------------------------------------------------------------------
// bounding box
// ---------------------------------------------------------------------------

inline Box2 bounding_box(const Shape2D& shape, double margin) {
    if (!(margin >= 0.0)) throw std::invalid_argument("bounding_box: margin must be >= 0");
    struct V {
        Box2 operator()(const Disk& d) const {
            return {{d.center.x - d.radius, d.center.y - d.radius},
                    {d.center.x + d.radius, d.center.y + d.radius}};
        }
        Box2 operator()(const DiskUnion& u) const { return over_disks(u.disks); }
        Box2 operator()(const CircleUnion& u) const { return over_disks(u.circles); }
        Box2 operator()(const Rectangle& r) const { return {r.lo, r.hi}; }
        Box2 operator()(const ConvexPolygon& p) const { return over_points(p.vertices); }
        Box2 operator()(const Polyline& p) const { return over_points(p.vertices); }
        Box2 operator()(const WedgeCutDisk&) const { return {{-1.0, -1.0}, {1.0, 1.0}}; }

        static Box2 over_disks(const std::vector<Disk>& ds) {
            Box2 b = V{}(ds.front());
            for (const auto& d : ds) {
                const Box2 db = V{}(d);
                b.lo.x = std::min(b.lo.x, db.lo.x);
                b.lo.y = std::min(b.lo.y, db.lo.y);
                b.hi.x = std::max(b.hi.x, db.hi.x);
                b.hi.y = std::max(b.hi.y, db.hi.y);
            }
            return b;
        }
        static Box2 over_points(const std::vector<Vec2>& vs) {
            Box2 b{vs.front(), vs.front()};
            for (const auto& v : vs) {
                b.lo.x = std::min(b.lo.x, v.x);
                b.lo.y = std::min(b.lo.y, v.y);
                b.hi.x = std::max(b.hi.x, v.x);
                b.hi.y = std::max(b.hi.y, v.y);
            }
            return b;
        }
    };
    return expand(std::visit(V{}, shape), margin);
}

inline Box3 bounding_box(const Shape3D& shape, double margin) {
    if (!(margin >= 0.0)) throw std::invalid_argument("bounding_box: margin must be >= 0");
    struct V {
        Box3 operator()(const Ball& b) const {
            return {{b.center.x - b.radius, b.center.y - b.radius, b.center.z - b.radius},
                    {b.center.x + b.radius, b.center.y + b.radius, b.center.z + b.radius}};
        }
        Box3 operator()(const BallUnion& u) const {
            Box3 box = (*this)(u.balls.front());
            for (const auto& bl : u.balls) {
                const Box3 bb = (*this)(bl);
                box.lo.x = std::min(box.lo.x, bb.lo.x);
                box.lo.y = std::min(box.lo.y, bb.lo.y);
                box.lo.z = std::min(box.lo.z, bb.lo.z);
                box.hi.x = std::max(box.hi.x, bb.hi.x);
                box.hi.y = std::max(box.hi.y, bb.hi.y);
                box.hi.z = std::max(box.hi.z, bb.hi.z);
            }
            return box;
        }
        Box3 operator()(const Cone& c) const {
            const double a = c.height * std::tan(c.aperture / 2.0);
            return {{-a, -a, 0.0}, {a, a, c.height}};
        }
        Box3 operator()(const SegmentPointDilation&) const {
            return {{-1.0, -1.0, -2.0}, {1.0, 1.0, 2.0}};
        }
    };
    return expand(std::visit(V{}, shape), margin);
}

// ---------------------------------------------------------------------------
// analytic volume polynomials
// ---------------------------------------------------------------------------

namespace detail {

inline double half_min_gap_disks(const std::vector<Disk>& ds) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = i + 1; j < ds.size(); ++j)
            g = std::min(g, disk_gap(ds[i], ds[j]));
    return g / 2.0;
}

/// Area of the overlap of two half-stadia meeting at a vertex with interior
/// angle theta: (r^2/2) * (2*cot(theta/2) + pi + theta). At theta = pi this is
/// pi*r^2, which cancels exactly one pair of end caps of a straight joint.
inline double polyline_vertex_coefficient(double theta) {
    return 0.5 * (2.0 / std::tan(theta / 2.0) + kPi + theta);
}

} // namespace detail

inline VolumePolynomial analytic_volume(const Shape2D& shape) {
    validate(shape);
    struct V {
        VolumePolynomial operator()(const Disk& d) const {
            return VolumePolynomial::dim2(kPi * square(d.radius), 2.0 * kPi * d.radius, 1.0,
                                          std::numeric_limits<double>::infinity());
        }
        VolumePolynomial operator()(const DiskUnion& u) const {
            double mu = 0.0, l0 = 0.0;
            for (const auto& d : u.disks) {
                mu += kPi * square(d.radius);
                l0 += 2.0 * kPi * d.radius;
            }
            return VolumePolynomial::dim2(mu, l0, static_cast<double>(u.disks.size()),
                                          detail::half_min_gap_disks(u.disks));
        }
        VolumePolynomial operator()(const CircleUnion& u) const {
            // offset of each circle is an annulus: area 4*pi*radius*r, so the
            // volume function is linear and phi0 = 0.
            double l0 = 0.0;
            double r_max = std::numeric_limits<double>::infinity();
            for (const auto& c : u.circles) {
                l0 += 4.0 * kPi * c.radius;
                r_max = std::min(r_max, c.radius);
            }
            if (u.circles.size() > 1)
                r_max = std::min(r_max, detail::half_min_gap_disks(u.circles));
            return VolumePolynomial::dim2(0.0, l0, 0.0, r_max);
        }
        VolumePolynomial operator()(const Rectangle& r) const {
            const double w = r.hi.x - r.lo.x;
            const double h = r.hi.y - r.lo.y;
            return VolumePolynomial::dim2(w * h, 2.0 * (w + h), 1.0,
                                          std::numeric_limits<double>::infinity());
        }
        VolumePolynomial operator()(const ConvexPolygon& p) const {
            const auto& v = p.vertices;
            double area2 = 0.0, per = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const Vec2 a = v[i];
                const Vec2 b = v[(i + 1) % v.size()];
                area2 += cross(a, b);
                per += norm(b - a);
            }
            return VolumePolynomial::dim2(0.5 * area2, per, 1.0,
                                          std::numeric_limits<double>::infinity());
        }
        VolumePolynomial operator()(const Polyline& p) const {
            const auto& v = p.vertices;
            const std::size_t k = v.size() - 1; // segments
            double total_len = 0.0;
            for (std::size_t i = 0; i < k; ++i) total_len += norm(v[i + 1] - v[i]);
            double quad = static_cast<double>(k) * kPi;
            double r_max = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < k; ++i) {
                const double theta = detail::polyline_angle(p, i);
                quad -= detail::polyline_vertex_coefficient(theta);
                // vertex overlap region must stay within both incident segments
                const double len = std::min(norm(v[i] - v[i - 1]), norm(v[i + 1] - v[i]));
                r_max = std::min(r_max, len * std::sin(theta / 2.0));
                // end caps of the incident segments must not reach the other segment
                r_max = std::min(r_max, segment_distance(v[i - 1], v[i], v[i + 1]) / 2.0);
                r_max = std::min(r_max, segment_distance(v[i + 1], v[i - 1], v[i]) / 2.0);
            }
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 2; j < k; ++j)
                    r_max = std::min(r_max, segment_segment_distance(v[i], v[i + 1], v[j], v[j + 1]) / 2.0);
            if (!(r_max > 0.0))
                throw std::invalid_argument("Polyline: no closed-form volume (degenerate geometry)");
            return VolumePolynomial::dim2(0.0, 2.0 * total_len, quad / kPi, r_max);
        }
        VolumePolynomial operator()(const WedgeCutDisk& w) const {
            const double rho = w.wedge_angle;
            const double quad = (3.0 * kPi - rho) / 2.0 - 1.0 / std::tan(rho / 2.0);
            return VolumePolynomial::dim2(kPi - rho / 2.0, 2.0 * kPi - rho + 2.0, quad / kPi,
                                          std::tan(rho / 2.0));
        }
    };
    return std::visit(V{}, shape);
}

inline VolumePolynomial analytic_volume(const Shape3D& shape) {
    validate(shape);
    struct V {
        VolumePolynomial operator()(const Ball& b) const {
            return VolumePolynomial::dim3((4.0 / 3.0) * kPi * cube(b.radius),
                                          4.0 * kPi * square(b.radius), 4.0 * kPi * b.radius, 1.0,
                                          std::numeric_limits<double>::infinity());
        }
        VolumePolynomial operator()(const BallUnion& u) const {
            const auto& bs = u.balls;
            double mu = 0.0, l0 = 0.0, m = 0.0;
            for (const auto& b : bs) {
                mu += (4.0 / 3.0) * kPi * cube(b.radius);
                l0 += 4.0 * kPi * square(b.radius);
                m += 4.0 * kPi * b.radius;
            }
            // a touching pair subtracts a lens whose offset volume is itself a
            // cubic polynomial: quadratic coefficient 4*pi*ri*rj/(ri+rj) and
            // cubic coefficient (4/3)*pi (one Euler unit per merge).
            std::size_t touching = 0;
            double min_gap = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < bs.size(); ++i)
                for (std::size_t j = i + 1; j < bs.size(); ++j) {
                    const double g = detail::ball_gap(bs[i], bs[j]);
                    if (std::abs(g) <= 1e-12) {
                        ++touching;
                        m -= 4.0 * kPi * bs[i].radius * bs[j].radius / (bs[i].radius + bs[j].radius);
                    } else {
                        min_gap = std::min(min_gap, g);
                    }
                }
            if (touching > 0 && bs.size() > 2)
                throw std::invalid_argument(
                    "BallUnion: closed-form volume for touching balls is registered only for pairs");
            const double r_max = (touching > 0) ? std::numeric_limits<double>::infinity() : min_gap / 2.0;
            const double phi0 = static_cast<double>(bs.size()) - static_cast<double>(touching);
            return VolumePolynomial::dim3(mu, l0, m, phi0, r_max);
        }
        VolumePolynomial operator()(const Cone& c) const {
            const double beta = c.aperture / 2.0;
            const double h = c.height;
            const double a = h * std::tan(beta);
            const double slant = std::hypot(a, h);
            const double mu = kPi * square(a) * h / 3.0;
            const double l0 = kPi * a * slant + kPi * square(a);
            // smooth lateral part integrates mean curvature to pi*h; the base
            // rim is an edge of length 2*pi*a with exterior angle pi/2 + beta.
            const double m = kPi * a * (kPi / 2.0 + beta) + kPi * h;
            return VolumePolynomial::dim3(mu, l0, m, 1.0, std::numeric_limits<double>::infinity());
        }
        VolumePolynomial operator()(const SegmentPointDilation&) const {
            // V(r) = (4/3)pi(1+r)^3 + 2pi(1+r)^2 - (9/32)pi, exact for all r
            // (ball and capsule of radius 1+r overlap in a lens for every r>=0).
            return VolumePolynomial::dim3(293.0 * kPi / 96.0, 8.0 * kPi, 6.0 * kPi, 1.0,
                                          std::numeric_limits<double>::infinity());
        }
    };
    return std::visit(V{}, shape);
}

// ---------------------------------------------------------------------------
// JSON serialization: {"variant": name, "params": {...}}
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline json vec_json(Vec2 v) { return json::array({v.x, v.y}); }
inline json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

inline Vec2 vec2_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("shape json: expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Vec3 vec3_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("shape json: expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json disks_json(const std::vector<Disk>& ds) {
    json a = json::array();
    for (const auto& d : ds) a.push_back({{"center", vec_json(d.center)}, {"radius", d.radius}});
    return a;
}

inline std::vector<Disk> disks_from(const json& j) {
    std::vector<Disk> out;
    for (const auto& e : j) out.push_back({vec2_from(e.at("center")), e.at("radius").get<double>()});
    return out;
}

inline json points_json(const std::vector<Vec2>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(vec_json(v));
    return a;
}

inline std::vector<Vec2> points_from(const json& j) {
    std::vector<Vec2> out;
    for (const auto& e : j) out.push_back(vec2_from(e));
    return out;
}

} // namespace detail

inline nlohmann::json to_json(const Shape2D& shape) {
    using nlohmann::json;
    struct V {
        json operator()(const Disk& d) const {
            return {{"variant", "disk"},
                    {"params", {{"center", detail::vec_json(d.center)}, {"radius", d.radius}}}};
        }
        json operator()(const DiskUnion& u) const {
            return {{"variant", "disk_union"}, {"params", {{"disks", detail::disks_json(u.disks)}}}};
        }
        json operator()(const CircleUnion& u) const {
            return {{"variant", "circle_union"}, {"params", {{"circles", detail::disks_json(u.circles)}}}};
        }
        json operator()(const Rectangle& r) const {
            return {{"variant", "rectangle"},
                    {"params", {{"min", detail::vec_json(r.lo)}, {"max", detail::vec_json(r.hi)}}}};
        }
        json operator()(const ConvexPolygon& p) const {
            return {{"variant", "convex_polygon"}, {"params", {{"vertices", detail::points_json(p.vertices)}}}};
        }
        json operator()(const Polyline& p) const {
            return {{"variant", "polyline"}, {"params", {{"vertices", detail::points_json(p.vertices)}}}};
        }
        json operator()(const WedgeCutDisk& w) const {
            return {{"variant", "wedge_cut_disk"}, {"params", {{"wedgeAngle", w.wedge_angle}}}};
        }
    };
    return std::visit(V{}, shape);
}

inline nlohmann::json to_json(const Shape3D& shape) {
    using nlohmann::json;
    struct V {
        json operator()(const Ball& b) const {
            return {{"variant", "ball"},
                    {"params", {{"center", detail::vec_json(b.center)}, {"radius", b.radius}}}};
        }
        json operator()(const BallUnion& u) const {
            json a = json::array();
            for (const auto& b : u.balls)
                a.push_back({{"center", detail::vec_json(b.center)}, {"radius", b.radius}});
            return {{"variant", "ball_union"}, {"params", {{"balls", a}}}};
        }
        json operator()(const Cone& c) const {
            return {{"variant", "cone"}, {"params", {{"height", c.height}, {"aperture", c.aperture}}}};
        }
        json operator()(const SegmentPointDilation&) const {
            return {{"variant", "segment_point_dilation"}, {"params", nlohmann::json::object()}};
        }
    };
    return std::visit(V{}, shape);
}

inline bool is_shape2d_variant(const std::string& name) {
    return name == "disk" || name == "disk_union" || name == "circle_union" ||
           name == "rectangle" || name == "convex_polygon" || name == "polyline" ||
           name == "wedge_cut_disk";
}

inline bool is_shape3d_variant(const std::string& name) {
    return name == "ball" || name == "ball_union" || name == "cone" ||
           name == "segment_point_dilation";
}

inline Shape2D shape2d_from_json(const nlohmann::json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    Shape2D shape;
    if (variant == "disk") {
        shape = Disk{detail::vec2_from(params.at("center")), params.at("radius").get<double>()};
    } else if (variant == "disk_union") {
        shape = DiskUnion{detail::disks_from(params.at("disks"))};
    } else if (variant == "circle_union") {
        shape = CircleUnion{detail::disks_from(params.at("circles"))};
    } else if (variant == "rectangle") {
        shape = Rectangle{detail::vec2_from(params.at("min")), detail::vec2_from(params.at("max"))};
    } else if (variant == "convex_polygon") {
        shape = ConvexPolygon{detail::points_from(params.at("vertices"))};
    } else if (variant == "polyline") {
        shape = Polyline{detail::points_from(params.at("vertices"))};
    } else if (variant == "wedge_cut_disk") {
        shape = WedgeCutDisk{params.at("wedgeAngle").get<double>()};
    } else {
        throw std::invalid_argument("unknown 2-d shape variant: " + variant);
    }
    validate(shape);
    return shape;
}

inline Shape3D shape3d_from_json(const nlohmann::json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    Shape3D shape;
    if (variant == "ball") {
        shape = Ball{detail::vec3_from(params.at("center")), params.at("radius").get<double>()};
    } else if (variant == "ball_union") {
        std::vector<Ball> balls;
        for (const auto& e : params.at("balls"))
            balls.push_back({detail::vec3_from(e.at("center")), e.at("radius").get<double>()});
        shape = BallUnion{std::move(balls)};
    } else if (variant == "cone") {
        shape = Cone{params.at("height").get<double>(), params.at("aperture").get<double>()};
    } else if (variant == "segment_point_dilation") {
        shape = SegmentPointDilation{};
    } else {
        throw std::invalid_argument("unknown 3-d shape variant: " + variant);
    }
    validate(shape);
    return shape;
}

} // namespace polyvol

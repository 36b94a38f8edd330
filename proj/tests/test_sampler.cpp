#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "polyvol/polyvol.hpp"

using namespace polyvol;
using Catch::Approx;

namespace {
const Shape2D unit_disk = Disk{{0.0, 0.0}, 1.0};
const Shape2D two_disks = DiskUnion{{{{-2.75, 0.0}, 0.25}, {{2.75, 0.0}, 0.25}}};
} // namespace

TEST_CASE("sample_band: postconditions and determinism", "[sampler]") {
    const auto pts = sample_band(unit_disk, 1.0, 10000, 42);
    REQUIRE(pts.size() == 10000);
    for (const auto& p : pts) {
        const double d = distance(unit_disk, p);
        CHECK(d > 0.0);
        CHECK(d <= 1.0);
    }
    const auto again = sample_band(unit_disk, 1.0, 10000, 42);
    REQUIRE(again.size() == pts.size());
    bool identical = true;
    for (std::size_t i = 0; i < pts.size(); ++i)
        identical = identical && pts[i].x == again[i].x && pts[i].y == again[i].y;
    CHECK(identical);
    const auto other = sample_band(unit_disk, 1.0, 10000, 43);
    bool same = true;
    for (std::size_t i = 0; i < pts.size(); ++i)
        same = same && pts[i].x == other[i].x;
    CHECK_FALSE(same);

    CHECK_THROWS_AS(sample_band(unit_disk, -1.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_band(unit_disk, 1.0, 0, 1), std::invalid_argument);
}

TEST_CASE("band acceptance rate matches analytic areas", "[sampler]") {
    // unit disk, R=1: band area V(1) - pi = 3 pi, box [-2,2]^2 has area 16
    const double expected = 3.0 * kPi / 16.0;
    SplitMix64 rng(7);
    const Box2 box = bounding_box(unit_disk, 1.0);
    CHECK(box.lo.x == Approx(-2.0));
    CHECK(box.hi.y == Approx(2.0));
    const std::size_t n = 200000;
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p{rng.next_in(box.lo.x, box.hi.x), rng.next_in(box.lo.y, box.hi.y)};
        const double d = distance(unit_disk, p);
        if (d > 0.0 && d <= 1.0) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(n);
    const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
    CHECK(std::abs(rate - expected) <= 3.0 * se);
}

TEST_CASE("manifold model accepts distance-zero points", "[sampler]") {
    const Shape2D circles = CircleUnion{{{{0.0, 0.0}, 1.0}}};
    const auto s = sample_distances(circles, 0.5, 5000, 9);
    CHECK(s.model == ModelTag::manifold);
    for (double v : s.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 0.5);
    }
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("distances: order, count, and known values", "[sampler]") {
    const std::vector<Vec2> pts{{3.25, 0.0}, {0.0, 0.0}, {2.75, 0.3}};
    const auto ds = distances(two_disks, pts);
    REQUIRE(ds.size() == 3);
    CHECK(ds[0] == Approx(0.25).margin(1e-12));
    CHECK(ds[1] == Approx(2.5).margin(1e-12));
    CHECK(ds[2] == Approx(0.05).margin(1e-12));
    CHECK(distances(two_disks, std::span<const Vec2>{}).empty());

    // points exactly on the outer band boundary give distance R
    const std::vector<Vec2> rim{{1.0 + 0.75, 0.0}, {0.0, -1.75}};
    for (double d : distances(unit_disk, rim)) CHECK(d == Approx(0.75).margin(1e-12));
}

TEST_CASE("empirical cdf: steps and bounds", "[sampler]") {
    DistanceSample s;
    s.band_radius = 2.0;
    s.model = ModelTag::solid;
    s.values = {2.0};
    const Ecdf f1(s);
    CHECK(f1(1.9999) == 0.0);
    CHECK(f1(2.0) == 1.0);

    s.values = {1.0, 2.0};
    const Ecdf f2(s);
    CHECK(f2(1.0) == Approx(0.5));
    CHECK(f2(2.0) == 1.0);
    CHECK(f2(0.5) == 0.0);

    s.values.clear();
    CHECK_THROWS_AS(empirical_cdf(s), std::invalid_argument);
}

TEST_CASE("ecdf converges to the analytic cdf (Kolmogorov bound)", "[sampler]") {
    const auto poly = analytic_volume(unit_disk);
    const double R = 1.0;
    const auto s = sample_distances(unit_disk, R, 100000, 20240809);
    const Ecdf f(s);
    const double ks = f.kolmogorov_distance([&](double r) { return band_cdf(poly, R, r); });
    CHECK(ks < 1.36 / std::sqrt(100000.0));
}

TEST_CASE("angular coordinate of accepted points is uniform (chi-square)", "[sampler]") {
    const auto pts = sample_band(unit_disk, 1.0, 100000, 99);
    constexpr int kBins = 36;
    std::array<int, kBins> counts{};
    for (const auto& p : pts) {
        double a = std::atan2(p.y, p.x);
        if (a < 0) a += 2.0 * kPi;
        int b = std::min(kBins - 1, static_cast<int>(a / (2.0 * kPi) * kBins));
        ++counts[b];
    }
    const double expected = static_cast<double>(pts.size()) / kBins;
    double stat = 0.0;
    for (int c : counts) stat += square(c - expected) / expected;
    CHECK(stat < oracle::kChi2_35_999);
}

TEST_CASE("rejection sampling gives up on degenerate geometry", "[sampler]") {
    // two tiny disks very far apart: the bounding box dwarfs the band
    const Shape2D degenerate = DiskUnion{{{{-500.0, 0.0}, 1e-3}, {{500.0, 0.0}, 1e-3}}};
    CHECK_THROWS_AS(sample_band(degenerate, 0.01, 100, 1), NumericalError);
}

TEST_CASE("distance sample csv round trip", "[sampler]") {
    const auto s = sample_distances(two_disks, 1.0, 500, 77);
    std::ostringstream os;
    write_csv(s, os);
    std::istringstream is(os.str());
    const DistanceSample back = read_sample_csv(is);
    CHECK(back.band_radius == s.band_radius);
    CHECK(back.model == s.model);
    CHECK(back.seed == s.seed);
    REQUIRE(back.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(back.values[i] == s.values[i]);

    std::istringstream bad("no header\n0.5\n");
    CHECK_THROWS_AS(read_sample_csv(bad), std::invalid_argument);
}

TEST_CASE("monte carlo volume: spot values", "[sampler]") {
    const Shape3D ball = Ball{{0.0, 0.0, 0.0}, 1.0};
    const std::vector<double> grid{1.0};
    const auto est = monte_carlo_volume(ball, grid, 200000, 5);
    CHECK(std::abs(est[0].value - (4.0 / 3.0) * kPi * 8.0) <= 3.0 * est[0].std_error);

    const Shape3D tballs = BallUnion{{{{0.0, 0.0, 1.0}, 1.0}, {{0.0, 0.0, -1.0}, 1.0}}};
    const auto est2 = monte_carlo_volume(tballs, std::vector<double>{0.5}, 200000, 6);
    const double expect2 = (4.0 / 3.0) * kPi * 0.125 + 6.0 * kPi * 0.25 + 8.0 * kPi * 0.5 + 8.0 * kPi / 3.0;
    CHECK(std::abs(est2[0].value - expect2) <= 3.0 * est2[0].std_error);

    const auto est3 = monte_carlo_volume(two_disks, std::vector<double>{1.0}, 200000, 7);
    const double expect3 = 2.0 * kPi * 0.0625 + kPi + 2.0 * kPi;
    CHECK(std::abs(est3[0].value - expect3) <= 3.0 * est3[0].std_error);

    CHECK_THROWS_AS(monte_carlo_volume(ball, grid, 100, 1), std::invalid_argument);
}

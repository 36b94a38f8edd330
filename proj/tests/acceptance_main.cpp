// Acceptance suite: end-to-end checks of the estimation pipeline against the
// reference study values, one pass/fail line per criterion. Every tolerance is
// pinned here; exits nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "polyvol/polyvol.hpp"

using namespace polyvol;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++g_failures;
}

bool expect(bool cond, const std::string& what) {
    if (!cond) g_notes.push_back(what);
    return cond;
}

std::string drain_notes() {
    std::string out;
    for (const auto& n : g_notes) out += "; " + n;
    g_notes.clear();
    return out;
}

constexpr std::uint64_t kMasterSeed = 424242;
constexpr double kConeM = 6.940405158765831;

const Shape2D kTwoDisks = DiskUnion{{{{-2.75, 0.0}, 0.25}, {{2.75, 0.0}, 0.25}}};
const Shape2D kTwoCircles = CircleUnion{{{{-2.75, 0.0}, 0.25}, {{2.75, 0.0}, 0.25}}};
const Shape2D kVPolyline = Polyline{{{-1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}}};
const Shape2D kWedge = WedgeCutDisk{kPi / 3.0};
const Shape3D kCone = Cone{1.0, kPi / 3.0};
const Shape3D kTouchingBalls = BallUnion{{{{0.0, 0.0, 1.0}, 1.0}, {{0.0, 0.0, -1.0}, 1.0}}};
const Shape3D kSegmentPoint = SegmentPointDilation{};

ReplicationConfig two_disk_config(double R, std::size_t n, std::size_t B,
                                  std::vector<Method> methods, std::uint64_t salt) {
    ReplicationConfig cfg;
    cfg.shape = kTwoDisks;
    cfg.R = R;
    cfg.phi0_override = 2.0;
    cfg.n = n;
    cfg.B = B;
    cfg.methods = std::move(methods);
    cfg.K = 5;
    cfg.master_seed = derive_stream_seed(kMasterSeed, salt);
    return cfg;
}

ReplicationConfig cone_config(double R, std::size_t n, std::size_t B, std::vector<Method> methods,
                              std::uint64_t salt) {
    ReplicationConfig cfg;
    cfg.shape = kCone;
    cfg.R = R;
    cfg.n = n;
    cfg.B = B;
    cfg.methods = std::move(methods);
    cfg.master_seed = derive_stream_seed(kMasterSeed, salt);
    return cfg;
}

char buf[256];

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    std::snprintf(buf, sizeof(buf), format, a, b, c, d);
    return buf;
}

// criterion 1: two-disk medians at n = 20000 within 3.14 +- 0.10
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = replicate(two_disk_config(1.0, 20000, 200, {Method::mom, Method::mle}, 1));
    const double med_mom = robust_stats(summary.find(Method::mom).estimates).median;
    const double med_mle = robust_stats(summary.find(Method::mle).estimates).median;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = expect(std::abs(med_mom - 3.14) <= 0.10, "mom median out of band");
    ok &= expect(std::abs(med_mle - 3.14) <= 0.10, "mle median out of band");
    report(1, ok,
           fmt("two-disk medians n=20000 B=200: mom %.4f, mle %.4f (band 3.14+-0.10, %.1fs)",
               med_mom, med_mle, secs) +
               drain_notes());
}

// criteria 2 and 3 share the n-sweep runs
void criteria2and3() {
    const std::array<std::size_t, 3> ns{100, 300, 1000};
    const std::vector<Method> methods{Method::mle, Method::tmle, Method::mom, Method::tmom};
    std::array<ReplicationSummary, 3> summaries;
    for (std::size_t j = 0; j < ns.size(); ++j)
        summaries[j] = replicate(two_disk_config(1.0, ns[j], 200, methods, 2000 + j));

    bool ok2 = true;
    std::string detail2 = "two-disk mean d_BE over n=100,300,1000:";
    for (Method m : methods) {
        std::array<double, 3> dbe{};
        for (std::size_t j = 0; j < 3; ++j)
            dbe[j] = mean_bounded_error(summaries[j].find(m).estimates, kPi);
        ok2 &= expect(dbe[0] > dbe[1] && dbe[1] > dbe[2],
                      std::string(to_string(m)) + " d_BE not strictly decreasing");
        detail2 += " " + std::string(to_string(m)) + fmt(" %.3f/%.3f/%.3f", dbe[0], dbe[1], dbe[2]);
    }
    // reference values at n=100, R=1 (error averages over 2000 replications)
    const std::array<std::pair<Method, double>, 4> reference{
        {{Method::mle, 0.530}, {Method::tmle, 0.505}, {Method::mom, 0.538}, {Method::tmom, 0.514}}};
    for (const auto& [m, target] : reference) {
        const double dbe = mean_bounded_error(summaries[0].find(m).estimates, kPi);
        ok2 &= expect(std::abs(dbe - target) <= 0.08,
                      std::string(to_string(m)) + fmt(" n=100 d_BE %.3f off %.3f by > 0.08", dbe, target));
    }
    report(2, ok2, detail2 + drain_notes());

    bool ok3 = true;
    std::string detail3 = "scaled MAD ratio n=100 vs n=1000:";
    for (Method m : {Method::mom, Method::mle}) {
        const double mad100 = robust_stats(summaries[0].find(m).estimates).scaled_mad;
        const double mad1000 = robust_stats(summaries[2].find(m).estimates).scaled_mad;
        const double ratio = mad100 / mad1000;
        ok3 &= expect(ratio >= 2.3, std::string(to_string(m)) + " MAD ratio below 2.3");
        detail3 += fmt(" %.2f", ratio);
    }
    report(3, ok3, detail3 + " (need >= 2.3)" + drain_notes());
}

// criterion 4: closed-form asymptotic variances against independent oracles
void criterion4() {
    bool ok = true;
    const double mom_var = mom_asymp_var(kPi, 1.0);
    const double mle_var = mle_asymp_var(kPi, 1.0);
    ok &= expect(std::abs(mom_var - 434.26) <= 0.01, fmt("mom var %.4f != 434.26", mom_var));
    ok &= expect(std::abs(mle_var - 400.33) <= 0.01, fmt("mle var %.4f != 400.33", mle_var));

    // independent delta-method oracle for the moment estimator
    const Params2D p{kPi, 1.0, 1.0};
    const auto g = [](double u) { return (2.0 * kPi / 3.0) * (2.0 - 3.0 * u) / (2.0 * u - 1.0); };
    const double mu =
        oracle::integrate([&](double r) { return r * density2d(r, p); }, 0.0, 1.0 - 1e-13);
    const double m2 =
        oracle::integrate([&](double r) { return r * r * density2d(r, p); }, 0.0, 1.0 - 1e-13);
    const double gp = oracle::derivative(g, mu, 1e-7);
    ok &= expect(std::abs(mom_var - gp * gp * (m2 - mu * mu)) <= 1e-4 * mom_var,
                 "mom var disagrees with the delta-method oracle");

    // quadrature oracle for the Fisher information
    const auto score = [](double r) { return 1.0 / (kPi + 2.0 * kPi * r) - 1.0 / (2.0 * kPi); };
    const double info = oracle::integrate(
        [&](double r) { return score(r) * score(r) * density2d(r, p); }, 0.0, 1.0 - 1e-13);
    ok &= expect(std::abs(mle_var - 1.0 / info) <= 1e-6 * mle_var,
                 "mle var disagrees with the quadrature oracle");

    bool ordered = true;
    for (int i = 0; i <= 60; ++i) {
        const double R = 1.0 + 1.5 * i / 60.0;
        ordered = ordered && mle_asymp_var(kPi, R) <= mom_asymp_var(kPi, R);
    }
    ok &= expect(ordered, "sigma_MLE > sigma_MOM somewhere on R in [1, 2.5]");
    report(4, ok,
           fmt("sigma^2_MOM(pi,1) = %.4f, sigma^2_MLE(pi,1) = %.4f, oracles agree, "
               "MLE <= MOM on the R grid",
               mom_var, mle_var) +
               drain_notes());
}

// criterion 5: cone medians; criterion 6: MLE vs MOM scaled MAD at R = 1.9
void criteria5and6() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto at13 = replicate(cone_config(1.3, 20000, 200, {Method::mom3d, Method::mle3d}, 51));
    const auto at19 = replicate(cone_config(1.9, 20000, 200, {Method::mom3d, Method::mle3d}, 52));
    const double mom_l0 = robust_stats(at13.find(Method::mom3d, "L0").estimates).median;
    const double mle_l0 = robust_stats(at13.find(Method::mle3d, "L0").estimates).median;
    const double mom_m = robust_stats(at19.find(Method::mom3d, "M").estimates).median;
    const double mle_m = robust_stats(at19.find(Method::mle3d, "M").estimates).median;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok5 = expect(std::abs(mom_l0 - 3.14) <= 0.15, "mom L0 median out of band");
    ok5 &= expect(std::abs(mle_l0 - 3.14) <= 0.15, "mle L0 median out of band");
    ok5 &= expect(std::abs(mom_m - 6.94) <= 0.35, "mom M median out of band");
    ok5 &= expect(std::abs(mle_m - 6.94) <= 0.35, "mle M median out of band");
    report(5, ok5,
           fmt("cone medians n=20000 B=200: L0(R=1.3) mom %.3f mle %.3f,", mom_l0, mle_l0) +
               fmt(" M(R=1.9) mom %.3f mle %.3f (bands 3.14+-0.15, 6.94+-0.35, %.0fs)", mom_m,
                   mle_m, secs) +
               drain_notes());

    // criterion 6 at R = 1.9, where the information bound is strict for both
    // parameters (at R = 1.3 the moment estimator of L0 is asymptotically
    // efficient, so no strict ordering is possible there)
    const auto small = replicate(cone_config(1.9, 5000, 200, {Method::mom3d, Method::mle3d}, 53));
    bool ok6 = true;
    std::string detail6 = "cone R=1.9 scaled MAD (mle vs mom):";
    for (const auto* run : {&small, &at19}) {
        for (const char* param : {"L0", "M"}) {
            const double mom_mad = robust_stats(run->find(Method::mom3d, param).estimates).scaled_mad;
            const double mle_mad = robust_stats(run->find(Method::mle3d, param).estimates).scaled_mad;
            ok6 &= expect(mle_mad < mom_mad,
                          std::string(param) + fmt(" n=%.0f: mle MAD not below mom",
                                                   static_cast<double>(run == &small ? 5000 : 20000)));
            detail6 += fmt(" %.3f<%.3f", mle_mad, mom_mad);
        }
    }
    report(6, ok6, detail6 + drain_notes());
}

// criterion 7: ECDF vs analytic F, 18 of 20 seeded trials per fixture
void criterion7() {
    struct Fixture {
        std::string name;
        std::variant<Shape2D, Shape3D> shape;
        double R;
    };
    const std::vector<Fixture> fixtures = {
        {"disk", Shape2D{Disk{{0.0, 0.0}, 1.0}}, 1.0},
        {"two-disk", kTwoDisks, 1.0},
        {"two-circles", kTwoCircles, 0.2},
        {"polyline", kVPolyline, 0.5},
        {"wedge", kWedge, 0.5},
        {"ball", Shape3D{Ball{{0.0, 0.0, 0.0}, 1.0}}, 1.0},
        {"touching-balls", kTouchingBalls, 1.0},
        {"segment-point", kSegmentPoint, 1.0},
        {"cone", kCone, 1.3},
    };
    const std::size_t n = 100000;
    const double bound = 1.36 / std::sqrt(static_cast<double>(n));
    bool ok = true;
    int total_failures = 0;
    std::string detail = "ECDF within the 95% Kolmogorov bound (passes/20):";
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        const auto& fx = fixtures[f];
        int passes = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const std::uint64_t seed = derive_stream_seed(kMasterSeed, 700 + 20 * f + trial);
            DistanceSample s;
            VolumePolynomial poly;
            if (std::holds_alternative<Shape2D>(fx.shape)) {
                const auto& sh = std::get<Shape2D>(fx.shape);
                poly = analytic_volume(sh);
                s = sample_distances(sh, fx.R, n, seed);
            } else {
                const auto& sh = std::get<Shape3D>(fx.shape);
                poly = analytic_volume(sh);
                s = sample_distances(sh, fx.R, n, seed);
            }
            const double ks = Ecdf(s).kolmogorov_distance(
                [&](double r) { return band_cdf(poly, fx.R, r); });
            if (ks < bound) ++passes;
        }
        ok &= expect(passes >= 18, fx.name + fmt(" only %.0f/20", static_cast<double>(passes)));
        detail += " " + fx.name + fmt("=%.0f", static_cast<double>(passes));
        total_failures += 20 - passes;
    }
    detail += fmt(" [aggregate failures %.0f/180, 9 expected at the designed 5%% rate]",
                  static_cast<double>(total_failures));
    report(7, ok, detail + drain_notes());
}

// criterion 8: vol_fit recovers the four reference coefficient sets
void criterion8() {
    bool ok = true;
    std::string detail = "vol_fit within 3 SE of the analytic coefficients:";
    const auto check = [&](const std::string& name, const std::vector<double>& truth,
                           const VolFitResult& fit) {
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const double dev = std::abs(fit.coefficients[j] - truth[j]) / fit.coefficient_se[j];
            if (!expect(dev <= 3.0, name + fmt(" c%.0f at %.2f SE", static_cast<double>(j), dev)))
                ok = false;
        }
        detail += " " + name;
    };
    const std::size_t n_mc = 1000000;
    {
        const auto poly = analytic_volume(kTouchingBalls);
        const auto grid = radius_grid(0.15, 1.5, 8);
        check("touching-balls",
              {poly.mu, poly.l0, poly.m, poly.phi0 * 4.0 * kPi / 3.0},
              vol_fit(kTouchingBalls, grid, n_mc, 3, derive_stream_seed(kMasterSeed, 81)));
    }
    {
        const auto poly = analytic_volume(kSegmentPoint);
        const auto grid = radius_grid(0.15, 1.5, 8);
        check("segment-point",
              {poly.mu, poly.l0, poly.m, poly.phi0 * 4.0 * kPi / 3.0},
              vol_fit(kSegmentPoint, grid, n_mc, 3, derive_stream_seed(kMasterSeed, 82)));
    }
    {
        const auto poly = analytic_volume(kWedge);
        const auto grid = radius_grid(0.1 * poly.r_max, poly.r_max, 8);
        check("wedge", {poly.mu, poly.l0, poly.phi0 * kPi},
              vol_fit(kWedge, grid, n_mc, 2, derive_stream_seed(kMasterSeed, 83)));
    }
    {
        const auto poly = analytic_volume(kTwoDisks);
        const auto grid = radius_grid(0.25, 2.5, 8);
        check("two-disk", {poly.mu, poly.l0, poly.phi0 * kPi},
              vol_fit(kTwoDisks, grid, n_mc, 2, derive_stream_seed(kMasterSeed, 84)));
    }
    report(8, ok, detail + " (nmc=1e6)" + drain_notes());
}

// criterion 9: the infinite-expectation pathology, observable at R = 0.3
void criterion9() {
    ReplicationConfig cfg = two_disk_config(0.3, 100, 10000, {Method::mom, Method::tmom}, 9);
    const auto summary = replicate(cfg);
    const auto& mom = summary.find(Method::mom).estimates;
    const auto& tmom = summary.find(Method::tmom).estimates;

    double max_mom = 0.0, max_tmom = 0.0;
    for (double v : mom) max_mom = std::max(max_mom, std::abs(v));
    for (double v : tmom) max_tmom = std::max(max_tmom, std::abs(v));
    const double tmom_bound = 2.0 * kPi * cfg.R * cfg.K;

    // running mean of |MOM| is non-monotone; running median stabilizes
    bool mean_rose = false, mean_fell = false;
    double acc = std::abs(mom[0]);
    double prev_mean = acc;
    for (std::size_t b = 1; b < mom.size(); ++b) {
        acc += std::abs(mom[b]);
        const double mean = acc / static_cast<double>(b + 1);
        if (b >= 100) {
            mean_rose = mean_rose || mean > prev_mean;
            mean_fell = mean_fell || mean < prev_mean;
        }
        prev_mean = mean;
    }
    std::vector<double> run(mom.begin(), mom.begin() + 2000);
    double max_dev = 0.0;
    const double final_median = median(mom);
    for (std::size_t b = 2000; b <= mom.size(); b += 100) {
        run.assign(mom.begin(), mom.begin() + b);
        max_dev = std::max(max_dev, std::abs(median(run) - final_median) / final_median);
    }

    bool ok = expect(max_mom > 1e3, fmt("max |MOM| = %.1f <= 1e3", max_mom));
    ok &= expect(max_tmom <= tmom_bound + 1e-12,
                 fmt("max |TMOM| = %.3f above the bound %.3f", max_tmom, tmom_bound));
    ok &= expect(mean_rose && mean_fell, "running mean of |MOM| is monotone");
    ok &= expect(max_dev <= 0.02, fmt("running median deviates %.2f%% after B=2000", 100.0 * max_dev));
    report(9, ok,
           fmt("pathology (R=0.3, n=100, B=1e4): max|MOM| %.0f, max|TMOM| %.2f <= %.2f,", max_mom,
               max_tmom, tmom_bound) +
               fmt(" running-median drift %.2f%% (<=2%%)", 100.0 * max_dev) + drain_notes());
}

// criterion 10: the hand-checked identities behind the unit suite
void criterion10() {
    bool ok = true;
    // moment-inverse substitutions
    ok &= expect(std::abs(mom_l0_from_mean(7.0 / 12.0, 1.0).value - kPi) < 1e-10, "mom at 7/12");
    ok &= expect(std::abs(mom_l0_from_mean(0.55, 1.0).value - 7.0 * kPi / 3.0) < 1e-10,
                 "mom at 0.55");
    ok &= expect(std::abs(mom_l0_from_mean(11.0 / 18.0, 1.0, 2.0).value - kPi) < 1e-10,
                 "mom at 11/18 with phi0=2");
    // closed-form moments
    const Moments2D mo = moments2d(Params2D{kPi, 1.0, 1.0});
    ok &= expect(std::abs(mo.mean - 7.0 / 12.0) < 1e-14, "E D != 7/12");
    ok &= expect(std::abs(mo.variance - 11.0 / 144.0) < 1e-14, "Var D != 11/144");
    // mixture identities, 2-d and 3-d, on 100-point grids
    const Params2D p2{kPi, 2.0, 1.0};
    const Mixture2D mix2 = mixture2d(p2);
    const Params3D p3{kPi, kConeM, 1.3, 1.0};
    const Mixture3D mix3 = mixture3d(p3);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double r2 = (i + 0.5) / 100.0 * p2.R;
        const double r3 = (i + 0.5) / 100.0 * p3.R;
        worst = std::max(worst, std::abs(mix2.density(r2) - density2d(r2, p2)));
        worst = std::max(worst, std::abs(mix3.density(r3) - density3d(r3, p3)));
    }
    ok &= expect(worst < 1e-12, "mixture identity above 1e-12");
    // moments vs quadrature at 1e-10
    const Moments3D m3 = moments3d(p3);
    const auto mom_k = [&](int k) {
        return oracle::integrate([&](double r) { return std::pow(r, k) * density3d(r, p3); }, 0.0,
                                 p3.R * (1.0 - 1e-13));
    };
    ok &= expect(std::abs(m3.mean - mom_k(1)) < 1e-10, "E D quadrature");
    ok &= expect(std::abs(m3.mean_sq - mom_k(2)) < 1e-10, "E D^2 quadrature");
    ok &= expect(std::abs(m3.mean_cube - mom_k(3)) < 1e-10, "E D^3 quadrature");
    // distances
    ok &= expect(distance(kTwoDisks, Vec2{0.0, 0.0}) == 2.5, "two-disk center distance");
    ok &= expect(distance(kCone, Vec3{0.0, 0.0, 1.0}) == 0.0, "cone apex distance");
    ok &= expect(std::abs(distance(Shape2D{Rectangle{{0, 0}, {1, 1}}}, Vec2{2.0, 2.0}) -
                          std::sqrt(2.0)) < 1e-12,
                 "rectangle corner distance");
    // truncation and mixture weights
    ok &= expect(std::abs(truncated_l0(0.5, 5, 1.0).value - kPi * 0.96875) < 1e-12,
                 "truncated partial sum");
    ok &= expect(std::abs(mixture2d(Params2D{kPi, 1.0, 1.0}).lambda - 0.5) < 1e-14, "lambda half");
    ok &= expect(std::abs(mix3.lambda1 + mix3.lambda2 + mix3.lambda3 - 1.0) < 1e-14,
                 "3-d weights sum");
    // lambda system rows
    const auto uni = lambda3_from_moments(0.5, 1.0 / 3.0, 0.25, 1.0);
    ok &= expect(std::abs(uni[0] - 1.0) < 1e-12 && std::abs(uni[1]) < 1e-12 &&
                     std::abs(uni[2]) < 1e-12,
                 "uniform lambda row");
    // boundary measure of the offset set
    const auto poly = analytic_volume(kTwoDisks);
    ok &= expect(std::abs(offset_boundary_measure(1.0, poly) - 5.0 * kPi) < 1e-12,
                 "offset boundary measure at r=1");
    // mean bounded error, robust statistics
    ok &= expect(mean_bounded_error(std::vector<double>{2.0}, 2.0) == 0.0, "d_BE at truth");
    ok &= expect(mean_bounded_error(std::vector<double>{3.0}, 2.0) == 0.5, "d_BE at distance 1");
    ok &= expect(robust_stats(std::vector<double>{1.0, 2.0, 3.0}).scaled_mad == 1.4826,
                 "scaled MAD");
    // EM start and monotone log-likelihood on a fixed sample
    DistanceSample em_sample;
    em_sample.band_radius = 1.0;
    SplitMix64 rng(derive_stream_seed(kMasterSeed, 10));
    for (int i = 0; i < 500; ++i)
        em_sample.values.push_back(quantile2d(rng.next_double(), p2));
    const EmResult em = lambda_em(em_sample);
    ok &= expect(em.lambda_trace.front() == 0.5, "EM start");
    for (std::size_t i = 1; i < em.loglik_trace.size(); ++i)
        if (em.loglik_trace[i] < em.loglik_trace[i - 1] - 1e-9) {
            ok = expect(false, "EM log-likelihood decreased");
            break;
        }
    report(10, ok, "unit identities (moments, mixtures, distances, truncation, EM)" + drain_notes());
}

} // namespace

int main() {
    criterion1();
    criteria2and3();
    criterion4();
    criteria5and6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
}

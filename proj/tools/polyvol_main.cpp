// Command line front end: emit distance samples, run estimators on sample
// files, drive Monte Carlo replication studies, and tabulate asymptotic
// variance curves and volume-polynomial fits.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyvol/polyvol.hpp"

namespace {

using nlohmann::json;

constexpr const char* kShapeSchema =
    "Shape files are JSON documents {\"variant\": NAME, \"params\": {...}} with:\n"
    "  disk                   params: center [x,y], radius\n"
    "  disk_union             params: disks [{center,radius},...] (disjoint, positive gaps)\n"
    "  circle_union           params: circles [{center,radius},...] (manifold model)\n"
    "  rectangle              params: min [x,y], max [x,y]\n"
    "  convex_polygon         params: vertices [[x,y],...] (counterclockwise, strictly convex)\n"
    "  polyline               params: vertices [[x,y],...] (manifold model)\n"
    "  wedge_cut_disk         params: wedgeAngle (radians, in (0, pi/2))\n"
    "  ball                   params: center [x,y,z], radius\n"
    "  ball_union             params: balls [{center,radius},...] (interiors disjoint, may touch)\n"
    "  cone                   params: height, aperture (full apex angle, radians)\n"
    "  segment_point_dilation params: {}\n"
    "Distance sample CSV: header `# R=<value> model=<tag> seed=<int>`, one value per line.\n";

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open: " + path);
    json j;
    is >> j;
    return j;
}

bool shape_is_2d(const json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (polyvol::is_shape2d_variant(variant)) return true;
    if (polyvol::is_shape3d_variant(variant)) return false;
    throw std::invalid_argument("unknown shape variant: " + variant);
}

polyvol::Method parse_method(const std::string& name) {
    using polyvol::Method;
    if (name == "mom") return Method::mom;
    if (name == "mle") return Method::mle;
    if (name == "tmom") return Method::tmom;
    if (name == "tmle") return Method::tmle;
    if (name == "em") return Method::em;
    if (name == "mom3d") return Method::mom3d;
    if (name == "mle3d") return Method::mle3d;
    if (name == "tmom3d") return Method::tmom3d;
    throw std::invalid_argument("unknown method: " + name);
}

std::string flags_string(const polyvol::EstimateFlags& f) {
    std::string out;
    const auto add = [&](const char* name) {
        if (!out.empty()) out += ',';
        out += name;
    };
    if (f.pole_proximity) add("pole_proximity");
    if (f.boundary_hit) add("boundary_hit");
    if (f.clamp_applied) add("clamp_applied");
    return out.empty() ? "-" : out;
}

std::string fmt(double v) { return polyvol::detail::format_double(v); }

struct SampleArgs {
    std::string shape_file, out_file;
    double R = 1.0;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
};

void run_sample(const SampleArgs& a) {
    const json j = load_json_file(a.shape_file);
    polyvol::DistanceSample sample;
    if (shape_is_2d(j))
        sample = polyvol::sample_distances(polyvol::shape2d_from_json(j), a.R, a.n, a.seed);
    else
        sample = polyvol::sample_distances(polyvol::shape3d_from_json(j), a.R, a.n, a.seed);
    polyvol::write_csv(sample, a.out_file);
    std::cout << "wrote " << sample.size() << " distances to " << a.out_file << "\n";
}

struct EstimateArgs {
    std::string in_file, method = "mom";
    double phi0 = 1.0;
    int K = 5;
    double em_tolerance = 1e-5;
    double search_cap = 0.0;
};

void run_estimate(const EstimateArgs& a) {
    using polyvol::Method;
    const polyvol::DistanceSample sample = polyvol::read_sample_csv(a.in_file);
    const Method method = parse_method(a.method);
    std::cout << "method=" << a.method << " n=" << sample.size()
              << " R=" << fmt(sample.band_radius) << "\n";
    switch (method) {
        case Method::mom: {
            const auto e = polyvol::mom_l0(sample, a.phi0);
            std::cout << "value=" << fmt(e.value)
                      << " variance=" << (e.asymp_variance ? fmt(*e.asymp_variance) : "-")
                      << " flags=" << flags_string(e.flags) << "\n";
            break;
        }
        case Method::mle: {
            const auto e = polyvol::mle_l0(sample, a.phi0, a.search_cap);
            std::cout << "value=" << fmt(e.value)
                      << " variance=" << (e.asymp_variance ? fmt(*e.asymp_variance) : "-")
                      << " flags=" << flags_string(e.flags) << "\n";
            break;
        }
        case Method::tmom: {
            const auto e = polyvol::truncated_l0(polyvol::lambda_mom(sample), a.K,
                                                 sample.band_radius, a.phi0, Method::tmom,
                                                 sample.size());
            std::cout << "value=" << fmt(e.value) << " variance=-"
                      << " flags=" << flags_string(e.flags) << "\n";
            break;
        }
        case Method::tmle: {
            const auto em = polyvol::lambda_em(sample, a.em_tolerance);
            const auto e = polyvol::truncated_l0(em.lambda, a.K, sample.band_radius, a.phi0,
                                                 Method::tmle, sample.size());
            std::cout << "value=" << fmt(e.value) << " variance=-"
                      << " flags=" << flags_string(e.flags) << " em_iterations=" << em.iterations
                      << "\n";
            break;
        }
        case Method::em: {
            const auto em = polyvol::lambda_em(sample, a.em_tolerance);
            std::cout << "lambda=" << fmt(em.lambda) << " iterations=" << em.iterations << "\n";
            break;
        }
        case Method::mom3d: {
            const auto e = polyvol::mom_3d(sample);
            std::cout << "l0=" << fmt(e.l0) << " m=" << fmt(e.m)
                      << " variance_l0=" << (e.asymp_var_l0 ? fmt(*e.asymp_var_l0) : "-")
                      << " variance_m=" << (e.asymp_var_m ? fmt(*e.asymp_var_m) : "-")
                      << " flags=" << flags_string(e.flags) << "\n";
            break;
        }
        case Method::mle3d: {
            const auto e = polyvol::mle_3d(sample);
            std::cout << "l0=" << fmt(e.l0) << " m=" << fmt(e.m)
                      << " flags=" << flags_string(e.flags) << "\n";
            break;
        }
        case Method::tmom3d: {
            const auto lam = polyvol::lambda3_mom(sample);
            const auto e = polyvol::truncated_3d(lam[0], lam[1], a.K, sample.band_radius,
                                                 sample.size());
            std::cout << "l0=" << fmt(e.l0) << " m=" << fmt(e.m)
                      << " flags=" << flags_string(e.flags) << "\n";
            break;
        }
    }
}

struct ReplicateArgs {
    std::string config_file, out_file, raw_file;
};

polyvol::ReplicationConfig parse_config(const json& j) {
    polyvol::ReplicationConfig cfg;
    const json shape = j.at("shape");
    if (shape_is_2d(shape))
        cfg.shape = polyvol::shape2d_from_json(shape);
    else
        cfg.shape = polyvol::shape3d_from_json(shape);
    cfg.R = j.at("R").get<double>();
    if (j.contains("phi0")) cfg.phi0_override = j.at("phi0").get<double>();
    cfg.n = j.at("n").get<std::size_t>();
    cfg.B = j.at("B").get<std::size_t>();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
    cfg.K = j.value("K", 5);
    cfg.em_tolerance = j.value("emTolerance", 1e-5);
    cfg.master_seed = j.value("masterSeed", std::uint64_t{0});
    cfg.threads = j.value("threads", 0u);
    return cfg;
}

void run_replicate(const ReplicateArgs& a) {
    const polyvol::ReplicationConfig cfg = parse_config(load_json_file(a.config_file));
    const polyvol::ReplicationSummary summary = polyvol::replicate(cfg);
    std::ofstream os(a.out_file);
    if (!os) throw std::invalid_argument("cannot open for writing: " + a.out_file);
    polyvol::write_summary_csv(summary, os);
    if (!a.raw_file.empty()) {
        std::ofstream raw(a.raw_file);
        if (!raw) throw std::invalid_argument("cannot open for writing: " + a.raw_file);
        polyvol::write_raw_csv(summary, raw);
    }
    if (summary.r_exceeds_r_max)
        std::cerr << "warning: R exceeds the validity radius r_max of the shape's volume polynomial\n";
    for (const auto& row : summary.rows())
        std::cout << to_string(row.method) << ' ' << row.parameter << ": median=" << fmt(row.median)
                  << " scaled_mad=" << fmt(row.scaled_mad) << " mean_dbe=" << fmt(row.mean_dbe)
                  << " failed=" << row.n_failed << "\n";
}

struct VarCurveArgs {
    int dim = 2;
    double l0 = polyvol::kPi;
    std::optional<double> m;
    double phi0 = 1.0;
    double r_min = 1.0, r_max = 2.5;
    std::size_t steps = 16;
    std::string out_file, svg_file;
};

void run_varcurve(const VarCurveArgs& a) {
    std::vector<polyvol::VarCurvePoint> curve;
    if (a.dim == 2) {
        curve = polyvol::var_curve_2d(a.l0, a.r_min, a.r_max, a.steps, a.phi0);
    } else if (a.dim == 3) {
        if (!a.m) throw std::invalid_argument("varcurve: --m is required for dim 3");
        curve = polyvol::var_curve_3d(a.l0, *a.m, a.r_min, a.r_max, a.steps);
    } else {
        throw std::invalid_argument("varcurve: dim must be 2 or 3");
    }
    std::ofstream os(a.out_file);
    if (!os) throw std::invalid_argument("cannot open for writing: " + a.out_file);
    polyvol::write_curve_csv(curve, a.dim == 2, os);
    if (!a.svg_file.empty()) {
        std::vector<polyvol::SvgSeries> series(2);
        series[0].name = a.dim == 2 ? "sd mom" : "sd L0";
        series[1].name = a.dim == 2 ? "sd mle" : "sd M";
        series[1].stroke = "#d62728";
        series[1].dashed = true;
        for (const auto& p : curve) {
            series[0].points.push_back({p.R, p.sd_first});
            series[1].points.push_back({p.R, p.sd_second});
        }
        std::ofstream svg(a.svg_file);
        if (!svg) throw std::invalid_argument("cannot open for writing: " + a.svg_file);
        polyvol::write_svg_plot(series, "R", "asymptotic standard deviation", svg);
    }
    std::cout << "wrote " << curve.size() << " grid points to " << a.out_file << "\n";
}

struct VolFitArgs {
    std::string shape_file, out_file;
    int degree = 2;
    std::size_t n_mc = 100000;
    double r_min = 0.0, r_max = 0.0;
    std::size_t steps = 8;
    std::uint64_t seed = 0;
};

template <class Shape>
polyvol::VolFitResult vol_fit_with_defaults(const Shape& shape, VolFitArgs a) {
    if (a.r_max == 0.0) {
        const auto poly = polyvol::analytic_volume(shape);
        a.r_max = std::isfinite(poly.r_max) ? poly.r_max : 1.0;
    }
    if (a.r_min == 0.0) a.r_min = 0.1 * a.r_max;
    const auto grid = polyvol::radius_grid(a.r_min, a.r_max, a.steps);
    return polyvol::vol_fit(shape, grid, a.n_mc, a.degree, a.seed);
}

void run_volfit(const VolFitArgs& a) {
    const json j = load_json_file(a.shape_file);
    polyvol::VolFitResult fit;
    if (shape_is_2d(j))
        fit = vol_fit_with_defaults(polyvol::shape2d_from_json(j), a);
    else
        fit = vol_fit_with_defaults(polyvol::shape3d_from_json(j), a);
    std::ofstream os(a.out_file);
    if (!os) throw std::invalid_argument("cannot open for writing: " + a.out_file);
    polyvol::write_volfit_csv(fit, os);
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i)
        std::cout << 'c' << i << " = " << fmt(fit.coefficients[i]) << " +- "
                  << fmt(fit.coefficient_se[i]) << "\n";
    std::cout << "max studentized residual = " << fmt(fit.max_studentized_residual) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyvol: estimate boundary measure (and integrated mean curvature) of a compact "
                 "set from distances measured at points uniform in an outer band"};
    app.require_subcommand(1);
    app.footer(kShapeSchema);

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "emit a distance sample as CSV");
    sample->add_option("--shape", sample_args.shape_file, "shape JSON file")->required();
    sample->add_option("--R", sample_args.R, "band radius")->required();
    sample->add_option("--n", sample_args.n, "sample size")->required();
    sample->add_option("--seed", sample_args.seed, "RNG seed")->default_val(0);
    sample->add_option("--out", sample_args.out_file, "output CSV path")->required();

    EstimateArgs est_args;
    auto* estimate = app.add_subcommand("estimate", "estimate from a distance sample file");
    estimate->add_option("--in", est_args.in_file, "input sample CSV")->required();
    estimate->add_option("--method", est_args.method,
                         "one of mom|mle|tmom|tmle|em|mom3d|mle3d|tmom3d")->required();
    estimate->add_option("--phi0", est_args.phi0, "known leading coefficient (2-d methods)")
        ->default_val(1.0);
    estimate->add_option("--K", est_args.K, "truncation order for tmom/tmle/tmom3d")->default_val(5);
    estimate->add_option("--em-tol", est_args.em_tolerance, "EM tolerance on lambda")
        ->default_val(1e-5);
    estimate->add_option("--search-cap", est_args.search_cap,
                         "MLE search cap (0 = 1e3*phi0*pi*R)")->default_val(0.0);

    ReplicateArgs rep_args;
    auto* replicate = app.add_subcommand("replicate", "run a Monte Carlo replication study");
    replicate->add_option("--config", rep_args.config_file,
                          "JSON config: {shape, R, phi0?, n, B, methods, K?, emTolerance?, "
                          "masterSeed?, threads?}")->required();
    replicate->add_option("--out", rep_args.out_file, "summary CSV path")->required();
    replicate->add_option("--raw", rep_args.raw_file, "optional per-replication estimates CSV");

    VarCurveArgs vc_args;
    auto* varcurve = app.add_subcommand("varcurve", "tabulate asymptotic standard deviations vs R");
    varcurve->add_option("--dim", vc_args.dim, "2 or 3")->required();
    varcurve->add_option("--l0", vc_args.l0, "boundary measure")->required();
    double m_value = 0.0;
    auto* m_opt = varcurve->add_option("--m", m_value, "integrated mean curvature (dim 3)");
    varcurve->add_option("--phi0", vc_args.phi0, "leading coefficient (dim 2)")->default_val(1.0);
    varcurve->add_option("--rmin", vc_args.r_min, "grid start")->required();
    varcurve->add_option("--rmax", vc_args.r_max, "grid end")->required();
    varcurve->add_option("--steps", vc_args.steps, "grid size")->default_val(16);
    varcurve->add_option("--out", vc_args.out_file, "CSV path")->required();
    varcurve->add_option("--svg", vc_args.svg_file, "optional SVG plot path");

    VolFitArgs vf_args;
    auto* volfit = app.add_subcommand("volfit", "Monte Carlo volume estimates + polynomial fit");
    volfit->add_option("--shape", vf_args.shape_file, "shape JSON file")->required();
    volfit->add_option("--degree", vf_args.degree, "2 or 3")->required();
    volfit->add_option("--nmc", vf_args.n_mc, "Monte Carlo points per grid radius")->required();
    volfit->add_option("--rmin", vf_args.r_min, "grid start (default 0.1*rmax)");
    volfit->add_option("--rmax", vf_args.r_max, "grid end (default r_max of the shape)");
    volfit->add_option("--steps", vf_args.steps, "grid size")->default_val(8);
    volfit->add_option("--seed", vf_args.seed, "RNG seed")->default_val(0);
    volfit->add_option("--out", vf_args.out_file, "CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed()) run_sample(sample_args);
        if (estimate->parsed()) run_estimate(est_args);
        if (replicate->parsed()) run_replicate(rep_args);
        if (varcurve->parsed()) {
            if (m_opt->count() > 0) vc_args.m = m_value;
            run_varcurve(vc_args);
        }
        if (volfit->parsed()) run_volfit(vf_args);
    } catch (const polyvol::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

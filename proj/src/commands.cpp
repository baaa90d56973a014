#include "spdc/cli.hpp"
#include "spdc/config.hpp"
#include "spdc/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace spdc::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    json config;  // resolved
    fs::path out_dir;
    int threads = 1;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

constexpr double kPaperPolingPeriod = 47.7e-6;

template <class Writer, class... Args> void emit(const Context& ctx, const std::string& name, Writer writer, Args&&... args) {
    std::ostringstream ss;
    writer(ss, std::forward<Args>(args)...);
    io::write_file_atomic(ctx.out_dir / name, ss.str());
}

void emit_raw(const Context& ctx, const std::string& name, const std::string& content) {
    io::write_file_atomic(ctx.out_dir / name, content);
}

io::HeaderLines base_header(const Context& ctx) { return {header_config_line(ctx.config)}; }

void warn_scan(const Context& ctx, const FringeScan& scan) {
    if (scan.clamped)
        *ctx.err << "warning: scaled visibility " << scan.raw_visibility / kRawVisibilityCeiling
                 << " exceeded 1 and was clamped\n";
    if (scan.flat) *ctx.err << "warning: flat fringe; visibility reported as zero\n";
}

std::string scan_direction_name(ScanDirection d) { return d == ScanDirection::diagonal ? "diagonal" : "antidiagonal"; }

// ---------------------------------------------------------------------------

int cmd_dispersion(const Context& ctx) {
    const Units units = units_of(ctx.config);
    const DispersionModel model = build_model(ctx.config.at("dispersion"), units, materials_dir_of(ctx.config));
    const json& t = ctx.config.at("table");
    const int count = t.at("count").get<int>();
    if (count < 2) throw ConfigError("table.count must be at least 2");

    std::ostringstream ss;
    ss << "# spdc-dispersion v1\n# model: " << describe(model) << "\n# " << header_config_line(ctx.config) << '\n';
    if (units == Units::si) {
        const double lo = t.at("lambda_min_m").get<double>();
        const double hi = t.at("lambda_max_m").get<double>();
        ss << "lambda_m,n,beta,beta1,beta2\n";
        for (int k = 0; k < count; ++k) {
            const double lambda = lo + (hi - lo) * k / (count - 1);
            const double w = wavelength_to_omega(lambda);
            const double b = beta(model, w);
            const auto d = beta_derivatives(model, w, 2);
            ss << io::format_double(lambda) << ',' << io::format_double(b * kSpeedOfLight / w) << ','
               << io::format_double(b) << ',' << io::format_double(d[0]) << ',' << io::format_double(d[1]) << '\n';
        }
    } else {
        const double lo = t.at("omega_min").get<double>();
        const double hi = t.at("omega_max").get<double>();
        ss << "omega,n,beta,beta1,beta2\n";
        for (int k = 0; k < count; ++k) {
            const double w = lo + (hi - lo) * k / (count - 1);
            const double b = beta(model, w);
            const auto d = beta_derivatives(model, w, 2);
            ss << io::format_double(w) << ',' << io::format_double(b / w) << ',' << io::format_double(b) << ','
               << io::format_double(d[0]) << ',' << io::format_double(d[1]) << '\n';
        }
    }
    emit_raw(ctx, "dispersion.csv", ss.str());
    *ctx.out << "wrote " << (ctx.out_dir / "dispersion.csv").string() << '\n';
    return kExitOk;
}

struct BuiltSource {
    SourceSpec spec;
    JointSpectralAmplitude jsa;
    io::HeaderLines header;
};

BuiltSource build_jsa_from_config(const Context& ctx) {
    BuiltSource b;
    b.spec = build_source(ctx.config);
    const FrequencyGrid grid = build_grid(ctx.config, b.spec);
    b.jsa = b.spec.collinear ? build_collinear_jsa(b.spec.qpm, grid, ctx.threads)
                             : build_counterprop_jsa(b.spec.pump, b.spec.model, grid, ctx.threads);
    b.header = base_header(ctx);
    b.header.push_back("source: " + b.jsa.description);
    if (b.spec.collinear) b.header.push_back("poling_period_m: " + io::format_double(b.spec.qpm.poling_period));
    return b;
}

int cmd_jsa(const Context& ctx) {
    const BuiltSource b = build_jsa_from_config(ctx);
    const JointTemporalIntensity jti = joint_temporal_intensity(b.jsa);
    if (jti.alias_warning)
        *ctx.err << "warning: AliasRisk: JSA edge intensity is " << jti.edge_ratio
                 << " of peak; the temporal transform wraps around\n";
    emit(ctx, "jsa.csv", io::write_jsa_csv, b.jsa, b.header);
    emit(ctx, "jti.csv", io::write_jti_csv, jti, b.header);
    emit_raw(ctx, "jsa.pgm", io::render_pgm(b.jsa.amplitude.cwiseAbs2()));
    emit_raw(ctx, "jti.pgm", io::render_pgm(jti.intensity));
    std::ostream& o = *ctx.out;
    o << std::setprecision(10);
    o << "rho_nu " << frequency_correlation(b.jsa) << '\n';
    o << "rms_bandwidth_left " << marginal_spectrum(b.jsa, Side::left).rms_bandwidth << '\n';
    o << "rms_bandwidth_right " << marginal_spectrum(b.jsa, Side::right).rms_bandwidth << '\n';
    o << "rho_t " << temporal_correlation(jti) << '\n';
    return kExitOk;
}

int run_analysis(const Context& ctx) {
    const json& a = ctx.config.at("analysis");
    const auto type = a.at("type").get<std::string>();
    std::ostream& o = *ctx.out;
    o << std::setprecision(10);

    if (type == "sweep") {
        const SourceSpec spec = build_source(ctx.config);
        SweepOptions sweep;
        sweep.visibility = build_visibility_options(a.at("visibility"));
        sweep.threads = ctx.threads;
        const json& g = ctx.config.at("grid");
        sweep.min_points = g.at("n_points").get<Eigen::Index>();
        if (g.contains("max_points")) sweep.max_points = std::max(sweep.min_points, g.at("max_points").get<Eigen::Index>());
        if (g.contains("half_span_sigmas")) sweep.span_sigmas = g.at("half_span_sigmas").get<double>();
        const SourceFamily family = spec.collinear ? SourceFamily{CollinearFamily{spec.qpm}}
                                                   : SourceFamily{CounterpropFamily{spec.pump, spec.model}};
        const VisibilityCurve curve = visibility_vs_length(family, build_lengths(a.at("lengths_m")), sweep);
        emit(ctx, "visibility_curve.csv", io::write_curve_csv, curve, base_header(ctx));
        for (std::size_t k = 0; k < curve.lengths.size(); ++k)
            o << curve.lengths[k] << ' ' << curve.visibility[k] << '\n';
        return kExitOk;
    }

    const BuiltSource b = build_jsa_from_config(ctx);
    if (type == "map") {
        const FransonMap map = franson_map(b.jsa, a.at("tau_max_cycles").get<double>(),
                                           a.at("n_samples").get<Eigen::Index>(), std::nullopt, ctx.threads);
        emit(ctx, "franson_map.csv", io::write_map_csv, map, b.header);
        emit_raw(ctx, "franson_map.pgm", io::render_pgm(map.probability));
        o << "P00 " << map.probability(0, 0) << '\n';
    } else if (type == "visibility") {
        const FringeScan scan = fourth_order_visibility(b.jsa, build_visibility_options(a));
        warn_scan(ctx, scan);
        emit(ctx, "fringe_scan.csv", io::write_scan_csv, scan, b.header);
        o << "direction " << scan_direction_name(scan.direction) << '\n';
        o << "raw_visibility " << scan.raw_visibility << '\n';
        o << "scaled_visibility " << scan.scaled_visibility << '\n';
    } else if (type == "classify") {
        const Classification c = classify_correlation(b.jsa, build_visibility_options(a));
        o << to_string(c.label) << '\n';
        *ctx.err << "diagonal " << c.diagonal_visibility << " antidiagonal " << c.antidiagonal_visibility << '\n';
    }
    return kExitOk;
}

int cmd_fig3(const Context& ctx) {
    const json& c = ctx.config;
    const double wp = c.at("omega_p").get<double>();
    const double sigma = c.at("bandwidth_fraction").get<double>() * wp;
    const DispersionModel model = build_model(c.at("dispersion"), Units::normalized, {});
    const json& g = c.at("grid");
    const FrequencyGrid grid =
        FrequencyGrid::symmetric(0.5 * wp, g.at("half_span_sigmas").get<double>() * sigma, g.at("n_points").get<Eigen::Index>());
    const json& m = c.at("map");
    const VisibilityOptions vis = build_visibility_options(c.at("visibility"));

    std::ostringstream summary;
    summary << "# spdc-fig3-summary v1\n# " << header_config_line(c) << '\n';
    summary << "panel,source,solved_parameter,rms_bandwidth,rho_nu,p00,raw_visibility,scaled_visibility,direction,"
               "classification\n";
    std::ostream& o = *ctx.out;
    o << std::setprecision(10);
    for (const auto& [panel, which] : {std::pair{"a", LimitCase::anti_correlated}, std::pair{"b", LimitCase::correlated}}) {
        PumpPulse pump;
        const JointSpectralAmplitude jsa = calibrated_limit_source(which, wp, model, grid, sigma, &pump);
        const FransonMap map = franson_map(jsa, m.at("tau_max_cycles").get<double>(), m.at("n_samples").get<Eigen::Index>(),
                                           std::nullopt, ctx.threads);
        const FringeScan scan = fourth_order_visibility(jsa, vis);
        warn_scan(ctx, scan);
        const Classification cls = classify_correlation(jsa, vis);
        const bool anti = which == LimitCase::anti_correlated;
        io::HeaderLines header = base_header(ctx);
        header.push_back(std::string("panel: ") + panel);
        header.push_back("source: " + jsa.description);
        emit(ctx, std::string("fig3") + panel + "_map.csv", io::write_map_csv, map, header);
        emit_raw(ctx, std::string("fig3") + panel + "_map.pgm", io::render_pgm(map.probability));
        const double param = anti ? pump.width_w : pump.tau;
        summary << panel << ',' << (anti ? "monochromatic" : "plane_wave") << ',' << io::format_double(param) << ','
                << io::format_double(rms_bandwidth(jsa)) << ',' << io::format_double(frequency_correlation(jsa)) << ','
                << io::format_double(map.probability(0, 0)) << ',' << io::format_double(scan.raw_visibility) << ','
                << io::format_double(scan.scaled_visibility) << ',' << scan_direction_name(scan.direction) << ','
                << to_string(cls.label) << '\n';
        o << "fig3" << panel << ' ' << to_string(cls.label) << " raw_visibility " << scan.raw_visibility
          << " direction " << scan_direction_name(scan.direction) << " P00 " << map.probability(0, 0) << '\n';
    }
    emit_raw(ctx, "fig3_summary.csv", summary.str());
    return kExitOk;
}

int cmd_fig4(const Context& ctx) {
    const json& c = ctx.config;
    const auto dir = materials_dir_of(c);
    const double lambda_p = c.at("pump_wavelength_m").get<double>();
    const double wp = wavelength_to_omega(lambda_p);
    const double bandwidth = kTwoPi * 1e12 * c.at("pump_bandwidth_thz").get<double>();

    PumpPulse pump;
    pump.omega_p = wp;
    pump.tau = tau_from_intensity_fwhm(bandwidth);
    pump.width_w = 1.0;
    const CounterpropFamily counterprop{pump, build_model(c.at("counterprop").at("dispersion"), Units::si, dir)};

    const json& col = c.at("collinear");
    QpmCollinearSource q;
    q.pump_center_wavelength = lambda_p;
    q.pump_bandwidth = bandwidth;
    q.length = 1.0;
    q.pump_dispersion = build_model(col.at("pump_dispersion"), Units::si, dir);
    q.signal_dispersion = build_model(col.at("signal_dispersion"), Units::si, dir);
    q.idler_dispersion = build_model(col.at("idler_dispersion"), Units::si, dir);
    const double solved = solve_poling_period(q);
    const auto& period = col.at("poling_period_m");
    if (period.is_string() && period.get<std::string>() != "auto")
        throw ConfigError("collinear.poling_period_m must be a number or \"auto\"");
    q.poling_period = period.is_string() ? solved : period.get<double>();
    const CollinearFamily collinear{q};

    SweepOptions sweep;
    sweep.visibility = build_visibility_options(c.at("visibility"));
    sweep.threads = ctx.threads;
    const json& g = c.at("grid");
    sweep.min_points = g.at("n_points").get<Eigen::Index>();
    sweep.max_points = std::max(sweep.min_points, g.at("max_points").get<Eigen::Index>());
    sweep.span_sigmas = g.at("half_span_sigmas").get<double>();
    const VisibilityCurve cp = visibility_vs_length(counterprop, build_lengths(c.at("counterprop").at("lengths_m")), sweep);
    const VisibilityCurve cl = visibility_vs_length(collinear, build_lengths(col.at("lengths_m")), sweep);

    io::HeaderLines header = base_header(ctx);
    header.push_back("poling_period_used_m: " + io::format_double(q.poling_period));
    header.push_back("poling_period_solved_m: " + io::format_double(solved));
    header.push_back("poling_period_reference_m: " + io::format_double(kPaperPolingPeriod));
    emit(ctx, "fig4_counterprop.csv", io::write_curve_csv, cp, header);
    emit(ctx, "fig4_collinear.csv", io::write_curve_csv, cl, header);
    emit_raw(ctx, "fig4.ppm", io::render_curves_ppm({cp, cl}));

    std::ostream& o = *ctx.out;
    o << std::setprecision(10);
    o << "poling_period_solved_um " << solved * 1e6 << " (reference 47.7, deviation "
      << (solved / kPaperPolingPeriod - 1.0) * 100.0 << "%)\n";
    for (const auto* curve : {&cp, &cl}) {
        o << (curve == &cp ? "counterprop" : "collinear") << " length_m scaled_visibility\n";
        for (std::size_t k = 0; k < curve->lengths.size(); ++k)
            o << curve->lengths[k] << ' ' << curve->visibility[k] << '\n';
    }
    return kExitOk;
}

int validate_only(const Context& ctx, const std::string& command) {
    // Building the models surfaces missing material files and unit mix-ups.
    if (command == "jsa" || command == "franson" || command == "run") {
        const SourceSpec spec = build_source(ctx.config);
        (void)build_grid(ctx.config, spec);
    } else if (command == "dispersion") {
        (void)build_model(ctx.config.at("dispersion"), units_of(ctx.config), materials_dir_of(ctx.config));
    }
    *ctx.out << ctx.config.dump(2) << '\n';
    return kExitOk;
}

int dispatch(const std::string& command, const Context& ctx) {
    if (command == "dispersion") return cmd_dispersion(ctx);
    if (command == "jsa") return cmd_jsa(ctx);
    if (command == "franson" || command == "run") return run_analysis(ctx);
    if (command == "fig3") return cmd_fig3(ctx);
    if (command == "fig4") return cmd_fig4(ctx);
    throw ConfigError("unknown command " + command);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Counter-propagating SPDC joint spectra and Franson interferometry", "spdcsim"};
    app.require_subcommand(1);

    struct Options {
        std::string config;
        std::string out = ".";
        int threads = 1;
        bool validate = false;
    };
    Options opts;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"dispersion", "tabulate n, beta, beta1, beta2 over a wavelength range"},
        {"jsa", "build a joint spectral amplitude and its temporal intensity"},
        {"franson", "Franson map, fringe visibility or classification for one source"},
        {"fig3", "coincidence maps of the two limiting sources"},
        {"fig4", "visibility versus interaction length for both source families"},
        {"run", "dispatch on the config's analysis block (map|visibility|sweep|classify)"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config, "JSON config, or a CSV written by an earlier run");
        sub->add_option("--out", opts.out, "output directory");
        sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--validate", opts.validate, "resolve and check the config, then exit");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        Context ctx;
        ctx.out_dir = opts.out;
        ctx.threads = opts.threads;
        ctx.out = &out;
        ctx.err = &err;
        json raw = json::object();
        if (!opts.config.empty()) {
            raw = load_config(opts.config);
        } else if (command != "fig3" && command != "fig4") {
            throw ConfigError(command + " requires --config");
        }
        ctx.config = resolve_config(command, raw);
        if (opts.validate) return validate_only(ctx, command);
        return dispatch(command, ctx);
    } catch (const AliasRisk& e) {
        err << "error: AliasRisk: " << e.what() << '\n';
        return kExitAlias;
    } catch (const InvalidArgument& e) {
        err << "error: config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: domain: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace spdc::cli

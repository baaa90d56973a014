#include "spdc/config.hpp"
#include "spdc/materials.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace spdc::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void set_default(json& j, const char* key, json value) {
    if (!j.contains(key)) j[key] = std::move(value);
}

json& object_at(json& j, const char* key) {
    if (!j.contains(key)) j[key] = json::object();
    if (!j[key].is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
    return j[key];
}

double number_or_inf(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInf;
        throw ConfigError(std::string("'") + key + "' must be a number or \"inf\"");
    }
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number or \"inf\"");
    return v.get<double>();
}

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

json default_visibility() {
    return json{{"offset_in_sigma", 4.0},
                {"direction", "auto"},
                {"mode", "carrier_phase"},
                {"samples_per_period", 128},
                {"periods", 3.0}};
}

void resolve_visibility(json& v) {
    if (!v.is_object()) throw ConfigError("visibility settings must be an object");
    const json defaults = default_visibility();
    for (const auto& [k, val] : defaults.items()) set_default(v, k.c_str(), val);
}

void resolve_model(json& m, Units units, double default_omega0) {
    if (!m.is_object()) throw ConfigError("dispersion model must be an object");
    const auto type = m.value("type", std::string{});
    if (type == "taylor") {
        if (!m.contains("omega0")) {
            if (!std::isfinite(default_omega0)) throw ConfigError("taylor model needs 'omega0'");
            m["omega0"] = default_omega0;
        }
        if (!m.contains("beta") || !m["beta"].is_array()) throw ConfigError("taylor model needs a 'beta' array");
    } else if (type == "bulk" || type == "slab") {
        if (units == Units::normalized) throw ConfigError("material models require \"units\": \"si\"");
        if (!m.contains("material") && !m.contains("material_file"))
            throw ConfigError(type + " model needs 'material' or 'material_file'");
        if (type == "slab") {
            set_default(m, "n_clad", 1.0);
            set_default(m, "mode_order", 0);
            if (!m.contains("thickness_m")) throw ConfigError("slab model needs 'thickness_m'");
        }
    } else if (type == "constant") {
        if (units == Units::normalized) throw ConfigError("material models require \"units\": \"si\"");
        if (!m.contains("n")) throw ConfigError("constant model needs 'n'");
    } else {
        throw ConfigError("unknown dispersion model type '" + type + "'");
    }
}

double pump_omega(const json& src, Units units) {
    if (units == Units::normalized) return number(src, "omega_p");
    return wavelength_to_omega(number(src, "pump_wavelength_m"));
}

void resolve_source(json& r, Units units) {
    json& src = object_at(r, "source");
    const auto type = src.value("type", std::string{});
    if (units == Units::normalized) {
        set_default(src, "omega_p", 1.0);
    } else {
        set_default(src, "pump_wavelength_m", 7.9e-7);
    }
    const double wp = pump_omega(src, units);
    if (type == "counterprop") {
        if (!src.contains("tau") && !src.contains("pump_bandwidth_thz") && !src.contains("pump_bandwidth"))
            throw ConfigError("counterprop source needs 'tau', 'pump_bandwidth' or 'pump_bandwidth_thz'");
        if (!src.contains("width_w")) throw ConfigError("counterprop source needs 'width_w'");
        if (!src.contains("dispersion")) throw ConfigError("counterprop source needs 'dispersion'");
        resolve_model(src["dispersion"], units, 0.5 * wp);
    } else if (type == "collinear") {
        if (!src.contains("pump_bandwidth") && !src.contains("pump_bandwidth_thz"))
            throw ConfigError("collinear source needs 'pump_bandwidth' or 'pump_bandwidth_thz'");
        set_default(src, "poling_period_m", "auto");
        if (!src.contains("length_m")) throw ConfigError("collinear source needs 'length_m'");
        for (const char* key : {"pump_dispersion", "signal_dispersion", "idler_dispersion"}) {
            if (!src.contains(key)) throw ConfigError(std::string("collinear source needs '") + key + "'");
        }
        resolve_model(src["pump_dispersion"], units, wp);
        resolve_model(src["signal_dispersion"], units, 0.5 * wp);
        resolve_model(src["idler_dispersion"], units, 0.5 * wp);
    } else {
        throw ConfigError("source.type must be \"counterprop\" or \"collinear\"");
    }
}

void resolve_grid(json& r) {
    json& g = object_at(r, "grid");
    set_default(g, "mode", g.contains("half_span") ? "fixed" : "auto");
    set_default(g, "n_points", 257);
    const auto mode = g["mode"].get<std::string>();
    if (mode == "auto") {
        set_default(g, "half_span_sigmas", 5.0);
        set_default(g, "max_points", 2049);
    } else if (mode == "fixed") {
        if (!g.contains("half_span")) throw ConfigError("fixed grid needs 'half_span'");
    } else {
        throw ConfigError("grid.mode must be \"auto\" or \"fixed\"");
    }
}

void resolve_analysis(json& r, const std::vector<std::string>& allowed) {
    json& a = object_at(r, "analysis");
    const auto type = a.value("type", std::string{});
    bool ok = false;
    for (const auto& t : allowed) ok = ok || t == type;
    if (!ok) throw ConfigError("analysis.type '" + type + "' is not valid for this command");
    if (type == "map") {
        set_default(a, "tau_max_cycles", 50.0);
        set_default(a, "n_samples", 401);
    } else if (type == "visibility" || type == "classify") {
        resolve_visibility(a);
    } else if (type == "sweep") {
        if (!a.contains("lengths_m")) throw ConfigError("sweep analysis needs 'lengths_m'");
        json& v = object_at(a, "visibility");
        resolve_visibility(v);
        if (v["direction"] == "auto") v["direction"] = "antidiagonal";
    }
}

}  // namespace

json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    std::string body = text;
    if (!text.empty() && text[0] == '#') {
        const std::string marker = "# config: ";
        const auto pos = text.find(marker);
        if (pos == std::string::npos) throw ConfigError(path.string() + " carries no embedded config");
        const auto end = text.find('\n', pos);
        body = text.substr(pos + marker.size(), end == std::string::npos ? std::string::npos : end - pos - marker.size());
    }
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw ConfigError("config root must be an object");
        return j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

json resolve_config(const std::string& command, const json& raw) {
    json r = raw.is_null() ? json::object() : raw;
    if (!r.is_object()) throw ConfigError("config root must be an object");
    try {
        if (r.contains("command") && r["command"] != command)
            throw ConfigError("config was resolved for '" + r["command"].get<std::string>() + "', not '" + command + "'");
        r["command"] = command;
        const std::string default_units = (command == "fig4" || command == "dispersion") ? "si" : "normalized";
        set_default(r, "units", default_units);
        const Units units = units_of(r);

        if (command == "dispersion") {
            if (!r.contains("dispersion")) throw ConfigError("dispersion command needs a 'dispersion' model");
            resolve_model(r["dispersion"], units, kInf);
            json& t = object_at(r, "table");
            set_default(t, "count", 31);
            if (units == Units::si) {
                set_default(t, "lambda_min_m", 1.4e-6);
                set_default(t, "lambda_max_m", 1.7e-6);
            } else if (!t.contains("omega_min") || !t.contains("omega_max")) {
                throw ConfigError("normalized dispersion table needs 'omega_min' and 'omega_max'");
            }
        } else if (command == "jsa" || command == "franson" || command == "run") {
            resolve_source(r, units);
            resolve_grid(r);
            if (command == "franson") resolve_analysis(r, {"map", "visibility", "classify"});
            if (command == "run") resolve_analysis(r, {"map", "visibility", "classify", "sweep"});
        } else if (command == "fig3") {
            if (units != Units::normalized) throw ConfigError("fig3 runs in normalized units");
            set_default(r, "omega_p", 1.0);
            set_default(r, "bandwidth_fraction", 0.1);
            const double wp = number(r, "omega_p");
            set_default(r, "dispersion", json{{"type", "taylor"}, {"beta", {0.0, 1.0}}});
            resolve_model(r["dispersion"], units, 0.5 * wp);
            json& g = object_at(r, "grid");
            set_default(g, "n_points", 1025);
            set_default(g, "half_span_sigmas", 5.0);
            json& m = object_at(r, "map");
            set_default(m, "tau_max_cycles", 50.0);
            // Four samples per pump period 2π/ω_p over the default 50 cycles.
            set_default(m, "n_samples", 401);
            resolve_visibility(object_at(r, "visibility"));
        } else if (command == "fig4") {
            if (units != Units::si) throw ConfigError("fig4 runs in SI units");
            set_default(r, "pump_wavelength_m", 7.9e-7);
            set_default(r, "pump_bandwidth_thz", 3.0);
            json& cp = object_at(r, "counterprop");
            set_default(cp, "dispersion",
                        json{{"type", "slab"}, {"material", "GaAs"}, {"n_clad", 1.0}, {"thickness_m", 3e-6}, {"mode_order", 0}});
            const double wp = wavelength_to_omega(number(r, "pump_wavelength_m"));
            resolve_model(cp["dispersion"], units, 0.5 * wp);
            json& col = object_at(r, "collinear");
            set_default(col, "pump_dispersion", json{{"type", "bulk"}, {"material", "KTP_ny"}});
            set_default(col, "signal_dispersion", json{{"type", "bulk"}, {"material", "KTP_nz"}});
            set_default(col, "idler_dispersion", json{{"type", "bulk"}, {"material", "KTP_ny"}});
            set_default(col, "poling_period_m", "auto");
            resolve_model(col["pump_dispersion"], units, wp);
            resolve_model(col["signal_dispersion"], units, 0.5 * wp);
            resolve_model(col["idler_dispersion"], units, 0.5 * wp);
            set_default(cp, "lengths_m", json{{"min", 1e-5}, {"max", 0.1}, {"count", 12}});
            // Below ~1e-4 m the collinear phase-matching band overflows the spectral window.
            set_default(col, "lengths_m", json{{"min", 1e-4}, {"max", 0.1}, {"count", 12}});
            json& g = object_at(r, "grid");
            set_default(g, "n_points", 257);
            set_default(g, "max_points", 2049);
            set_default(g, "half_span_sigmas", 5.0);
            json& v = object_at(r, "visibility");
            resolve_visibility(v);
            if (v["direction"] == "auto") v["direction"] = "antidiagonal";
        } else {
            throw ConfigError("unknown command '" + command + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    return r;
}

Units units_of(const json& resolved) {
    const auto u = resolved.value("units", std::string{"normalized"});
    if (u == "normalized") return Units::normalized;
    if (u == "si") return Units::si;
    throw ConfigError("units must be \"normalized\" or \"si\"");
}

std::filesystem::path materials_dir_of(const json& resolved) {
    return resolved.contains("materials_dir") ? std::filesystem::path(resolved["materials_dir"].get<std::string>())
                                              : std::filesystem::path{};
}

DispersionModel build_model(const json& m, Units units, const std::filesystem::path& materials_dir) {
    try {
        const auto type = m.at("type").get<std::string>();
        if (type == "taylor") {
            return TaylorDispersion{m.at("omega0").get<double>(), m.at("beta").get<std::vector<double>>()};
        }
        if (units == Units::normalized) throw ConfigError("material models require SI units");
        if (type == "constant") return SellmeierModel::constant(m.at("n").get<double>());
        const SellmeierModel core = m.contains("material_file")
                                        ? load_material(m.at("material_file").get<std::string>())
                                        : find_material(m.at("material").get<std::string>(), materials_dir);
        if (type == "bulk") return core;
        SlabWaveguideTE wg;
        wg.core = core;
        wg.n_clad = m.at("n_clad").get<double>();
        wg.thickness = m.at("thickness_m").get<double>();
        wg.mode_order = m.at("mode_order").get<int>();
        return wg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("dispersion model: ") + e.what());
    }
}

SourceSpec build_source(const json& r) {
    const Units units = units_of(r);
    const auto dir = materials_dir_of(r);
    const json& src = r.at("source");
    SourceSpec spec;
    const double wp = pump_omega(src, units);
    auto pump_tau = [&]() {
        if (src.contains("tau")) return number_or_inf(src, "tau");
        if (src.contains("pump_bandwidth_thz"))
            return tau_from_intensity_fwhm(kTwoPi * 1e12 * number(src, "pump_bandwidth_thz"));
        return tau_from_intensity_fwhm(number(src, "pump_bandwidth"));
    };
    if (src.at("type") == "counterprop") {
        spec.pump.omega_p = wp;
        const double tau = pump_tau();
        const double w = number_or_inf(src, "width_w");
        spec.pump.monochromatic = std::isinf(tau);
        spec.pump.plane_wave = std::isinf(w);
        spec.pump.tau = spec.pump.monochromatic ? 0.0 : tau;
        spec.pump.width_w = spec.pump.plane_wave ? 0.0 : w;
        spec.pump.validate();
        spec.model = build_model(src.at("dispersion"), units, dir);
        return spec;
    }
    spec.collinear = true;
    auto& q = spec.qpm;
    q.pump_center_wavelength = omega_to_wavelength(wp);
    q.pump_bandwidth = src.contains("pump_bandwidth_thz") ? kTwoPi * 1e12 * number(src, "pump_bandwidth_thz")
                                                          : number(src, "pump_bandwidth");
    q.length = number(src, "length_m");
    q.pump_dispersion = build_model(src.at("pump_dispersion"), units, dir);
    q.signal_dispersion = build_model(src.at("signal_dispersion"), units, dir);
    q.idler_dispersion = build_model(src.at("idler_dispersion"), units, dir);
    const auto& period = src.at("poling_period_m");
    q.poling_period = period.is_string() && period.get<std::string>() == "auto" ? solve_poling_period(q)
                                                                                 : number_or_inf(src, "poling_period_m");
    return spec;
}

FrequencyGrid build_grid(const json& r, const SourceSpec& source) {
    const json& g = r.at("grid");
    const auto n = g.at("n_points").get<Eigen::Index>();
    if (g.at("mode") == "fixed") {
        const double half_span = number(g, "half_span");
        if (source.collinear) {
            const auto [ws, wi] = signal_idler_centers(source.qpm);
            FrequencyGrid grid{ws, wi, half_span, n};
            grid.validate();
            return grid;
        }
        return FrequencyGrid::symmetric(0.5 * source.pump.omega_p, half_span, n);
    }
    const double sigmas = number(g, "half_span_sigmas");
    const auto max_points = g.at("max_points").get<Eigen::Index>();
    if (source.collinear) return suggest_collinear_grid(source.qpm, sigmas, n, std::max(n, max_points));
    return suggest_counterprop_grid(source.pump, source.model, sigmas, n, std::max(n, max_points));
}

VisibilityOptions build_visibility_options(const json& a) {
    VisibilityOptions o;
    try {
        o.offset_in_sigma = a.at("offset_in_sigma").get<double>();
        const auto dir = a.at("direction").get<std::string>();
        if (dir == "diagonal") {
            o.direction = ScanDirection::diagonal;
        } else if (dir == "antidiagonal") {
            o.direction = ScanDirection::antidiagonal;
        } else if (dir != "auto") {
            throw ConfigError("direction must be auto, diagonal or antidiagonal");
        }
        const auto mode = a.at("mode").get<std::string>();
        if (mode == "carrier_phase") {
            o.mode = ScanMode::carrier_phase;
        } else if (mode == "group_delay") {
            o.mode = ScanMode::group_delay;
        } else {
            throw ConfigError("mode must be carrier_phase or group_delay");
        }
        o.samples_per_period = a.at("samples_per_period").get<int>();
        o.periods = a.at("periods").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("visibility settings: ") + e.what());
    }
    if (o.samples_per_period < 64) throw ConfigError("samples_per_period must be at least 64");
    return o;
}

std::vector<double> build_lengths(const json& l) {
    try {
        if (l.is_array()) return l.get<std::vector<double>>();
        return log_spaced(l.at("min").get<double>(), l.at("max").get<double>(), l.at("count").get<int>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("lengths: ") + e.what());
    }
}

std::string header_config_line(const json& resolved) { return "config: " + resolved.dump(); }

}  // namespace spdc::cli

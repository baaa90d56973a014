#include "spdc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace spdc::io {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void write_extra(std::ostream& out, const HeaderLines& extra) {
    for (const auto& line : extra) out << "# " << line << '\n';
}

const char* direction_name(ScanDirection d) { return d == ScanDirection::diagonal ? "diagonal" : "antidiagonal"; }

const char* mode_name(ScanMode m) { return m == ScanMode::carrier_phase ? "carrier_phase" : "group_delay"; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Whole-field numeric parse; trailing junk is an error.
template <class T, class F> T parse_field(const std::string& text, F convert) {
    const std::string t = trim(text);
    std::size_t used = 0;
    T value{};
    try {
        value = convert(t, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (t.empty() || used != t.size()) throw InvalidArgument("JSA CSV: bad number '" + text + "'");
    return value;
}

double to_double(const std::string& t) {
    return parse_field<double>(t, [](const std::string& x, std::size_t* n) { return std::stod(x, n); });
}

long to_long(const std::string& t) {
    return parse_field<long>(t, [](const std::string& x, std::size_t* n) { return std::stol(x, n); });
}

}  // namespace

void write_jsa_csv(std::ostream& out, const JointSpectralAmplitude& jsa, const HeaderLines& extra) {
    const auto& g = jsa.grid;
    out << "# spdc-jsa v1\n";
    out << "# description: " << jsa.description << '\n';
    out << "# center_l: " << format_double(g.center_l) << '\n';
    out << "# center_r: " << format_double(g.center_r) << '\n';
    out << "# half_span: " << format_double(g.half_span) << '\n';
    out << "# n_points: " << g.n_points << '\n';
    write_extra(out, extra);
    out << "i,j,re,im\n";
    for (Eigen::Index i = 0; i < g.n_points; ++i)
        for (Eigen::Index j = 0; j < g.n_points; ++j)
            out << i << ',' << j << ',' << format_double(jsa.amplitude(i, j).real()) << ','
                << format_double(jsa.amplitude(i, j).imag()) << '\n';
}

JointSpectralAmplitude read_jsa_csv(std::istream& in) {
    std::map<std::string, std::string> meta;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) meta[trim(line.substr(1, colon - 1))] = trim(line.substr(colon + 1));
            continue;
        }
        if (trim(line) == "i,j,re,im") {
            header_seen = true;
            break;
        }
        throw InvalidArgument("JSA CSV: unexpected line before column header: " + line);
    }
    if (!header_seen) throw InvalidArgument("JSA CSV: missing column header");
    for (const char* key : {"center_l", "center_r", "half_span", "n_points"})
        if (!meta.count(key)) throw InvalidArgument(std::string("JSA CSV: missing metadata '") + key + "'");

    JointSpectralAmplitude jsa;
    jsa.grid.center_l = to_double(meta["center_l"]);
    jsa.grid.center_r = to_double(meta["center_r"]);
    jsa.grid.half_span = to_double(meta["half_span"]);
    jsa.grid.n_points = to_long(meta["n_points"]);
    jsa.grid.validate();
    if (meta.count("description")) jsa.description = meta["description"];
    const Eigen::Index n = jsa.grid.n_points;
    jsa.amplitude = MatrixXc::Zero(n, n);
    std::vector<char> seen(static_cast<std::size_t>(n * n), 0);
    Eigen::Index rows = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        std::string f[4];
        for (auto& field : f)
            if (!std::getline(ss, field, ',')) throw InvalidArgument("JSA CSV: malformed row: " + line);
        const long i = to_long(f[0]);
        const long j = to_long(f[1]);
        if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidArgument("JSA CSV: index out of range: " + line);
        auto& flag = seen[static_cast<std::size_t>(i * n + j)];
        if (flag) throw InvalidArgument("JSA CSV: duplicate entry: " + line);
        flag = 1;
        jsa.amplitude(i, j) = Complex(to_double(f[2]), to_double(f[3]));
        ++rows;
    }
    if (rows != n * n) throw InvalidArgument("JSA CSV: expected n_points^2 rows");
    return jsa;
}

void write_jti_csv(std::ostream& out, const JointTemporalIntensity& jti, const HeaderLines& extra) {
    const Eigen::Index n = jti.times.size();
    out << "# spdc-jti v1\n";
    out << "# t_min: " << format_double(jti.times[0]) << '\n';
    out << "# t_step: " << format_double(n > 1 ? jti.times[1] - jti.times[0] : 0.0) << '\n';
    out << "# n_points: " << n << '\n';
    out << "# edge_ratio: " << format_double(jti.edge_ratio) << '\n';
    out << "# alias_warning: " << (jti.alias_warning ? "true" : "false") << '\n';
    write_extra(out, extra);
    out << "i,j,t1,t2,intensity\n";
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out << i << ',' << j << ',' << format_double(jti.times[i]) << ',' << format_double(jti.times[j]) << ','
                << format_double(jti.intensity(i, j)) << '\n';
}

void write_map_csv(std::ostream& out, const FransonMap& map, const HeaderLines& extra) {
    out << "# spdc-franson-map v1\n";
    out << "# time_unit: " << format_double(map.time_unit) << '\n';
    out << "# n_tau1: " << map.tau1.size() << '\n';
    out << "# n_tau2: " << map.tau2.size() << '\n';
    write_extra(out, extra);
    out << "tau1,tau2,probability\n";
    for (Eigen::Index a = 0; a < map.tau1.size(); ++a)
        for (Eigen::Index b = 0; b < map.tau2.size(); ++b)
            out << format_double(map.tau1[a]) << ',' << format_double(map.tau2[b]) << ','
                << format_double(map.probability(a, b)) << '\n';
}

void write_scan_csv(std::ostream& out, const FringeScan& scan, const HeaderLines& extra) {
    out << "# spdc-fringe-scan v1\n";
    out << "# center_tau1: " << format_double(scan.center.tau1) << '\n';
    out << "# center_tau2: " << format_double(scan.center.tau2) << '\n';
    out << "# direction: " << direction_name(scan.direction) << '\n';
    out << "# mode: " << mode_name(scan.mode) << '\n';
    out << "# raw_visibility: " << format_double(scan.raw_visibility) << '\n';
    out << "# scaled_visibility: " << format_double(scan.scaled_visibility) << '\n';
    write_extra(out, extra);
    out << "delta,probability\n";
    for (Eigen::Index k = 0; k < scan.offsets.size(); ++k)
        out << format_double(scan.offsets[k]) << ',' << format_double(scan.probability[k]) << '\n';
}

void write_curve_csv(std::ostream& out, const VisibilityCurve& curve, const HeaderLines& extra) {
    out << "# spdc-visibility-curve v1\n";
    out << "# family: " << curve.family << '\n';
    write_extra(out, extra);
    out << "length_m,scaled_visibility\n";
    for (std::size_t k = 0; k < curve.lengths.size(); ++k)
        out << format_double(curve.lengths[k]) << ',' << format_double(curve.visibility[k]) << '\n';
}

std::string render_pgm(const MatrixXd& values) {
    const Eigen::Index rows = values.rows();
    const Eigen::Index cols = values.cols();
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(rows * cols));
    for (Eigen::Index r = rows - 1; r >= 0; --r)
        for (Eigen::Index c = 0; c < cols; ++c)
            out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround((values(r, c) - lo) * scale))));
    return out;
}

std::string render_curves_ppm(const std::vector<VisibilityCurve>& curves, int width, int height) {
    std::vector<unsigned char> px(static_cast<std::size_t>(width * height * 3), 255);
    auto put = [&](int x, int y, const unsigned char* rgb) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        auto* p = &px[static_cast<std::size_t>((y * width + x) * 3)];
        p[0] = rgb[0];
        p[1] = rgb[1];
        p[2] = rgb[2];
    };
    double xmin = 1e300, xmax = -1e300;
    for (const auto& c : curves)
        for (double l : c.lengths) {
            xmin = std::min(xmin, std::log10(l));
            xmax = std::max(xmax, std::log10(l));
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    const int margin = 30;
    auto to_px = [&](double lx, double v) {
        const int x = margin + static_cast<int>(std::lround((lx - xmin) / (xmax - xmin) * (width - 2 * margin)));
        const int y = height - margin - static_cast<int>(std::lround(v * (height - 2 * margin)));
        return std::pair{x, y};
    };
    const unsigned char axis[3] = {0, 0, 0};
    for (int x = margin; x <= width - margin; ++x) put(x, height - margin, axis);
    for (int y = margin; y <= height - margin; ++y) put(margin, y, axis);
    static const unsigned char palette[][3] = {{200, 30, 30}, {30, 30, 200}, {30, 150, 30}, {120, 0, 120}};
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        const unsigned char* rgb = palette[ci % 4];
        const int thick = ci == 0 ? 2 : 1;
        for (std::size_t k = 0; k + 1 < c.lengths.size(); ++k) {
            auto [x0, y0] = to_px(std::log10(c.lengths[k]), c.visibility[k]);
            auto [x1, y1] = to_px(std::log10(c.lengths[k + 1]), c.visibility[k + 1]);
            const int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
            for (int s = 0; s <= steps; ++s) {
                const int x = x0 + (x1 - x0) * s / steps;
                const int y = y0 + (y1 - y0) * s / steps;
                for (int dx = -thick; dx <= thick; ++dx)
                    for (int dy = -thick; dy <= thick; ++dy) put(x + dx, y + dy, rgb);
            }
        }
    }
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(px.data()), px.size());
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace spdc::io

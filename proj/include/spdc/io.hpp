#pragma once

#include "spdc/franson.hpp"
#include "spdc/jsa.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spdc::io {

/// Shortest text that round-trips the double exactly ("%.17g").
std::string format_double(double x);

/// Extra `# key: value` lines written after the fixed metadata.
using HeaderLines = std::vector<std::string>;

void write_jsa_csv(std::ostream& out, const JointSpectralAmplitude& jsa, const HeaderLines& extra = {});
JointSpectralAmplitude read_jsa_csv(std::istream& in);

void write_jti_csv(std::ostream& out, const JointTemporalIntensity& jti, const HeaderLines& extra = {});

void write_map_csv(std::ostream& out, const FransonMap& map, const HeaderLines& extra = {});
void write_scan_csv(std::ostream& out, const FringeScan& scan, const HeaderLines& extra = {});
void write_curve_csv(std::ostream& out, const VisibilityCurve& curve, const HeaderLines& extra = {});

/// 8-bit binary PGM; values scaled linearly from [min, max] to [0, 255],
/// first matrix row at the bottom of the image.
std::string render_pgm(const MatrixXd& values);

/// Binary PPM line plot of several curves against log10(x).
std::string render_curves_ppm(const std::vector<VisibilityCurve>& curves, int width = 640, int height = 400);

/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace spdc::io

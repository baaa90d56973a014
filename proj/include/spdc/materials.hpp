#pragma once

#include "spdc/dispersion.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace spdc {

/// Parse a material file: {name, form_id, coefficients[], range_um:[min,max]}.
SellmeierModel parse_material(std::string_view json_text);

SellmeierModel load_material(const std::filesystem::path& path);

/// Resolve `name` to `<dir>/<name>.json`. An empty `dir` falls back to the
/// SPDC_MATERIALS_DIR environment variable, then to the bundled data directory.
SellmeierModel find_material(const std::string& name, const std::filesystem::path& dir = {});

std::filesystem::path default_materials_dir();

}  // namespace spdc

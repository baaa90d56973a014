#pragma once

#include "spdc/dispersion.hpp"
#include "spdc/franson.hpp"
#include "spdc/jsa.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spdc::cli {

using nlohmann::json;

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

enum class Units { normalized, si };

/// Reads a JSON config, or the `# config: {...}` line embedded in a CSV
/// produced by a previous run.
json load_config(const std::filesystem::path& path);

/// Fills defaults for `command`. Idempotent: resolve(resolve(c)) == resolve(c).
json resolve_config(const std::string& command, const json& raw);

Units units_of(const json& resolved);

DispersionModel build_model(const json& model, Units units, const std::filesystem::path& materials_dir);

struct SourceSpec {
    bool collinear = false;
    PumpPulse pump;  // counter-propagating source
    DispersionModel model;
    QpmCollinearSource qpm;  // collinear source
};

SourceSpec build_source(const json& resolved);

FrequencyGrid build_grid(const json& resolved, const SourceSpec& source);

VisibilityOptions build_visibility_options(const json& analysis);

std::vector<double> build_lengths(const json& lengths);

std::filesystem::path materials_dir_of(const json& resolved);

/// One-line canonical dump used in CSV headers.
std::string header_config_line(const json& resolved);

}  // namespace spdc::cli

#include "spdc/materials.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace spdc {

SellmeierModel parse_material(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("material file: ") + e.what());
    }
    SellmeierModel m;
    try {
        m.name = j.at("name").get<std::string>();
        const auto form = j.at("form_id").get<std::string>();
        if (form == "standard") {
            m.form = SellmeierForm::standard;
        } else if (form == "pole") {
            m.form = SellmeierForm::pole;
        } else {
            throw InvalidArgument("material '" + m.name + "': unknown form_id '" + form + "'");
        }
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        const auto range = j.at("range_um").get<std::vector<double>>();
        if (range.size() != 2) throw InvalidArgument("material '" + m.name + "': range_um needs two entries");
        m.lambda_min_um = range[0];
        m.lambda_max_um = range[1];
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("material file: ") + e.what());
    }
    if (m.coefficients.empty() || m.coefficients.size() % 2 == 0)
        throw InvalidArgument("material '" + m.name + "': expected [A, B1, C1, ...] (odd count)");
    if (!(m.lambda_min_um > 0.0 && m.lambda_max_um > m.lambda_min_um))
        throw InvalidArgument("material '" + m.name + "': invalid range_um");
    return m;
}

SellmeierModel load_material(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open material file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_material(ss.str());
}

std::filesystem::path default_materials_dir() {
    if (const char* env = std::getenv("SPDC_MATERIALS_DIR"); env && *env) return env;
#ifdef SPDC_MATERIALS_DIR
    return SPDC_MATERIALS_DIR;
#else
    return "data/materials";
#endif
}

SellmeierModel find_material(const std::string& name, const std::filesystem::path& dir) {
    const auto base = dir.empty() ? default_materials_dir() : dir;
    return load_material(base / (name + ".json"));
}

}  // namespace spdc

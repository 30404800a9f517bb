#include "manifest.hpp"

#include "csv.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace varcomp::cli {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const json& value,
                              const std::string& source, const std::string& key)
{
    if (!value.is_string()) {
        throw InputError(source + ": \"" + key + "\" must be a file path string");
    }
    std::filesystem::path p(value.get<std::string>());
    return p.is_absolute() ? p : base / p;
}

double positive(const json& value, const std::string& source, const std::string& key)
{
    if (!value.is_number() || !(value.get<double>() > 0.0)) {
        throw InputError(source + ": \"" + key + "\" must be a positive number");
    }
    return value.get<double>();
}

Vector numbers(const json& value, const std::string& source, const std::string& key)
{
    if (!value.is_array()) {
        throw InputError(source + ": \"" + key + "\" must be an array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) {
            throw InputError(source + ": \"" + key + "\" must be an array of numbers");
        }
        out(static_cast<Eigen::Index>(i)) = value[i].get<double>();
    }
    return out;
}

}  // namespace

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(source + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) {
        throw InputError(source + ": manifest must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "X" && key != "Z" && key != "y" && key != "tol" && key != "seed" &&
            key != "simulate") {
            throw InputError(source + ": unknown key \"" + key + "\"");
        }
    }
    Manifest m;
    if (!doc.contains("X")) {
        throw InputError(source + ": missing \"X\"");
    }
    m.x = resolve(base_dir, doc["X"], source, "X");
    if (!doc.contains("Z") || !doc["Z"].is_array() || doc["Z"].empty()) {
        throw InputError(source + ": \"Z\" must be a non-empty array of file paths");
    }
    for (const auto& z : doc["Z"]) {
        m.z.push_back(resolve(base_dir, z, source, "Z"));
    }
    if (doc.contains("y")) {
        m.y = resolve(base_dir, doc["y"], source, "y");
    }
    if (doc.contains("tol")) {
        const auto& tol = doc["tol"];
        if (!tol.is_object()) {
            throw InputError(source + ": \"tol\" must be an object");
        }
        for (const auto& [key, value] : tol.items()) {
            if (key == "rel_rank_tol") {
                m.tol.rel_rank_tol = positive(value, source, "tol.rel_rank_tol");
            } else if (key == "spd_tol") {
                m.tol.spd_tol = positive(value, source, "tol.spd_tol");
            } else {
                throw InputError(source + ": unknown key \"tol." + key + "\"");
            }
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) {
            throw InputError(source + ": \"seed\" must be a non-negative integer");
        }
        m.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("simulate")) {
        const auto& sim = doc["simulate"];
        if (!sim.is_object()) {
            throw InputError(source + ": \"simulate\" must be an object");
        }
        if (sim.contains("beta")) {
            m.simulate.beta = numbers(sim["beta"], source, "simulate.beta");
        }
        if (sim.contains("sigma2")) {
            m.simulate.sigma2 = numbers(sim["sigma2"], source, "simulate.sigma2");
        }
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(path.string() + ": cannot open manifest");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path(), path.string());
}

LoadedInput load_inputs(const Manifest& manifest,
                        const std::optional<std::filesystem::path>& y_override)
{
    Matrix x = read_csv_matrix(manifest.x);
    std::vector<Matrix> z;
    for (const auto& p : manifest.z) {
        z.push_back(read_csv_matrix(p));
    }
    std::optional<Vector> y;
    if (const auto& path = y_override ? y_override : manifest.y) {
        y = read_csv_vector(*path);
    }
    return {build_model(std::move(x), std::move(z), manifest.tol), std::move(y)};
}

}  // namespace varcomp::cli

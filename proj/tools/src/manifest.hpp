#pragma once

#include <varcomp/model.hpp>
#include <varcomp/numerics.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace varcomp::cli {

struct SimulateSpec {
    std::optional<Vector> beta;
    std::optional<Vector> sigma2;
};

/// JSON manifest:
///   { "X": "x.csv", "Z": ["z1.csv", ...], "y": "y.csv",
///     "tol": { "rel_rank_tol": 1e-10, "spd_tol": 1e-12 }, "seed": 7,
///     "simulate": { "beta": [..], "sigma2": [..] } }
/// Only "X" and "Z" are required. Relative paths are resolved against the
/// manifest's directory.
struct Manifest {
    std::filesystem::path x;
    std::vector<std::filesystem::path> z;
    std::optional<std::filesystem::path> y;
    Tolerance tol;
    std::optional<std::uint64_t> seed;
    SimulateSpec simulate;
};

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const std::string& source);
Manifest load_manifest(const std::filesystem::path& path);

struct LoadedInput {
    VarCompModel model;
    std::optional<Vector> y;
};

/// Reads the matrices and builds the model; `y_override` replaces the
/// manifest's y.
LoadedInput load_inputs(const Manifest& manifest,
                        const std::optional<std::filesystem::path>& y_override);

}  // namespace varcomp::cli

#pragma once

#include "manifest.hpp"

#include <varcomp/existence.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace varcomp::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kNonexistence = 3,
    kNumericalFailure = 4,
    kProbeViolation = 5,
};

struct RunOptions {
    Method method = Method::ML;
    std::optional<std::filesystem::path> y;
    std::optional<double> rel_rank_tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iters;
    std::optional<int> starts;
    std::optional<ProbeFamily> family;
    std::optional<std::filesystem::path> out;
    std::optional<Vector> beta;
    std::optional<Vector> sigma2;
};

struct CommandResult {
    int exit_code = kOk;
    std::string report;   ///< JSON, for stdout
    std::string summary;  ///< human-readable, for stderr
};

/// Verbs: check-ml, check-reml, fit, decompose, probe, simulate. Never throws;
/// failures are mapped to exit codes and reported as JSON.
CommandResult run_command(const std::string& verb, const std::filesystem::path& manifest,
                          const RunOptions& options);

/// Exit code for a library error kind.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace varcomp::cli

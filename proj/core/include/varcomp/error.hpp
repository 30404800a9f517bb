#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace varcomp {

enum class ErrorKind {
    InvalidInput,
    SpdFailure,
    ModelAssumption,
    ParameterDomain,
    RankDeficiency,
    DegenerateFit,
    Nonexistence,
    Precondition,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Base class for every error raised by the library. The kind is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace varcomp

#pragma once

#include <varcomp/numerics.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace varcomp::cli {

/// Malformed or inconsistent user input (files, manifest, flags).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Headerless CSV, one matrix row per line. Blank lines are ignored. Errors
/// read "<source>:<line>: <what>".
Matrix parse_csv_matrix(std::string_view text, const std::string& source);
Matrix read_csv_matrix(const std::filesystem::path& path);

/// A single-column CSV file.
Vector read_csv_vector(const std::filesystem::path& path);

/// One value per line, printed with round-trip precision.
std::string format_csv_vector(const Vector& v);
void write_csv_vector(const std::filesystem::path& path, const Vector& v);

/// "1.5,2,0" -> (1.5, 2, 0)
Vector parse_number_list(std::string_view text, const std::string& what);

}  // namespace varcomp::cli

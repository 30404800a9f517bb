#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace varcomp::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out)
{
    field = trim(field);
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    if (field.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(path.string() + ": cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Matrix parse_csv_matrix(std::string_view text, const std::string& source)
{
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t width = 0;
    std::size_t width_line = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<double> row;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view field = rest.substr(0, comma);
            double value = 0.0;
            if (!parse_double(field, value)) {
                throw InputError(source + ":" + std::to_string(line_no) + ": field " +
                                 std::to_string(row.size() + 1) + " is not a finite number: '" +
                                 std::string(trim(field)) + "'");
            }
            row.push_back(value);
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
        if (rows.empty()) {
            width = row.size();
            width_line = line_no;
        } else if (row.size() != width) {
            throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(width) + " fields (as on line " +
                             std::to_string(width_line) + "), found " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InputError(source + ": no rows");
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

Matrix read_csv_matrix(const std::filesystem::path& path)
{
    return parse_csv_matrix(slurp(path), path.string());
}

Vector read_csv_vector(const std::filesystem::path& path)
{
    const Matrix m = read_csv_matrix(path);
    if (m.cols() != 1) {
        throw InputError(path.string() + ": expected a single column, found " +
                         std::to_string(m.cols()));
    }
    return m.col(0);
}

std::string format_csv_vector(const Vector& v)
{
    std::string out;
    char buf[64];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v(i));
        out.append(buf, ptr);
        out.push_back('\n');
    }
    return out;
}

void write_csv_vector(const std::filesystem::path& path, const Vector& v)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError(path.string() + ": cannot open file for writing");
    }
    out << format_csv_vector(v);
}

Vector parse_number_list(std::string_view text, const std::string& what)
{
    const Matrix m = parse_csv_matrix(text, what);
    if (m.rows() != 1) {
        throw InputError(what + ": expected a comma-separated list on one line");
    }
    return m.row(0).transpose();
}

}  // namespace varcomp::cli

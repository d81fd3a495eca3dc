#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lep {

/// Shortest decimal that round-trips to the same double. Locale independent.
std::string format_real(double v);

double parse_real(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
    double real(std::size_t row, std::string_view name) const;
};

/// Plain comma-separated values without quoting; every row must match the
/// header width.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Writes a file in one shot; throws with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

} // namespace lep

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace idiff {

/// Minimal reader for the unquoted, comma-separated files this project writes.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool has_column(std::string_view name) const;
    std::size_t column_index(std::string_view name) const;
    /// Numeric column; "nan" parses to NaN. Throws IoError on malformed cells.
    std::vector<double> numbers(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace idiff

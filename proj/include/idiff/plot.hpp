#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace idiff {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool markers = false;
};

/// Standalone SVG 1.1 line chart with linear axes and a legend. NaN points are skipped.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series);

/// Reads the CSV artifacts in `output_dir` and writes one curve figure per curves_*.csv
/// and one error-versus-rate figure per (delta, h) block of rates.csv. Returns the written
/// paths in a deterministic order. Throws IoError when rates.csv or a curves file is missing.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& output_dir);

}  // namespace idiff

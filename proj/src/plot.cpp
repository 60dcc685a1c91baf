#include "idiff/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "idiff/csv.hpp"
#include "idiff/error.hpp"
#include "idiff/experiment.hpp"

namespace idiff {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    void pad() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
            return;
        }
        const double span = hi - lo;
        const double margin = span > 0.0 ? 0.05 * span : (lo != 0.0 ? 0.1 * std::abs(lo) : 1.0);
        lo -= margin;
        hi += margin;
    }
};

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series) {
    Range xr;
    Range yr;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xr.include(s.x[i]);
                yr.include(s.y[i]);
            }
        }
    }
    xr.pad();
    yr.pad();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight);
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
    svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       kWidth / 2.0, escape(title));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                       kLeft, kTop, plot_w, plot_h);

    constexpr int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double xv = xr.lo + (xr.hi - xr.lo) * t / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * t / kTicks;
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                           px(xv), kTop + plot_h, kTop + plot_h + 5.0);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.4g}</text>\n",
                           px(xv), kTop + plot_h + 18.0, xv);
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
                           kLeft - 5.0, py(yv), kLeft);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n",
                           kLeft - 8.0, py(yv) + 4.0, yv);
    }
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + plot_w / 2.0, kHeight - 15.0, escape(x_label));
    svg += fmt::format(
        "<text x=\"15\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {0:.2f})\">{1}</text>\n",
        kTop + plot_h / 2.0, escape(y_label));

    for (const auto& s : series) {
        const std::string dash = s.dashed ? " stroke-dasharray=\"6 4\"" : "";
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
                                   s.color, dash, points);
                points.clear();
            }
        };
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += fmt::format("{:.2f},{:.2f}", px(s.x[i]), py(s.y[i]));
            if (s.markers) {
                svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                                   px(s.x[i]), py(s.y[i]), s.color);
            }
        }
        flush();
    }

    double legend_y = kTop + 16.0;
    for (const auto& s : series) {
        const std::string dash = s.dashed ? " stroke-dasharray=\"6 4\"" : "";
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" stroke-width=\"1.5\"{4}/>\n",
                           kWidth - kRight - 170.0, legend_y - 4.0, kWidth - kRight - 140.0, s.color, dash);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", kWidth - kRight - 134.0,
                           legend_y, escape(s.label));
        legend_y += 16.0;
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content)) {
        throw IoError("cannot write " + path.string());
    }
}

std::filesystem::path curve_figure(const std::filesystem::path& csv_path) {
    const CsvTable table = read_csv(csv_path);
    const auto x = table.numbers("x");
    const std::string stem = csv_path.stem().string();  // curves_[drift_]<cell>
    const bool drift = stem.rfind("curves_drift_", 0) == 0;
    const std::string cell = stem.substr(drift ? 13 : 7);

    std::vector<Series> series;
    series.push_back({"true", x, table.numbers("truth"), "#000000", false, false});
    series.push_back({"direct (X)", x, table.numbers("mean_direct"), "#1f77b4", true, false});
    series.push_back({"integrated (Y)", x, table.numbers("mean_integrated"), "#d62728", false, false});

    const std::string what = drift ? "drift" : "diffusion coefficient";
    const auto svg = render_line_chart("Mean estimated " + what + ", " + cell, "x",
                                       drift ? "b(x)" : "sigma^2(x)", series);
    auto out = csv_path;
    out.replace_extension(".svg");
    write_text(out, svg);
    return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& output_dir) {
    const auto rates_path = output_dir / "rates.csv";
    if (!std::filesystem::exists(rates_path)) {
        throw IoError("missing expected file " + rates_path.string());
    }
    const CsvTable rates = read_csv(rates_path);
    const auto deltas = rates.numbers("delta");
    const auto hs = rates.numbers("h");
    const auto ns = rates.numbers("n");
    const auto remark = rates.numbers("rate_remark2");
    const auto direct = rates.numbers("maae_direct");
    const auto integrated = rates.numbers("maae_integrated");
    const auto slopes = rates.numbers("slope");
    const auto intercepts = rates.numbers("intercept");

    std::vector<std::filesystem::path> written;
    std::vector<std::pair<double, double>> block_order;
    std::map<std::pair<double, double>, std::vector<std::size_t>> blocks;
    for (std::size_t r = 0; r < deltas.size(); ++r) {
        const std::pair<double, double> key{deltas[r], hs[r]};
        if (!blocks.contains(key)) block_order.push_back(key);
        blocks[key].push_back(r);

        const std::string cell =
            cell_name(CellKey{deltas[r], hs[r], static_cast<std::size_t>(ns[r])});
        auto sigma2_csv = output_dir / ("curves_" + cell + ".csv");
        auto drift_csv = output_dir / ("curves_drift_" + cell + ".csv");
        const bool any = std::filesystem::exists(sigma2_csv) || std::filesystem::exists(drift_csv);
        if (!any) {
            throw IoError("missing expected file " + sigma2_csv.string());
        }
        for (const auto& path : {sigma2_csv, drift_csv}) {
            if (std::filesystem::exists(path)) written.push_back(curve_figure(path));
        }
    }

    for (const auto& key : block_order) {
        const auto& rows = blocks[key];
        std::vector<double> x;
        std::vector<double> yd;
        std::vector<double> yi;
        for (auto r : rows) {
            x.push_back(remark[r]);
            yd.push_back(direct[r]);
            yi.push_back(integrated[r]);
        }
        std::vector<Series> series;
        series.push_back({"MAAE direct (X)", x, yd, "#1f77b4", true, true});
        series.push_back({"MAAE integrated (Y)", x, yi, "#d62728", false, true});
        const double slope = slopes[rows.front()];
        const double intercept = intercepts[rows.front()];
        if (std::isfinite(slope) && std::isfinite(intercept)) {
            const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            series.push_back({"least-squares fit", {*lo, *hi},
                              {intercept + slope * *lo, intercept + slope * *hi}, "#7f7f7f", false, false});
        }
        const std::string name = fmt::format("rate_delta{:g}_h{:g}", key.first, key.second);
        const auto svg = render_line_chart(
            fmt::format("Theoretical vs simulated error, delta={:g}, h={:g}", key.first, key.second),
            "((log n)^3 / n)^(2/5)", "MAAE", series);
        const auto path = output_dir / (name + ".svg");
        write_text(path, svg);
        written.push_back(path);
    }
    return written;
}

}  // namespace idiff

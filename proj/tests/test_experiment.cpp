#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "idiff/csv.hpp"
#include "idiff/error.hpp"
#include "idiff/experiment.hpp"
#include "idiff/plot.hpp"

using namespace idiff;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("idiff_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kSmallOu = R"({
  "model": {"kind": "ou", "kappa": 0.5, "theta": -2.75, "sigma": 0.43},
  "deltas": [0.01],
  "bandwidths": [0.6091],
  "ns": [1000],
  "L": 10,
  "N": 20,
  "eval_range": [-2.79, -2.7],
  "master_seed": 12345
})";

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("minimal CIR config gets defaults") {
    const auto config = parse_config(R"({"model": "cir", "deltas": [0.008], "bandwidths": [0.12],
                                         "ns": [1000], "L": 5, "eval_range": [0.078, 0.09]})");
    CHECK(config.model == ModelKind::cir);
    CHECK(config.params.kappa == 0.85837);
    CHECK(config.params.theta == 0.085711);
    CHECK(config.params.sigma == 0.15660);
    CHECK(config.kernel == KernelKind::epanechnikov);
    CHECK(config.fine_factor == 10);
    CHECK(config.burn_in_time == doctest::Approx(10.0 / 0.85837));
    CHECK(config.N == 50);
    CHECK(config.estimators.size() == 2);
}

TEST_CASE("explicit model triple and fields") {
    const auto config = parse_config(R"({"model": {"kind": "cir", "kappa": 0.85837, "theta": 0.085711, "sigma": 0.15660},
        "deltas": [0.002, 0.01], "bandwidths": [0.03], "ns": [1000, 9000], "L": 200, "N": 50,
        "eval_range": [0.078, 0.09], "kernel": "triangular", "fine_factor": 4, "burn_in_time": 0,
        "estimators": ["sigma2_integrated"], "quadrature": "trapezoid", "x0": 0.08,
        "rate_params": {"q": 20, "theta": 0.3}})");
    CHECK(config.kernel == KernelKind::triangular);
    CHECK(config.fine_factor == 4);
    CHECK(config.burn_in_time == 0.0);
    CHECK(config.quadrature == Quadrature::trapezoid);
    CHECK(config.rate_params.q == 20.0);
    CHECK(*config.x0 == 0.08);
    CHECK(experiment_cells(config).size() == 4);
}

TEST_CASE("config errors name the field") {
    auto message_of = [](const char* text) -> std::string {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "";
    };
    const std::string base = R"("model": "ou", "deltas": [0.01], "bandwidths": [0.3], "ns": [1000], "eval_range": [-2.79, -2.7])";
    CHECK(message_of(("{" + base + R"(, "L": 0})").c_str()).find("/L") != std::string::npos);
    CHECK(message_of(("{" + base + R"(, "L": 5, "estimators": []})").c_str()).find("/estimators") != std::string::npos);
    CHECK(message_of(("{" + base + R"(, "L": 5, "colour": 1})").c_str()).find("/colour") != std::string::npos);
    CHECK(message_of(("{" + base + R"(, "L": 5, "kernel": "gauss"})").c_str()).find("/kernel") != std::string::npos);
    CHECK(message_of(("{" + base + R"(, "L": "many"})").c_str()).find("/L") != std::string::npos);
    CHECK(message_of(("{" + base + R"(, "L": 5, "deltas": [0.01, -1]})").c_str()).find("/deltas") != std::string::npos);
    CHECK(message_of(R"({"model": "ou", "L": 5})").find("missing") != std::string::npos);
    CHECK(message_of("{ not json").find("line") != std::string::npos);
}

TEST_CASE("seeds depend only on cell coordinates") {
    const CellKey a{0.008, 0.12, 1000};
    const CellKey b{0.008, 0.12, 3000};
    CHECK(cell_seed(1, a) == cell_seed(1, a));
    CHECK(cell_seed(1, a) != cell_seed(1, b));
    CHECK(cell_seed(1, a) != cell_seed(2, a));
    CHECK(cell_name(a) == "delta0.008_h0.12_n1000");
}

TEST_CASE("end-to-end CSV determinism across runs and thread counts") {
    auto config = parse_config(kSmallOu);
    config.output_dir = scratch_dir("det_a");
    run_experiment(config, 1);
    auto second = config;
    second.output_dir = scratch_dir("det_b");
    run_experiment(second, 4);
    for (const char* name : {"maae.csv", "rates.csv", "curves_delta0.01_h0.6091_n1000.csv",
                             "errors_delta0.01_h0.6091_n1000.csv"}) {
        const auto first_bytes = slurp(config.output_dir / name);
        CHECK_MESSAGE(!first_bytes.empty(), name);
        CHECK_MESSAGE(first_bytes == slurp(second.output_dir / name), name);
    }
    const std::string text = slurp(config.output_dir / "maae.csv");
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header == "model,estimator,delta,h,n,L,maae,rate_thm,rate_remark2");
}

TEST_CASE("per-replication errors average to the reported MAAE") {
    auto config = parse_config(kSmallOu);
    config.output_dir = scratch_dir("sums");
    config.estimators = {EstimatorTag::sigma2_direct, EstimatorTag::sigma2_integrated, EstimatorTag::drift_direct,
                         EstimatorTag::drift_integrated};
    config.ns = {1000};
    run_experiment(config, 2);
    const CsvTable maae_table = read_csv(config.output_dir / "maae.csv");
    const CsvTable errors = read_csv(config.output_dir / "errors_delta0.01_h0.6091_n1000.csv");
    const auto reported = maae_table.numbers("maae");
    for (std::size_t r = 0; r < maae_table.rows.size(); ++r) {
        const std::string& tag = maae_table.rows[r][maae_table.column_index("estimator")];
        const auto column = errors.numbers(tag);
        double sum = 0.0;
        for (double v : column) sum += v;
        CHECK(std::abs(sum / column.size() - reported[r]) <= 1e-9 * std::max(1.0, reported[r]));
    }
    CHECK(fs::exists(config.output_dir / "curves_drift_delta0.01_h0.6091_n1000.csv"));
}

TEST_CASE("cells are independent of the rest of the grid") {
    auto full = parse_config(kSmallOu);
    full.ns = {300, 500};
    full.bandwidths = {0.3046, 0.6091};
    full.output_dir = scratch_dir("cells_full");
    run_experiment(full, 0);
    auto subset = full;
    subset.ns = {500};
    subset.bandwidths = {0.6091};
    subset.output_dir = scratch_dir("cells_subset");
    run_experiment(subset, 1);
    for (const char* name : {"curves_delta0.01_h0.6091_n500.csv", "errors_delta0.01_h0.6091_n500.csv"}) {
        CHECK(slurp(full.output_dir / name) == slurp(subset.output_dir / name));
    }
}

TEST_CASE("OU truth curve is flat and plots are counted") {
    auto config = parse_config(kSmallOu);
    config.output_dir = scratch_dir("plots");
    run_experiment(config, 0);
    const CsvTable curves = read_csv(config.output_dir / "curves_delta0.01_h0.6091_n1000.csv");
    CHECK(curves.header == std::vector<std::string>{"x", "truth", "mean_direct", "mean_integrated"});
    for (double t : curves.numbers("truth")) CHECK(t == doctest::Approx(0.1849).epsilon(1e-12));

    const auto written = emit_plots(config.output_dir);
    CHECK(written.size() == 2);
    int svg_count = 0;
    for (const auto& entry : fs::directory_iterator(config.output_dir)) {
        if (entry.path().extension() == ".svg") {
            ++svg_count;
            const auto text = slurp(entry.path());
            CHECK(text.find("<svg") != std::string::npos);
            CHECK(text.find("version=\"1.1\"") != std::string::npos);
        }
    }
    CHECK(svg_count == 2);
}

TEST_CASE("plotting an empty directory names the missing file") {
    const auto dir = scratch_dir("empty");
    try {
        emit_plots(dir);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("rates.csv") != std::string::npos);
    }
}

TEST_CASE("rates.csv fits each (delta, h) block") {
    auto config = parse_config(kSmallOu);
    config.ns = {200, 400, 800};
    config.output_dir = scratch_dir("rates");
    run_experiment(config, 0);
    const CsvTable rates = read_csv(config.output_dir / "rates.csv");
    CHECK(rates.header == std::vector<std::string>{"delta", "h", "n", "rate_remark2", "maae_direct",
                                                   "maae_integrated", "slope", "intercept", "correlation"});
    REQUIRE(rates.rows.size() == 3);
    const auto corr = rates.numbers("correlation");
    CHECK(std::isfinite(corr[0]));
    CHECK(corr[0] == corr[2]);
}

TEST_CASE("replication failures name cell, replication and seed") {
    auto config = parse_config(kSmallOu);
    config.eval_lo = 50.0;  // far outside the data: every estimate is NaN
    config.eval_hi = 51.0;
    try {
        run_cell(config, experiment_cells(config).front(), 1);
        FAIL("expected CellFailure");
    } catch (const CellFailure& e) {
        const std::string what = e.what();
        CHECK(e.category() == ErrorCategory::numeric);
        CHECK(what.find("delta0.01_h0.6091_n1000") != std::string::npos);
        CHECK(what.find("replication 0") != std::string::npos);
        CHECK(what.find("seed") != std::string::npos);
    }
}

}  // TEST_SUITE

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idiff/analysis.hpp"
#include "idiff/estimators.hpp"
#include "idiff/kernels.hpp"
#include "idiff/sde.hpp"

namespace idiff {

enum class ModelKind { cir, ou };

std::string_view model_name(ModelKind kind);

/// Default parameter triples: CIR (0.85837, 0.085711, 0.15660), OU (0.5, -2.75, 0.43).
ReversionParams default_params(ModelKind kind);

struct ExperimentConfig {
    ModelKind model = ModelKind::cir;
    ReversionParams params = default_params(ModelKind::cir);
    std::vector<double> deltas;
    std::vector<double> bandwidths;
    std::vector<std::size_t> ns;
    std::size_t L = 0;
    std::size_t N = 50;
    double eval_lo = 0.0;
    double eval_hi = 0.0;
    KernelKind kernel = KernelKind::epanechnikov;
    std::size_t fine_factor = 10;
    std::uint64_t master_seed = 0;
    double burn_in_time = 0.0;  // parse_config defaults this to 10 / kappa
    std::optional<double> x0;   // defaults to theta
    Quadrature quadrature = Quadrature::left_riemann;
    std::vector<EstimatorTag> estimators{EstimatorTag::sigma2_direct,
                                         EstimatorTag::sigma2_integrated};
    std::filesystem::path output_dir = "results";
    RateParams rate_params;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses the JSON config document and applies defaults; throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

SdeModel build_model(const ExperimentConfig& config);

struct CellKey {
    double delta = 0.0;
    double h = 0.0;
    std::size_t n = 0;
};

/// File-name fragment, e.g. "delta0.008_h0.12_n1000".
std::string cell_name(const CellKey& cell);

/// Seed of the cell's replication stream; depends only on the cell coordinates.
std::uint64_t cell_seed(std::uint64_t master_seed, const CellKey& cell);

struct EstimatorResult {
    EstimatorTag tag;
    MaaeReport report;
    std::vector<double> mean_curve;
    double rate_thm = 0.0;
};

struct CellResult {
    CellKey cell;
    std::vector<double> grid;
    std::vector<std::uint64_t> seeds;
    std::vector<EstimatorResult> estimators;
    double rate_remark2 = 0.0;

    const EstimatorResult* find(EstimatorTag tag) const;
};

/// Simulates the cell's L replications (in parallel, order independent) and evaluates
/// every configured estimator. Replication failures surface as CellFailure.
CellResult run_cell(const ExperimentConfig& config, const CellKey& cell, unsigned threads = 0);

/// All (delta, h, n) cells in config order.
std::vector<CellKey> experiment_cells(const ExperimentConfig& config);

/// Runs every cell and writes maae.csv, rates.csv, curves_*.csv and errors_*.csv
/// into config.output_dir.
std::vector<CellResult> run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// CSV rendering, split out so in-memory runs can be serialised without touching disk.
std::string format_number(double value);
std::string maae_csv(const ExperimentConfig& config, const std::vector<CellResult>& cells);
std::string rates_csv(const ExperimentConfig& config, const std::vector<CellResult>& cells);
std::string curves_csv(const ExperimentConfig& config, const CellResult& cell, bool sigma2);
std::string errors_csv(const ExperimentConfig& config, const CellResult& cell);

}  // namespace idiff

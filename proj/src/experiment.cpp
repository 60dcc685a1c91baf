#include "idiff/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "idiff/error.hpp"
#include "idiff/parallel.hpp"
#include "idiff/rng.hpp"
#include "idiff/summation.hpp"

namespace idiff {

using nlohmann::json;

std::string_view model_name(ModelKind kind) {
    return kind == ModelKind::cir ? "cir" : "ou";
}

ReversionParams default_params(ModelKind kind) {
    if (kind == ModelKind::cir) {
        return {0.85837, 0.085711, 0.15660};
    }
    return {0.5, -2.75, 0.43};
}

// ---------------------------------------------------------------------------
// Config

namespace {

[[noreturn]] void config_fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

double read_number(const json& value, const std::string& field) {
    if (!value.is_number()) {
        config_fail(field, "expected a number, got " + std::string(value.type_name()));
    }
    return value.get<double>();
}

std::size_t read_count(const json& value, const std::string& field) {
    if (!value.is_number_integer()) {
        config_fail(field, "expected an integer, got " + std::string(value.type_name()));
    }
    if (value.is_number_unsigned()) {
        return value.get<std::size_t>();
    }
    const auto signed_value = value.get<std::int64_t>();
    if (signed_value < 0) {
        config_fail(field, "must be nonnegative, got " + std::to_string(signed_value));
    }
    return static_cast<std::size_t>(signed_value);
}

std::string read_string(const json& value, const std::string& field) {
    if (!value.is_string()) {
        config_fail(field, "expected a string, got " + std::string(value.type_name()));
    }
    return value.get<std::string>();
}

template <class T, class Read>
std::vector<T> read_list(const json& value, const std::string& field, Read read) {
    if (!value.is_array()) {
        config_fail(field, "expected an array, got " + std::string(value.type_name()));
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(read(value[i], field + "/" + std::to_string(i)));
    }
    return out;
}

void read_model(const json& value, ExperimentConfig& config) {
    if (value.is_string()) {
        const auto kind = read_string(value, "/model");
        if (kind != "cir" && kind != "ou") config_fail("/model", "unknown model '" + kind + "'");
        config.model = kind == "cir" ? ModelKind::cir : ModelKind::ou;
        config.params = default_params(config.model);
        return;
    }
    if (!value.is_object()) {
        config_fail("/model", "expected an object or a model name");
    }
    if (!value.contains("kind")) {
        config_fail("/model/kind", "missing required field");
    }
    const auto kind = read_string(value["kind"], "/model/kind");
    if (kind != "cir" && kind != "ou") config_fail("/model/kind", "unknown model '" + kind + "'");
    config.model = kind == "cir" ? ModelKind::cir : ModelKind::ou;
    config.params = default_params(config.model);
    for (const auto& [key, item] : value.items()) {
        const std::string field = "/model/" + key;
        if (key == "kind") continue;
        if (key == "kappa") config.params.kappa = read_number(item, field);
        else if (key == "theta") config.params.theta = read_number(item, field);
        else if (key == "sigma") config.params.sigma = read_number(item, field);
        else config_fail(field, "unknown field");
    }
}

void read_rate_params(const json& value, RateParams& params) {
    if (!value.is_object()) {
        config_fail("/rate_params", "expected an object");
    }
    for (const auto& [key, item] : value.items()) {
        const std::string field = "/rate_params/" + key;
        if (key == "q") params.q = read_number(item, field);
        else if (key == "theta") params.theta = read_number(item, field);
        else if (key == "kappa") params.kappa_exp = read_number(item, field);
        else if (key == "theta_bar") params.theta_bar = read_number(item, field);
        else if (key == "kappa_bar") params.kappa_bar = read_number(item, field);
        else if (key == "beta") params.beta_mix = read_number(item, field);
        else config_fail(field, "unknown field");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    auto all_positive = [](const std::vector<double>& values) {
        return std::all_of(values.begin(), values.end(),
                           [](double v) { return v > 0.0 && std::isfinite(v); });
    };
    if (!(params.kappa > 0.0) || !(params.sigma > 0.0) ||
        (model == ModelKind::cir && !(params.theta > 0.0)) || !std::isfinite(params.theta)) {
        config_fail("/model", "parameters must be positive (theta may be negative for ou)");
    }
    if (deltas.empty() || !all_positive(deltas)) config_fail("/deltas", "need a nonempty list of positive values");
    if (bandwidths.empty() || !all_positive(bandwidths)) config_fail("/bandwidths", "need a nonempty list of positive values");
    if (ns.empty()) config_fail("/ns", "need a nonempty list");
    for (std::size_t n : ns) {
        if (n < 3) config_fail("/ns", "every n must be at least 3");
    }
    if (L < 1) config_fail("/L", "must be at least 1");
    if (N < 2) config_fail("/N", "must be at least 2");
    if (!(eval_lo < eval_hi) || !std::isfinite(eval_lo) || !std::isfinite(eval_hi)) {
        config_fail("/eval_range", "need finite lo < hi");
    }
    if (fine_factor < 1) config_fail("/fine_factor", "must be at least 1");
    if (!(burn_in_time >= 0.0) || !std::isfinite(burn_in_time)) {
        config_fail("/burn_in_time", "must be nonnegative");
    }
    if (estimators.empty()) config_fail("/estimators", "select at least one estimator");
    if (std::set<EstimatorTag>(estimators.begin(), estimators.end()).size() != estimators.size()) {
        config_fail("/estimators", "duplicate estimator");
    }
    if (x0 && (!std::isfinite(*x0) || (model == ModelKind::cir && *x0 < 0.0))) {
        config_fail("/x0", "outside the model domain");
    }
    try {
        rate_params.validate();
    } catch (const Error& e) {
        config_fail("/rate_params", e.what());
    }
    const bool drift = std::any_of(estimators.begin(), estimators.end(),
                                   [](EstimatorTag t) { return !is_sigma2(t); });
    if (drift) {
        for (double d : deltas) {
            for (std::size_t n : ns) {
                if (!(static_cast<double>(n) * d > 1.0)) {
                    config_fail("/ns", "drift estimators need n * delta > 1 for the drift rate");
                }
            }
        }
    }
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }

    ExperimentConfig config;
    bool have_burn_in = false;
    std::set<std::string> required{"model", "deltas", "bandwidths", "ns", "L", "eval_range"};
    for (const auto& [key, value] : doc.items()) {
        const std::string field = "/" + key;
        required.erase(key);
        if (key == "model") {
            read_model(value, config);
        } else if (key == "deltas") {
            config.deltas = read_list<double>(value, field, read_number);
        } else if (key == "bandwidths") {
            config.bandwidths = read_list<double>(value, field, read_number);
        } else if (key == "ns") {
            config.ns = read_list<std::size_t>(value, field, read_count);
        } else if (key == "L") {
            config.L = read_count(value, field);
        } else if (key == "N") {
            config.N = read_count(value, field);
        } else if (key == "eval_range") {
            const auto range = read_list<double>(value, field, read_number);
            if (range.size() != 2) config_fail(field, "expected [lo, hi]");
            config.eval_lo = range[0];
            config.eval_hi = range[1];
        } else if (key == "kernel") {
            try {
                config.kernel = parse_kernel_kind(read_string(value, field));
            } catch (const ArgumentError& e) {
                config_fail(field, e.what());
            }
        } else if (key == "fine_factor") {
            config.fine_factor = read_count(value, field);
        } else if (key == "master_seed") {
            if (!value.is_number_integer()) config_fail(field, "expected an integer");
            config.master_seed = value.is_number_unsigned()
                                      ? value.get<std::uint64_t>()
                                      : static_cast<std::uint64_t>(value.get<std::int64_t>());
        } else if (key == "burn_in_time") {
            config.burn_in_time = read_number(value, field);
            have_burn_in = true;
        } else if (key == "x0") {
            config.x0 = read_number(value, field);
        } else if (key == "quadrature") {
            const auto rule = read_string(value, field);
            if (rule == "left_riemann") config.quadrature = Quadrature::left_riemann;
            else if (rule == "trapezoid") config.quadrature = Quadrature::trapezoid;
            else config_fail(field, "expected 'left_riemann' or 'trapezoid'");
        } else if (key == "estimators") {
            config.estimators = read_list<EstimatorTag>(value, field, [](const json& v, const std::string& f) {
                try {
                    return parse_estimator_tag(read_string(v, f));
                } catch (const ArgumentError& e) {
                    config_fail(f, e.what());
                }
            });
        } else if (key == "output_dir") {
            config.output_dir = read_string(value, field);
        } else if (key == "rate_params") {
            read_rate_params(value, config.rate_params);
        } else {
            config_fail(field, "unknown field");
        }
    }
    if (!required.empty()) {
        config_fail("/" + *required.begin(), "missing required field");
    }
    if (!have_burn_in && config.params.kappa > 0.0) {
        config.burn_in_time = 10.0 / config.params.kappa;
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

SdeModel build_model(const ExperimentConfig& config) {
    const auto& p = config.params;
    return config.model == ModelKind::cir ? make_cir_model(p.kappa, p.theta, p.sigma)
                                          : make_ou_model(p.kappa, p.theta, p.sigma);
}

// ---------------------------------------------------------------------------
// Cells

std::string cell_name(const CellKey& cell) {
    return fmt::format("delta{:g}_h{:g}_n{}", cell.delta, cell.h, cell.n);
}

std::uint64_t cell_seed(std::uint64_t master_seed, const CellKey& cell) {
    std::uint64_t seed = hash64(master_seed, std::bit_cast<std::uint64_t>(cell.delta));
    seed = hash64(seed, std::bit_cast<std::uint64_t>(cell.h));
    return hash64(seed, cell.n);
}

const EstimatorResult* CellResult::find(EstimatorTag tag) const {
    for (const auto& e : estimators) {
        if (e.tag == tag) return &e;
    }
    return nullptr;
}

std::vector<CellKey> experiment_cells(const ExperimentConfig& config) {
    std::vector<CellKey> cells;
    for (double delta : config.deltas) {
        for (double h : config.bandwidths) {
            for (std::size_t n : config.ns) {
                cells.push_back({delta, h, n});
            }
        }
    }
    return cells;
}

CellResult run_cell(const ExperimentConfig& config, const CellKey& cell, unsigned threads) {
    const SdeModel model = build_model(config);
    const KernelSpec kernel = make_kernel(config.kernel);
    const double x0 = config.x0.value_or(config.params.theta);
    const double dt = cell.delta / static_cast<double>(config.fine_factor);
    const double t_end = static_cast<double>(cell.n) * cell.delta;
    const SimulationOptions options{config.burn_in_time, config.quadrature};
    const bool need_x = std::any_of(config.estimators.begin(), config.estimators.end(),
                                    [](EstimatorTag t) { return !is_integrated(t); });

    CellResult result;
    result.cell = cell;
    result.grid = eval_grid(config.eval_lo, config.eval_hi, config.N);
    result.rate_remark2 = rate_remark2(cell.n);

    const std::uint64_t base = cell_seed(config.master_seed, cell);
    result.seeds.resize(config.L);
    for (std::size_t k = 0; k < config.L; ++k) {
        result.seeds[k] = hash64(base, k);
    }

    const std::size_t n_est = config.estimators.size();
    std::vector<std::vector<EstimateCurve>> curves(n_est, std::vector<EstimateCurve>(config.L));

    parallel_for(config.L, threads, [&](std::size_t k) {
        try {
            const FinePath path = euler_simulate(model, x0, t_end, dt, result.seeds[k], options);
            const ObservationSet obs = subsample(path, cell.delta, need_x);
            std::optional<BreveSeries> breve;
            for (std::size_t e = 0; e < n_est; ++e) {
                const EstimatorTag tag = config.estimators[e];
                if (is_integrated(tag) && !breve) {
                    breve = compute_breve(obs);
                }
                switch (tag) {
                case EstimatorTag::sigma2_integrated:
                    curves[e][k] = nw_sigma2_integrated(*breve, kernel, cell.h, result.grid);
                    break;
                case EstimatorTag::drift_integrated:
                    curves[e][k] = nw_drift_integrated(*breve, kernel, cell.h, result.grid);
                    break;
                case EstimatorTag::sigma2_direct:
                    curves[e][k] = nw_sigma2_direct(*obs.x_obs, obs.delta, kernel, cell.h, result.grid);
                    break;
                case EstimatorTag::drift_direct:
                    curves[e][k] = nw_drift_direct(*obs.x_obs, obs.delta, kernel, cell.h, result.grid);
                    break;
                }
            }
        } catch (const Error& e) {
            throw CellFailure(e.category(), fmt::format("cell {} replication {} seed {}: {}",
                                                        cell_name(cell), k, result.seeds[k], e.what()));
        }
    });

    for (std::size_t e = 0; e < n_est; ++e) {
        const EstimatorTag tag = config.estimators[e];
        EstimatorResult est{tag, {}, {}, 0.0};
        const auto truth = is_sigma2(tag) ? model.sigma2 : model.drift;
        try {
            est.report = maae(curves[e], truth);
        } catch (const InvalidEstimateError& err) {
            throw CellFailure(ErrorCategory::numeric,
                              fmt::format("cell {} replication {} seed {}: {} ({})", cell_name(cell),
                                          err.replication(), result.seeds[err.replication()],
                                          err.what(), estimator_name(tag)));
        }
        est.report.n = cell.n;
        est.report.delta = cell.delta;
        est.report.h = cell.h;
        est.report.estimator_tag = tag;

        est.mean_curve.resize(result.grid.size());
        for (std::size_t i = 0; i < result.grid.size(); ++i) {
            CompensatedSum sum;
            for (const auto& c : curves[e]) sum += c.values[i];
            est.mean_curve[i] = sum.value() / static_cast<double>(config.L);
        }
        est.rate_thm = is_sigma2(tag)
                           ? rate_diffusion(cell.delta, cell.h, cell.n, config.rate_params)
                           : rate_drift(cell.delta, cell.h, t_end, config.rate_params);
        result.estimators.push_back(std::move(est));
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV output

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    return fmt::format("{:.17g}", value);
}

std::string maae_csv(const ExperimentConfig& config, const std::vector<CellResult>& cells) {
    std::string out = "model,estimator,delta,h,n,L,maae,rate_thm,rate_remark2\n";
    for (const auto& cell : cells) {
        for (const auto& est : cell.estimators) {
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", model_name(config.model),
                               estimator_name(est.tag), format_number(cell.cell.delta),
                               format_number(cell.cell.h), cell.cell.n, config.L,
                               format_number(est.report.maae), format_number(est.rate_thm),
                               format_number(cell.rate_remark2));
        }
    }
    return out;
}

namespace {

/// Estimand the rate table and figures track: sigma2 when any sigma2 estimator is configured.
bool primary_is_sigma2(const ExperimentConfig& config) {
    return std::any_of(config.estimators.begin(), config.estimators.end(), is_sigma2);
}

double cell_maae(const CellResult& cell, EstimatorTag tag) {
    const auto* est = cell.find(tag);
    return est ? est->report.maae : std::nan("");
}

}  // namespace

std::string rates_csv(const ExperimentConfig& config, const std::vector<CellResult>& cells) {
    const bool sigma2 = primary_is_sigma2(config);
    const EstimatorTag direct = sigma2 ? EstimatorTag::sigma2_direct : EstimatorTag::drift_direct;
    const EstimatorTag integrated =
        sigma2 ? EstimatorTag::sigma2_integrated : EstimatorTag::drift_integrated;

    // Fit per (delta, h) block over its n values.
    std::map<std::pair<double, double>, RateFit> fits;
    std::map<std::pair<double, double>, std::vector<const CellResult*>> blocks;
    for (const auto& cell : cells) {
        blocks[{cell.cell.delta, cell.cell.h}].push_back(&cell);
    }
    for (const auto& [key, members] : blocks) {
        std::vector<double> errors;
        std::vector<double> rates;
        for (const auto* c : members) {
            const double m = c->find(direct) ? cell_maae(*c, direct) : cell_maae(*c, integrated);
            errors.push_back(m);
            rates.push_back(c->rate_remark2);
        }
        RateFit fit{std::nan(""), std::nan(""), std::nan("")};
        try {
            fit = rate_fit(errors, rates);
        } catch (const ArgumentError&) {
            // fewer than three distinct n in the block
        }
        fits[key] = fit;
    }

    std::string out = "delta,h,n,rate_remark2,maae_direct,maae_integrated,slope,intercept,correlation\n";
    for (const auto& cell : cells) {
        const auto& fit = fits[{cell.cell.delta, cell.cell.h}];
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_number(cell.cell.delta),
                           format_number(cell.cell.h), cell.cell.n, format_number(cell.rate_remark2),
                           format_number(cell_maae(cell, direct)),
                           format_number(cell_maae(cell, integrated)), format_number(fit.slope),
                           format_number(fit.intercept), format_number(fit.correlation));
    }
    return out;
}

std::string curves_csv(const ExperimentConfig& config, const CellResult& cell, bool sigma2) {
    const SdeModel model = build_model(config);
    const auto* direct = cell.find(sigma2 ? EstimatorTag::sigma2_direct : EstimatorTag::drift_direct);
    const auto* integrated =
        cell.find(sigma2 ? EstimatorTag::sigma2_integrated : EstimatorTag::drift_integrated);
    std::string out = "x,truth,mean_direct,mean_integrated\n";
    for (std::size_t i = 0; i < cell.grid.size(); ++i) {
        const double x = cell.grid[i];
        const double truth = sigma2 ? model.sigma2_true(x) : model.drift_true(x);
        out += fmt::format("{},{},{},{}\n", format_number(x), format_number(truth),
                           format_number(direct ? direct->mean_curve[i] : std::nan("")),
                           format_number(integrated ? integrated->mean_curve[i] : std::nan("")));
    }
    return out;
}

std::string errors_csv(const ExperimentConfig& config, const CellResult& cell) {
    std::string out = "replication,seed";
    for (const auto& est : cell.estimators) {
        out += ",";
        out += estimator_name(est.tag);
    }
    out += "\n";
    for (std::size_t k = 0; k < config.L; ++k) {
        out += fmt::format("{},{}", k, cell.seeds[k]);
        for (const auto& est : cell.estimators) {
            out += "," + format_number(est.report.per_replication_max_err[k]);
        }
        out += "\n";
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace

std::vector<CellResult> run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + config.output_dir.string() + ": " +
                      ec.message());
    }
    const bool any_sigma2 = std::any_of(config.estimators.begin(), config.estimators.end(), is_sigma2);
    const bool any_drift = std::any_of(config.estimators.begin(), config.estimators.end(),
                                       [](EstimatorTag t) { return !is_sigma2(t); });

    std::vector<CellResult> results;
    for (const auto& cell : experiment_cells(config)) {
        CellResult result = run_cell(config, cell, threads);
        const std::string name = cell_name(cell);
        if (any_sigma2) {
            write_file(config.output_dir / ("curves_" + name + ".csv"), curves_csv(config, result, true));
        }
        if (any_drift) {
            write_file(config.output_dir / ("curves_drift_" + name + ".csv"),
                       curves_csv(config, result, false));
        }
        write_file(config.output_dir / ("errors_" + name + ".csv"), errors_csv(config, result));
        results.push_back(std::move(result));
    }
    write_file(config.output_dir / "maae.csv", maae_csv(config, results));
    write_file(config.output_dir / "rates.csv", rates_csv(config, results));
    return results;
}

}  // namespace idiff

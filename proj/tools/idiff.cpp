// Command-line front end: simulate, estimate, experiment, moment-check, rates, plot.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "idiff/analysis.hpp"
#include "idiff/csv.hpp"
#include "idiff/error.hpp"
#include "idiff/estimators.hpp"
#include "idiff/experiment.hpp"
#include "idiff/kernels.hpp"
#include "idiff/plot.hpp"
#include "idiff/sde.hpp"

namespace {

using namespace idiff;

struct ModelOptions {
    std::string kind = "cir";
    std::optional<double> kappa;
    std::optional<double> theta;
    std::optional<double> sigma;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--model", kind, "cir or ou")->check(CLI::IsMember({"cir", "ou"}));
        cmd->add_option("--kappa", kappa, "mean-reversion speed");
        cmd->add_option("--theta", theta, "long-run mean");
        cmd->add_option("--sigma", sigma, "volatility scale");
    }

    SdeModel build() const {
        const ModelKind k = kind == "cir" ? ModelKind::cir : ModelKind::ou;
        const ReversionParams d = default_params(k);
        const double ka = kappa.value_or(d.kappa);
        const double th = theta.value_or(d.theta);
        const double si = sigma.value_or(d.sigma);
        return k == ModelKind::cir ? make_cir_model(ka, th, si) : make_ou_model(ka, th, si);
    }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + out_path);
    }
}

void print_moment(const char* label, const MomentCheckReport& r) {
    fmt::print("{} x0={} delta={} reps={} estimate={} stderr={} target={} bound_ok={}\n", label,
               format_number(r.x0), format_number(r.delta), r.replications,
               format_number(r.mc_estimate), format_number(r.mc_stderr), format_number(r.target),
               moment_bound_holds(r) ? "true" : "false");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and Nadaraya-Watson estimation for integrated diffusions"};
    app.require_subcommand(1);

    // simulate
    ModelOptions sim_model;
    double sim_x0 = std::nan("");
    double sim_t_end = 1.0;
    double sim_dt = 0.001;
    std::uint64_t sim_seed = 0;
    double sim_burn_in = 0.0;
    std::string sim_quad = "left_riemann";
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "simulate one fine-grid path to CSV (t,x,y)");
    sim_model.add_to(simulate);
    simulate->add_option("--x0", sim_x0, "initial state (default theta)");
    simulate->add_option("--t-end", sim_t_end, "horizon")->check(CLI::PositiveNumber);
    simulate->add_option("--dt", sim_dt, "fine step")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_seed, "generator seed");
    simulate->add_option("--burn-in", sim_burn_in, "discarded lead-in time");
    simulate->add_option("--quadrature", sim_quad, "left_riemann or trapezoid")
        ->check(CLI::IsMember({"left_riemann", "trapezoid"}));
    simulate->add_option("-o,--out", sim_out, "output CSV (default stdout)");

    // estimate
    std::string est_input;
    double est_delta = 0.0;
    double est_h = 0.0;
    std::string est_kernel = "epanechnikov";
    std::string est_tag = "sigma2_integrated";
    double est_lo = 0.0;
    double est_hi = 1.0;
    std::size_t est_points = 50;
    std::string est_out;
    auto* estimate = app.add_subcommand(
        "estimate", "estimate a coefficient curve from an observation CSV (columns y and optionally x)");
    estimate->add_option("-i,--input", est_input, "observation CSV")->required();
    estimate->add_option("--delta", est_delta, "observation spacing")->required()->check(CLI::PositiveNumber);
    estimate->add_option("--bandwidth", est_h, "bandwidth")->required();
    estimate->add_option("--kernel", est_kernel, "epanechnikov, uniform or triangular");
    estimate->add_option("--estimator", est_tag,
                         "sigma2_integrated, drift_integrated, sigma2_direct or drift_direct");
    estimate->add_option("--lo", est_lo, "grid start")->required();
    estimate->add_option("--hi", est_hi, "grid end")->required();
    estimate->add_option("--points", est_points, "grid size");
    estimate->add_option("-o,--out", est_out, "output CSV (default stdout)");

    // experiment
    std::string exp_config;
    std::string exp_out;
    unsigned threads = 0;
    bool exp_plot = false;
    auto* experiment = app.add_subcommand("experiment", "run a Monte-Carlo grid from a JSON config");
    experiment->add_option("-c,--config", exp_config, "JSON config")->required();
    experiment->add_option("-o,--out", exp_out, "output directory (overrides config)");
    experiment->add_option("--threads", threads, "worker threads (0 = all cores)");
    experiment->add_flag("--plot", exp_plot, "also emit SVG figures");

    // moment-check
    ModelOptions mc_model;
    std::optional<double> mc_x0;
    double mc_delta = 0.004;
    std::size_t mc_fine = 10;
    std::size_t mc_reps = 100000;
    std::uint64_t mc_seed = 0;
    std::string mc_which = "both";
    auto* moment = app.add_subcommand("moment-check", "Monte-Carlo check of the proxy-increment moments");
    mc_model.add_to(moment);
    moment->add_option("--x0", mc_x0, "conditioning state (default theta)");
    moment->add_option("--delta", mc_delta, "observation spacing")->check(CLI::PositiveNumber);
    moment->add_option("--fine-factor", mc_fine, "fine steps per delta");
    moment->add_option("--reps", mc_reps, "replications");
    moment->add_option("--seed", mc_seed, "master seed");
    moment->add_option("--statistic", mc_which, "diffusion, drift or both")
        ->check(CLI::IsMember({"diffusion", "drift", "both"}));
    moment->add_option("--threads", threads, "worker threads (0 = all cores)");

    // rates
    double r_delta = 0.008;
    double r_h = 0.12;
    std::size_t r_n = 1000;
    std::optional<double> r_T;
    RateParams rp;
    auto* rates = app.add_subcommand("rates", "evaluate theoretical rates and mixing conditions");
    rates->add_option("--delta", r_delta, "observation spacing");
    rates->add_option("--bandwidth", r_h, "bandwidth");
    rates->add_option("--n", r_n, "sample size");
    rates->add_option("--T", r_T, "horizon (default n * delta)");
    rates->add_option("--q", rp.q, "moment exponent");
    rates->add_option("--theta", rp.theta, "diffusion-theorem theta in (0,1)");
    rates->add_option("--kappa", rp.kappa_exp, "diffusion-theorem kappa in (0,1/2)");
    rates->add_option("--theta-bar", rp.theta_bar, "drift-theorem theta in (0,1)");
    rates->add_option("--kappa-bar", rp.kappa_bar, "drift-theorem kappa > 0");
    rates->add_option("--beta", rp.beta_mix, "mixing decay exponent");

    // plot
    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "render SVG figures from experiment CSVs");
    plot->add_option("-d,--dir", plot_dir, "experiment output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*simulate) {
            const SdeModel model = sim_model.build();
            const double x0 = std::isnan(sim_x0) ? model.params->theta : sim_x0;
            SimulationOptions options;
            options.burn_in_time = sim_burn_in;
            options.quadrature =
                sim_quad == "trapezoid" ? Quadrature::trapezoid : Quadrature::left_riemann;
            const FinePath path = euler_simulate(model, x0, sim_t_end, sim_dt, sim_seed, options);
            std::string csv = "t,x,y\n";
            for (std::size_t k = 0; k < path.x.size(); ++k) {
                csv += fmt::format("{},{},{}\n", format_number(static_cast<double>(k) * path.dt),
                                   format_number(path.x[k]), format_number(path.y[k]));
            }
            emit(csv, sim_out);
        } else if (*estimate) {
            const CsvTable table = read_csv(est_input);
            const EstimatorTag tag = parse_estimator_tag(est_tag);
            const KernelSpec kernel = make_kernel(parse_kernel_kind(est_kernel));
            const auto grid = eval_grid(est_lo, est_hi, est_points);
            EstimateCurve curve;
            if (is_integrated(tag)) {
                ObservationSet obs;
                obs.delta = est_delta;
                obs.y_obs = table.numbers("y");
                obs.n = obs.y_obs.empty() ? 0 : obs.y_obs.size() - 1;
                obs.t_horizon = static_cast<double>(obs.n) * est_delta;
                const BreveSeries breve = compute_breve(obs);
                curve = tag == EstimatorTag::sigma2_integrated
                            ? nw_sigma2_integrated(breve, kernel, est_h, grid)
                            : nw_drift_integrated(breve, kernel, est_h, grid);
            } else {
                const auto xs = table.numbers("x");
                curve = tag == EstimatorTag::sigma2_direct
                            ? nw_sigma2_direct(xs, est_delta, kernel, est_h, grid)
                            : nw_drift_direct(xs, est_delta, kernel, est_h, grid);
            }
            std::string csv = "x,value,denominator\n";
            for (std::size_t i = 0; i < curve.eval_points.size(); ++i) {
                csv += fmt::format("{},{},{}\n", format_number(curve.eval_points[i]),
                                   format_number(curve.values[i]), format_number(curve.denominators[i]));
            }
            emit(csv, est_out);
        } else if (*experiment) {
            ExperimentConfig config = load_config(exp_config);
            if (!exp_out.empty()) config.output_dir = exp_out;
            const auto cells = run_experiment(config, threads);
            for (const auto& cell : cells) {
                for (const auto& est : cell.estimators) {
                    fmt::print("{} {} maae={}\n", cell_name(cell.cell), estimator_name(est.tag),
                               format_number(est.report.maae));
                }
            }
            if (exp_plot) {
                for (const auto& path : emit_plots(config.output_dir)) {
                    fmt::print("wrote {}\n", path.string());
                }
            }
        } else if (*moment) {
            const SdeModel model = mc_model.build();
            const double x0 = mc_x0.value_or(model.params->theta);
            if (mc_which != "drift") {
                print_moment("diffusion",
                             moment_check_diffusion(model, x0, mc_delta, mc_fine, mc_reps, mc_seed, threads));
            }
            if (mc_which != "diffusion") {
                print_moment("drift",
                             moment_check_drift(model, x0, mc_delta, mc_fine, mc_reps, mc_seed, threads));
            }
        } else if (*rates) {
            const double horizon = r_T.value_or(static_cast<double>(r_n) * r_delta);
            fmt::print("rate_remark2 {}\n", format_number(rate_remark2(r_n)));
            fmt::print("rate_diffusion {}\n", format_number(rate_diffusion(r_delta, r_h, r_n, rp)));
            try {
                fmt::print("rate_drift {}\n", format_number(rate_drift(r_delta, r_h, horizon, rp)));
            } catch (const ArgumentError& e) {
                fmt::print("rate_drift n/a ({})\n", e.what());
            }
            for (const auto& [label, bound] :
                 {std::pair{"diffusion", &diffusion_beta_bound}, std::pair{"drift", &drift_beta_bound}}) {
                try {
                    const double b = bound(rp);
                    fmt::print("beta_{} bound={} ok={}\n", label, format_number(b),
                               rp.beta_mix > b ? "true" : "false");
                } catch (const ConditionNotApplicable& e) {
                    fmt::print("beta_{} not applicable ({})\n", label, e.what());
                }
            }
        } else if (*plot) {
            for (const auto& path : emit_plots(plot_dir)) {
                fmt::print("wrote {}\n", path.string());
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

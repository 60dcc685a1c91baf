#include "idiff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "idiff/error.hpp"
#include "idiff/parallel.hpp"
#include "idiff/rng.hpp"
#include "idiff/summation.hpp"

namespace idiff {

MaaeReport maae(std::span<const EstimateCurve> replicated_curves,
                const std::function<double(double)>& truth) {
    if (replicated_curves.empty()) {
        throw ArgumentError("maae needs at least one replication");
    }
    const auto& grid = replicated_curves.front().eval_points;
    std::vector<double> truth_values(grid.size());
    std::transform(grid.begin(), grid.end(), truth_values.begin(), truth);

    MaaeReport report;
    report.h = replicated_curves.front().h;
    report.per_replication_max_err.reserve(replicated_curves.size());
    CompensatedSum total;
    for (std::size_t k = 0; k < replicated_curves.size(); ++k) {
        const auto& curve = replicated_curves[k];
        if (curve.eval_points != grid || curve.values.size() != grid.size()) {
            throw ArgumentError("replication " + std::to_string(k) +
                                " uses a different evaluation grid");
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::isnan(curve.values[i])) {
                throw InvalidEstimateError(k, i);
            }
            worst = std::max(worst, std::abs(curve.values[i] - truth_values[i]));
        }
        report.per_replication_max_err.push_back(worst);
        total += worst;
    }
    report.maae = total.value() / static_cast<double>(replicated_curves.size());
    return report;
}

std::vector<double> eval_grid(double lo, double hi, std::size_t n_points) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ArgumentError("evaluation range needs finite lo < hi");
    }
    if (n_points < 2) {
        throw ArgumentError("evaluation grid needs at least 2 points");
    }
    std::vector<double> grid(n_points);
    const double step = (hi - lo) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i + 1 < n_points; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
    return grid;
}

void RateParams::validate() const {
    auto fail = [](const std::string& what) { throw ArgumentError("rate parameter " + what); };
    if (!(q > 0.0) || !std::isfinite(q)) fail("q must be positive");
    if (!(theta > 0.0 && theta < 1.0)) fail("theta must lie in (0, 1)");
    if (!(kappa_exp > 0.0 && kappa_exp < 0.5)) fail("kappa_exp must lie in (0, 1/2)");
    if (!(theta_bar > 0.0 && theta_bar < 1.0)) fail("theta_bar must lie in (0, 1)");
    if (!(kappa_bar > 0.0) || !std::isfinite(kappa_bar)) fail("kappa_bar must be positive");
    if (!(beta_mix > 0.0) || !std::isfinite(beta_mix)) fail("beta_mix must be positive");
}

double rate_remark2(std::size_t n) {
    if (n < 2) {
        throw ArgumentError("rate_remark2 needs n >= 2");
    }
    const double log_n = std::log(static_cast<double>(n));
    return std::pow(log_n * log_n * log_n / static_cast<double>(n), 0.4);
}

double rate_diffusion(double delta, double h, std::size_t n, const RateParams& params) {
    params.validate();
    if (!(delta >= 0.0) || !(h > 0.0) || n < 2) {
        throw ArgumentError("rate_diffusion needs delta >= 0, h > 0, n >= 2");
    }
    const double log_n = std::log(static_cast<double>(n));
    const double discretization = delta * std::pow(h, -1.0 / (1.0 + params.q));
    const double variance = std::sqrt(log_n * log_n * log_n / (static_cast<double>(n) * h));
    return discretization + variance + h * h;
}

double rate_drift(double delta, double h, double t_horizon, const RateParams& params) {
    params.validate();
    if (!(delta >= 0.0) || !(h > 0.0)) {
        throw ArgumentError("rate_drift needs delta >= 0 and h > 0");
    }
    if (!(t_horizon > 1.0)) {
        throw ArgumentError("rate_drift needs T > 1 so that log T is positive, got T = " +
                            std::to_string(t_horizon));
    }
    const double discretization = std::pow(delta, 0.5 - 1.0 / (2.0 + params.q));
    const double variance =
        std::sqrt(std::log(t_horizon) / (std::pow(t_horizon, params.theta_bar) * h));
    return discretization + variance + h * h;
}

double diffusion_beta_bound(const RateParams& params) {
    params.validate();
    const double gap = 1.0 - params.theta - params.kappa_exp;
    if (!(gap > 0.0)) {
        throw ConditionNotApplicable("diffusion condition requires 1 - theta - kappa > 0");
    }
    const double first = (2.0 + 3.0 * params.theta) / gap;
    const double second = (2.0 + 1.0 / (2.0 + params.q)) / (1.0 - 2.0 * params.kappa_exp);
    return std::max(first, second);
}

double drift_beta_bound(const RateParams& params) {
    params.validate();
    const double q = params.q;
    const double gap =
        1.0 - (1.0 + 4.0 / q) * params.theta_bar - 2.0 * params.kappa_bar / q;
    if (!(gap > 0.0)) {
        throw ConditionNotApplicable(
            "drift condition requires 1 - (1 + 4/q) theta_bar - 2 kappa_bar / q > 0");
    }
    const double first = (1.5 + params.theta_bar + params.kappa_bar) / gap - 2.0;
    const double second =
        (2.0 + 1.0 / (2.0 + q)) * params.theta_bar / (1.0 - params.theta_bar);
    return std::max(first, second);
}

BetaConditions check_beta_conditions(const RateParams& params) {
    return {params.beta_mix > diffusion_beta_bound(params),
            params.beta_mix > drift_beta_bound(params)};
}

namespace {

enum class MomentStatistic { squared, linear };

MomentCheckReport moment_check(const SdeModel& model, double x0, double delta,
                               std::size_t fine_factor, std::size_t reps, std::uint64_t seed,
                               unsigned threads, MomentStatistic statistic) {
    if (reps < 100) {
        throw ArgumentError("moment checks need at least 100 replications");
    }
    if (fine_factor < 1) {
        throw ArgumentError("fine_factor must be at least 1");
    }
    if (!(delta > 0.0)) {
        throw ArgumentError("delta must be positive");
    }
    const double dt = delta / static_cast<double>(fine_factor);
    std::vector<double> samples(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        const FinePath path = euler_simulate(model, x0, 2.0 * delta, dt, hash64(seed, r));
        const double y1 = path.y[fine_factor];
        const double y2 = path.y[2 * fine_factor];
        const double first = y1 / delta;
        const double second = (y2 - y1) / delta;
        const double diff = second - first;
        samples[r] = statistic == MomentStatistic::squared ? diff * diff / delta : diff / delta;
    });

    CompensatedSum sum;
    for (double s : samples) sum += s;
    const double mean = sum.value() / static_cast<double>(reps);
    CompensatedSum squares;
    for (double s : samples) squares += (s - mean) * (s - mean);
    const double variance = squares.value() / static_cast<double>(reps - 1);

    MomentCheckReport report;
    report.x0 = x0;
    report.mc_estimate = mean;
    report.mc_stderr = std::sqrt(variance / static_cast<double>(reps));
    report.target = statistic == MomentStatistic::squared ? 2.0 / 3.0 * model.sigma2_true(x0)
                                                          : model.drift_true(x0);
    report.delta = delta;
    report.replications = reps;
    return report;
}

}  // namespace

MomentCheckReport moment_check_diffusion(const SdeModel& model, double x0, double delta,
                                         std::size_t fine_factor, std::size_t reps,
                                         std::uint64_t seed, unsigned threads) {
    return moment_check(model, x0, delta, fine_factor, reps, seed, threads,
                        MomentStatistic::squared);
}

MomentCheckReport moment_check_drift(const SdeModel& model, double x0, double delta,
                                     std::size_t fine_factor, std::size_t reps, std::uint64_t seed,
                                     unsigned threads) {
    return moment_check(model, x0, delta, fine_factor, reps, seed, threads,
                        MomentStatistic::linear);
}

bool moment_bound_holds(const MomentCheckReport& report, double c_bias) {
    const double tolerance =
        4.0 * report.mc_stderr + c_bias * report.delta * (1.0 + std::abs(report.target));
    return std::abs(report.mc_estimate - report.target) <= tolerance;
}

RateFit rate_fit(std::span<const double> maae_values, std::span<const double> rate_values) {
    const std::size_t n = maae_values.size();
    if (n != rate_values.size() || n < 3) {
        throw ArgumentError("rate_fit needs two sequences of equal length >= 3");
    }
    CompensatedSum sx;
    CompensatedSum sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx += rate_values[i];
        sy += maae_values[i];
    }
    const double mean_x = sx.value() / static_cast<double>(n);
    const double mean_y = sy.value() / static_cast<double>(n);
    CompensatedSum sxx;
    CompensatedSum syy;
    CompensatedSum sxy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rate_values[i] - mean_x;
        const double dy = maae_values[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx.value() > 0.0)) {
        throw ArgumentError("rate_fit needs rate values that are not all equal");
    }
    RateFit fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.correlation =
        syy.value() > 0.0 ? sxy.value() / std::sqrt(sxx.value() * syy.value()) : 0.0;
    return fit;
}

}  // namespace idiff

#include "idiff/sde.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <utility>

#include "idiff/error.hpp"

namespace idiff {

namespace {

constexpr double kRatioTolerance = 1e-9;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParameterError(std::string(name) + " must be positive and finite, got " +
                             std::to_string(value));
    }
}

}  // namespace

SdeModel make_model(std::string name, std::function<double(double)> drift,
                    std::function<double(double)> diffusion, double domain_lo, double domain_hi,
                    PositivityScheme scheme) {
    if (!(domain_lo < domain_hi)) {
        throw ParameterError("model domain must satisfy lo < hi");
    }
    SdeModel model;
    model.name = std::move(name);
    model.drift = std::move(drift);
    model.diffusion = std::move(diffusion);
    model.sigma2 = [d = model.diffusion](double x) {
        const double s = d(x);
        return s * s;
    };
    model.domain_lo = domain_lo;
    model.domain_hi = domain_hi;
    model.positivity_scheme = scheme;
    return model;
}

SdeModel make_cir_model(double kappa, double theta, double sigma) {
    require_positive(kappa, "kappa");
    require_positive(theta, "theta");
    require_positive(sigma, "sigma");
    SdeModel model;
    model.name = "cir";
    model.drift = [kappa, theta](double x) { return kappa * (theta - x); };
    model.diffusion = [sigma](double x) { return sigma * std::sqrt(std::max(x, 0.0)); };
    model.sigma2 = [s2 = sigma * sigma](double x) { return s2 * std::max(x, 0.0); };
    model.domain_lo = 0.0;
    model.domain_hi = std::numeric_limits<double>::infinity();
    model.positivity_scheme = PositivityScheme::full_truncation;
    model.params = ReversionParams{kappa, theta, sigma};
    return model;
}

SdeModel make_ou_model(double kappa, double theta, double sigma) {
    require_positive(kappa, "kappa");
    require_positive(sigma, "sigma");
    if (!std::isfinite(theta)) {
        throw ParameterError("theta must be finite");
    }
    SdeModel model;
    model.name = "ou";
    model.drift = [kappa, theta](double x) { return kappa * (theta - x); };
    model.diffusion = [sigma](double) { return sigma; };
    model.sigma2 = [s2 = sigma * sigma](double) { return s2; };
    model.domain_lo = -std::numeric_limits<double>::infinity();
    model.domain_hi = std::numeric_limits<double>::infinity();
    model.positivity_scheme = PositivityScheme::none;
    model.params = ReversionParams{kappa, theta, sigma};
    return model;
}

std::optional<std::size_t> integer_ratio(double numerator, double denominator) {
    const double ratio = numerator / denominator;
    if (!std::isfinite(ratio) || ratio < 0.5) {
        return std::nullopt;
    }
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) > kRatioTolerance * nearest) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(nearest);
}

double euler_step(const SdeModel& model, double x, double dt, double sqrt_dt, double z) {
    double x_diff = x;
    if (model.positivity_scheme == PositivityScheme::full_truncation) {
        x_diff = std::max(x, 0.0);
        assert(x_diff >= 0.0);
    }
    return x + model.drift(x) * dt + model.diffusion(x_diff) * sqrt_dt * z;
}

FinePath euler_simulate(const SdeModel& model, double x0, double t_end, double dt,
                        std::uint64_t seed, const SimulationOptions& options) {
    NormalGenerator normals(seed);
    FinePath path = euler_simulate(model, x0, t_end, dt, normals, options);
    path.seed = seed;
    return path;
}

FinePath euler_simulate(const SdeModel& model, double x0, double t_end, double dt,
                        NormalGenerator& normals, const SimulationOptions& options) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ArgumentError("dt must be positive and finite");
    }
    if (!std::isfinite(x0) || x0 < model.domain_lo || x0 > model.domain_hi) {
        throw ArgumentError("x0 = " + std::to_string(x0) + " lies outside the model domain");
    }
    if (!(options.burn_in_time >= 0.0) || !std::isfinite(options.burn_in_time)) {
        throw ArgumentError("burn_in_time must be nonnegative and finite");
    }
    const auto steps = integer_ratio(t_end, dt);
    if (!steps || *steps < 1) {
        throw GridMismatchError("t_end / dt must be a positive integer (t_end = " +
                                std::to_string(t_end) + ", dt = " + std::to_string(dt) + ")");
    }

    const double sqrt_dt = std::sqrt(dt);
    double state = x0;

    const auto burn_in_steps =
        static_cast<std::size_t>(std::ceil(options.burn_in_time / dt - kRatioTolerance));
    for (std::size_t k = 0; k < burn_in_steps; ++k) {
        state = euler_step(model, state, dt, sqrt_dt, normals());
        if (!std::isfinite(state)) {
            throw DivergenceError(k + 1);
        }
    }

    FinePath path;
    path.dt = dt;
    path.x.resize(*steps + 1);
    path.y.resize(*steps + 1);
    path.x[0] = state;
    path.y[0] = 0.0;
    const bool trapezoid = options.quadrature == Quadrature::trapezoid;
    for (std::size_t k = 0; k < *steps; ++k) {
        const double next = euler_step(model, path.x[k], dt, sqrt_dt, normals());
        if (!std::isfinite(next)) {
            throw DivergenceError(burn_in_steps + k + 1);
        }
        path.x[k + 1] = next;
        path.y[k + 1] = trapezoid ? path.y[k] + 0.5 * (path.x[k] + next) * dt
                                  : path.y[k] + path.x[k] * dt;
    }
    return path;
}

ObservationSet subsample(const FinePath& path, double delta, bool with_x) {
    if (!(delta > 0.0)) {
        throw ArgumentError("delta must be positive");
    }
    const auto stride = integer_ratio(delta, path.dt);
    if (!stride || *stride < 1) {
        throw GridMismatchError("delta = " + std::to_string(delta) +
                                " is not an integer multiple of dt = " + std::to_string(path.dt));
    }
    const std::size_t n = path.steps() / *stride;
    if (n < 3) {
        throw InsufficientDataError("path supplies only " + std::to_string(n) +
                                    " observation intervals, need at least 3");
    }
    ObservationSet obs;
    obs.delta = delta;
    obs.n = n;
    obs.t_horizon = static_cast<double>(n) * delta;
    obs.y_obs.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        obs.y_obs[i] = path.y[i * *stride];
    }
    if (with_x) {
        std::vector<double> xs(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            xs[i] = path.x[i * *stride];
        }
        obs.x_obs = std::move(xs);
    }
    return obs;
}

}  // namespace idiff

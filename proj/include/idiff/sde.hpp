#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idiff/rng.hpp"

namespace idiff {

enum class PositivityScheme { none, full_truncation };

/// Quadrature rule for Y_t = int_0^t X_s ds on the fine grid.
enum class Quadrature { left_riemann, trapezoid };

/// Mean-reverting parameter triple shared by the CIR and OU examples.
struct ReversionParams {
    double kappa;
    double theta;
    double sigma;
};

/// Scalar diffusion dX = b(X) dt + sigma(X) dW on the state space (domain_lo, domain_hi).
struct SdeModel {
    std::string name;
    std::function<double(double)> drift;
    std::function<double(double)> diffusion;
    std::function<double(double)> sigma2;
    double domain_lo;
    double domain_hi;
    PositivityScheme positivity_scheme = PositivityScheme::none;
    std::optional<ReversionParams> params;

    double drift_true(double x) const { return drift(x); }
    double sigma2_true(double x) const { return sigma2(x); }
};

/// Builds a model from arbitrary coefficient functions; sigma2 is diffusion squared.
SdeModel make_model(std::string name, std::function<double(double)> drift,
                    std::function<double(double)> diffusion, double domain_lo, double domain_hi,
                    PositivityScheme scheme = PositivityScheme::none);

/// dX = kappa (theta - X) dt + sigma sqrt(X) dW, Euler with full truncation.
SdeModel make_cir_model(double kappa, double theta, double sigma);

/// dX = kappa (theta - X) dt + sigma dW.
SdeModel make_ou_model(double kappa, double theta, double sigma);

/// Simulated trajectory of (X, Y) on a uniform fine grid.
struct FinePath {
    double dt = 0.0;
    std::vector<double> x;
    std::vector<double> y;  // y[0] == 0
    std::uint64_t seed = 0;

    std::size_t steps() const { return x.empty() ? 0 : x.size() - 1; }
};

/// Y (and optionally X) sampled at t_i = i * delta, i = 0..n.
struct ObservationSet {
    double delta = 0.0;
    std::vector<double> y_obs;
    std::optional<std::vector<double>> x_obs;
    std::size_t n = 0;
    double t_horizon = 0.0;
};

struct SimulationOptions {
    /// Simulated before t = 0 and discarded; the recorded path starts at the burned-in state.
    double burn_in_time = 0.0;
    Quadrature quadrature = Quadrature::left_riemann;
};

/// Returns the integer closest to `ratio` if it is within rounding of an integer, else nullopt.
std::optional<std::size_t> integer_ratio(double numerator, double denominator);

/// One Euler-Maruyama step, honouring the model's positivity scheme.
double euler_step(const SdeModel& model, double x, double dt, double sqrt_dt, double z);

/// Euler-Maruyama path with its own generator seeded by `seed`.
FinePath euler_simulate(const SdeModel& model, double x0, double t_end, double dt,
                        std::uint64_t seed, const SimulationOptions& options = {});

/// Same as above, drawing from a caller-owned generator.
FinePath euler_simulate(const SdeModel& model, double x0, double t_end, double dt,
                        NormalGenerator& normals, const SimulationOptions& options = {});

ObservationSet subsample(const FinePath& path, double delta, bool with_x);

}  // namespace idiff

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "idiff/estimators.hpp"
#include "idiff/sde.hpp"

namespace idiff {

// ---------------------------------------------------------------------------
// Monte-Carlo error

/// Mean over replications of the maximum absolute error on the evaluation grid.
struct MaaeReport {
    double maae = 0.0;
    std::vector<double> per_replication_max_err;
    std::size_t n = 0;
    double delta = 0.0;
    double h = 0.0;
    EstimatorTag estimator_tag = EstimatorTag::sigma2_direct;
    std::size_t nan_count = 0;
};

/// Throws InvalidEstimateError on the first NaN (in replication, then point order) and
/// ArgumentError when the curves do not share one grid.
MaaeReport maae(std::span<const EstimateCurve> replicated_curves,
                const std::function<double(double)>& truth);

/// n_points equidistant values from lo to hi inclusive.
std::vector<double> eval_grid(double lo, double hi, std::size_t n_points);

// ---------------------------------------------------------------------------
// Theoretical rates

/// Exponents appearing in the uniform-rate theorems. Field ranges are checked by validate().
struct RateParams {
    double q = 38.0;           // moment exponent
    double theta = 0.4;        // diffusion theorem, in (0, 1)
    double kappa_exp = 0.4;    // diffusion theorem, in (0, 1/2)
    double theta_bar = 0.5;    // drift theorem, in (0, 1)
    double kappa_bar = 0.5;    // drift theorem, > 0
    double beta_mix = 20.0;    // mixing decay exponent, > 0

    void validate() const;
};

/// ((ln n)^3 / n)^(2/5).
double rate_remark2(std::size_t n);

/// delta * h^(-1/(1+q)) + sqrt((ln n)^3 / (n h)) + h^2.
double rate_diffusion(double delta, double h, std::size_t n, const RateParams& params);

/// delta^(1/2 - 1/(2+q)) + sqrt(ln T / (T^theta_bar h)) + h^2; requires T > 1.
double rate_drift(double delta, double h, double t_horizon, const RateParams& params);

/// Lower bounds the mixing exponent must exceed. Each throws ConditionNotApplicable when
/// the denominators of its inequality are not positive.
double diffusion_beta_bound(const RateParams& params);
double drift_beta_bound(const RateParams& params);

struct BetaConditions {
    bool diffusion_ok = false;
    bool drift_ok = false;
};

BetaConditions check_beta_conditions(const RateParams& params);

// ---------------------------------------------------------------------------
// Conditional-moment checks for the proxy increments

struct MomentCheckReport {
    double x0 = 0.0;
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    double target = 0.0;
    double delta = 0.0;
    std::size_t replications = 0;
};

inline constexpr double kMomentBiasConstant = 5.0;

/// Mean of (Xb_2 - Xb_1)^2 / delta over paths started at x0, against (2/3) sigma^2(x0).
MomentCheckReport moment_check_diffusion(const SdeModel& model, double x0, double delta,
                                         std::size_t fine_factor, std::size_t reps,
                                         std::uint64_t seed, unsigned threads = 0);

/// Mean of (Xb_2 - Xb_1) / delta against b(x0).
MomentCheckReport moment_check_drift(const SdeModel& model, double x0, double delta,
                                     std::size_t fine_factor, std::size_t reps, std::uint64_t seed,
                                     unsigned threads = 0);

/// |estimate - target| <= 4 stderr + c_bias delta (1 + |target|).
bool moment_bound_holds(const MomentCheckReport& report, double c_bias = kMomentBiasConstant);

// ---------------------------------------------------------------------------
// Error-versus-rate regression

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;
};

/// Least-squares line maae ~ rate and Pearson correlation (0 when maae is constant).
RateFit rate_fit(std::span<const double> maae_values, std::span<const double> rate_values);

}  // namespace idiff

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "idiff/kernels.hpp"
#include "idiff/sde.hpp"

namespace idiff {

/// Difference-quotient proxy for the unobserved X: values[j] = (Y_{(j+1)D} - Y_{jD}) / D,
/// i.e. values[0] stands for the proxy at time D.
struct BreveSeries {
    std::vector<double> values;
    double delta = 0.0;
};

/// Nadaraya-Watson estimate on a grid. values[i] is NaN where denominators[i] < eps_den.
struct EstimateCurve {
    std::vector<double> eval_points;
    std::vector<double> values;
    /// Empirical density at each point: (1 / n_used) * sum of K_h(covariate - x).
    std::vector<double> denominators;
    double h = 0.0;
    std::size_t n_used = 0;
};

enum class EstimatorTag { sigma2_integrated, sigma2_direct, drift_integrated, drift_direct };

std::string_view estimator_name(EstimatorTag tag);
EstimatorTag parse_estimator_tag(std::string_view name);
bool is_sigma2(EstimatorTag tag);
bool is_integrated(EstimatorTag tag);

/// Below this empirical density the ratio is flagged NaN.
inline double denominator_floor(double h) { return 1e-12 / h; }

BreveSeries compute_breve(const ObservationSet& obs);

/// Diffusion estimator from the proxy series: weights K_h(v[j-1] - x), responses
/// 3/2 (v[j+1] - v[j])^2 over every j where the triple exists (n_used = n - 2).
EstimateCurve nw_sigma2_integrated(const BreveSeries& breve, const KernelSpec& kernel, double h,
                                   std::span<const double> eval_points);

/// Drift counterpart with responses v[j+1] - v[j].
EstimateCurve nw_drift_integrated(const BreveSeries& breve, const KernelSpec& kernel, double h,
                                  std::span<const double> eval_points);

/// Diffusion estimator from direct observations: weights K_h(X_{i-1} - x), responses
/// (X_i - X_{i-1})^2, i = 1..n.
EstimateCurve nw_sigma2_direct(std::span<const double> x_obs, double delta, const KernelSpec& kernel,
                               double h, std::span<const double> eval_points);

EstimateCurve nw_drift_direct(std::span<const double> x_obs, double delta, const KernelSpec& kernel,
                              double h, std::span<const double> eval_points);

/// Generic ratio sum_j K_h(covariates[j] - x) responses[j] / (scale * sum_j K_h(covariates[j] - x)).
EstimateCurve nadaraya_watson(std::span<const double> covariates, std::span<const double> responses,
                              double scale, const KernelSpec& kernel, double h,
                              std::span<const double> eval_points);

}  // namespace idiff

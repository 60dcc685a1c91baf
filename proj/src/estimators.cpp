#include "idiff/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "idiff/error.hpp"
#include "idiff/summation.hpp"

namespace idiff {

std::string_view estimator_name(EstimatorTag tag) {
    switch (tag) {
    case EstimatorTag::sigma2_integrated: return "sigma2_integrated";
    case EstimatorTag::sigma2_direct: return "sigma2_direct";
    case EstimatorTag::drift_integrated: return "drift_integrated";
    case EstimatorTag::drift_direct: return "drift_direct";
    }
    return "unknown";
}

EstimatorTag parse_estimator_tag(std::string_view name) {
    if (name == "sigma2_integrated") return EstimatorTag::sigma2_integrated;
    if (name == "sigma2_direct") return EstimatorTag::sigma2_direct;
    if (name == "drift_integrated") return EstimatorTag::drift_integrated;
    if (name == "drift_direct") return EstimatorTag::drift_direct;
    throw ArgumentError("unknown estimator '" + std::string(name) + "'");
}

bool is_sigma2(EstimatorTag tag) {
    return tag == EstimatorTag::sigma2_integrated || tag == EstimatorTag::sigma2_direct;
}

bool is_integrated(EstimatorTag tag) {
    return tag == EstimatorTag::sigma2_integrated || tag == EstimatorTag::drift_integrated;
}

BreveSeries compute_breve(const ObservationSet& obs) {
    if (obs.y_obs.size() < 3) {
        throw InsufficientDataError("compute_breve needs at least 2 observation intervals");
    }
    if (!(obs.delta > 0.0)) {
        throw ArgumentError("delta must be positive");
    }
    BreveSeries breve;
    breve.delta = obs.delta;
    breve.values.resize(obs.y_obs.size() - 1);
    for (std::size_t i = 1; i < obs.y_obs.size(); ++i) {
        breve.values[i - 1] = (obs.y_obs[i] - obs.y_obs[i - 1]) / obs.delta;
    }
    return breve;
}

EstimateCurve nadaraya_watson(std::span<const double> covariates, std::span<const double> responses,
                              double scale, const KernelSpec& kernel, double h,
                              std::span<const double> eval_points) {
    if (!(h > 0.0)) {
        throw BandwidthError(h);
    }
    if (eval_points.empty()) {
        throw ArgumentError("evaluation grid is empty");
    }
    if (covariates.size() != responses.size() || covariates.empty()) {
        throw ArgumentError("covariates and responses must be nonempty and of equal length");
    }

    const double inv_h = 1.0 / h;
    const double floor = denominator_floor(h);
    const auto n_used = covariates.size();

    EstimateCurve curve;
    curve.h = h;
    curve.n_used = n_used;
    curve.eval_points.assign(eval_points.begin(), eval_points.end());
    curve.values.resize(eval_points.size());
    curve.denominators.resize(eval_points.size());

    for (std::size_t p = 0; p < eval_points.size(); ++p) {
        const double x = eval_points[p];
        CompensatedSum numerator;
        CompensatedSum weight_sum;
        for (std::size_t j = 0; j < n_used; ++j) {
            const double w = kernel_eval(kernel, (covariates[j] - x) * inv_h) * inv_h;
            if (w != 0.0) {
                numerator += w * responses[j];
                weight_sum += w;
            }
        }
        const double density = weight_sum.value() / static_cast<double>(n_used);
        curve.denominators[p] = density;
        curve.values[p] = density < floor ? std::numeric_limits<double>::quiet_NaN()
                                          : numerator.value() / (scale * weight_sum.value());
    }
    return curve;
}

namespace {

enum class Response { square, linear };

EstimateCurve integrated_estimate(const BreveSeries& breve, const KernelSpec& kernel, double h,
                                  std::span<const double> eval_points, Response response) {
    const auto& v = breve.values;
    if (v.size() < 3) {
        throw InsufficientDataError("proxy series needs at least 3 values");
    }
    const std::size_t terms = v.size() - 2;
    std::vector<double> covariates(terms);
    std::vector<double> responses(terms);
    for (std::size_t k = 0; k < terms; ++k) {
        // Triple (k, k+1, k+2): weight at lag k, increment between k+1 and k+2.
        const double d = v[k + 2] - v[k + 1];
        covariates[k] = v[k];
        responses[k] = response == Response::square ? 1.5 * (d * d) : d;
    }
    return nadaraya_watson(covariates, responses, breve.delta, kernel, h, eval_points);
}

EstimateCurve direct_estimate(std::span<const double> x_obs, double delta, const KernelSpec& kernel,
                              double h, std::span<const double> eval_points, Response response) {
    if (x_obs.size() < 2) {
        throw InsufficientDataError("direct estimator needs at least 2 observations");
    }
    if (!(delta > 0.0)) {
        throw ArgumentError("delta must be positive");
    }
    const std::size_t terms = x_obs.size() - 1;
    std::vector<double> responses(terms);
    for (std::size_t i = 0; i < terms; ++i) {
        const double d = x_obs[i + 1] - x_obs[i];
        responses[i] = response == Response::square ? d * d : d;
    }
    return nadaraya_watson(x_obs.first(terms), responses, delta, kernel, h, eval_points);
}

}  // namespace

EstimateCurve nw_sigma2_integrated(const BreveSeries& breve, const KernelSpec& kernel, double h,
                                   std::span<const double> eval_points) {
    return integrated_estimate(breve, kernel, h, eval_points, Response::square);
}

EstimateCurve nw_drift_integrated(const BreveSeries& breve, const KernelSpec& kernel, double h,
                                  std::span<const double> eval_points) {
    return integrated_estimate(breve, kernel, h, eval_points, Response::linear);
}

EstimateCurve nw_sigma2_direct(std::span<const double> x_obs, double delta, const KernelSpec& kernel,
                               double h, std::span<const double> eval_points) {
    return direct_estimate(x_obs, delta, kernel, h, eval_points, Response::square);
}

EstimateCurve nw_drift_direct(std::span<const double> x_obs, double delta, const KernelSpec& kernel,
                              double h, std::span<const double> eval_points) {
    return direct_estimate(x_obs, delta, kernel, h, eval_points, Response::linear);
}

}  // namespace idiff

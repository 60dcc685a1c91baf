#include "idiff/kernels.hpp"

#include <algorithm>
#include <limits>

namespace idiff {

KernelSpec make_kernel(KernelKind kind) {
    switch (kind) {
    case KernelKind::epanechnikov: return {kind, 1.0, 0.75, 1.5};
    case KernelKind::uniform:
        return {kind, 1.0, 0.5, std::numeric_limits<double>::infinity()};
    case KernelKind::triangular: return {kind, 1.0, 1.0, 1.0};
    }
    throw ArgumentError("unknown kernel kind");
}

std::string_view kernel_name(KernelKind kind) {
    switch (kind) {
    case KernelKind::epanechnikov: return "epanechnikov";
    case KernelKind::uniform: return "uniform";
    case KernelKind::triangular: return "triangular";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "epanechnikov") return KernelKind::epanechnikov;
    if (name == "uniform") return KernelKind::uniform;
    if (name == "triangular") return KernelKind::triangular;
    throw ArgumentError("unknown kernel kind '" + std::string(name) + "'");
}

KernelValidationReport validate_kernel(const KernelSpec& spec, int quad_points) {
    if (quad_points < 100) {
        throw ArgumentError("validate_kernel needs at least 100 quadrature points");
    }
    // Multiple of 4: even for Simpson, and u = 0 falls on a panel boundary.
    const int intervals = (quad_points + 3) / 4 * 4;
    const double c = spec.support_radius;
    const double step = 2.0 * c / intervals;

    KernelValidationReport report;
    double integral = 0.0;
    double moment = 0.0;
    for (int j = 0; j <= intervals; ++j) {
        const double u = -c + step * j;
        const double k = kernel_eval(spec, u);
        const double weight = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        integral += weight * k;
        moment += weight * u * u * std::abs(k);
        report.symmetry_defect = std::max(report.symmetry_defect, std::abs(k - kernel_eval(spec, -u)));
        report.max_value = std::max(report.max_value, k);
    }
    report.integral = integral * step / 3.0;
    report.second_moment = moment * step / 3.0;
    report.passed = std::abs(report.integral - 1.0) < 1e-9 && report.symmetry_defect < 1e-12 &&
                    report.max_value <= spec.sup_bound;
    return report;
}

}  // namespace idiff

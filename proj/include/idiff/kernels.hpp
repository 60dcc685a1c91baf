#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "idiff/error.hpp"

namespace idiff {

/// Nonnegative, symmetric, compactly supported smoothing kernels.
enum class KernelKind { epanechnikov, uniform, triangular };

struct KernelSpec {
    KernelKind kind = KernelKind::epanechnikov;
    double support_radius = 1.0;
    double sup_bound = 0.75;
    /// Documentation only; infinite for the discontinuous uniform kernel.
    double lipschitz = 1.5;
};

KernelSpec make_kernel(KernelKind kind);

/// Lowercase config name ("epanechnikov", "uniform", "triangular").
std::string_view kernel_name(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

inline double kernel_eval(const KernelSpec& spec, double u) {
    const double a = std::abs(u);
    if (a > 1.0) {
        return 0.0;
    }
    switch (spec.kind) {
    case KernelKind::epanechnikov: return 0.75 * (1.0 - u * u);
    case KernelKind::uniform: return 0.5;
    case KernelKind::triangular: return 1.0 - a;
    }
    return 0.0;
}

/// K_h(z) = K(z / h) / h.
inline double kernel_scaled(const KernelSpec& spec, double h, double z) {
    if (!(h > 0.0)) {
        throw BandwidthError(h);
    }
    return kernel_eval(spec, z / h) / h;
}

struct KernelValidationReport {
    double integral = 0.0;
    double symmetry_defect = 0.0;
    double second_moment = 0.0;
    double max_value = 0.0;
    bool passed = false;
};

/// Composite Simpson quadrature of the normalization and second moment over the
/// support, plus a symmetry and boundedness scan on the same nodes.
KernelValidationReport validate_kernel(const KernelSpec& spec, int quad_points);

}  // namespace idiff

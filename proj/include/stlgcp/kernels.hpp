#pragma once

#include <string>
#include <vector>

#include "stlgcp/geometry.hpp"

namespace stlgcp {

enum class KernelType { Epanechnikov, Gaussian, Box };

KernelType kernel_type_from_string(const std::string& name);
std::string to_string(KernelType k);

/// One-dimensional smoothing kernel, normalized to integrate to 1.
struct Kernel1D {
    KernelType type = KernelType::Epanechnikov;
    double bandwidth = 1.0;

    Kernel1D() = default;
    Kernel1D(KernelType t, double b);
};

double kernel_eval(const Kernel1D& k, double x);

/// Bandwidths for the pcf kernels (eps_*) and the per-coordinate local weighting (sigma_*).
struct BandwidthSet {
    double eps_space = 0.0;
    double eps_time = 0.0;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double sigma_t = 0.0;
    KernelType pcf_kernel = KernelType::Epanechnikov;
    KernelType weight_kernel = KernelType::Gaussian;

    void validate() const;
};

/// w(dx, dy, dt) = k_{sigma_x}(dx) * k_{sigma_y}(dy) * k_{sigma_t}(dt) with the
/// weighting kernel (Gaussian by default).
double product_weight(const BandwidthSet& b, double dx, double dy, double dt);

/// Normal-scale direct plug-in rule: 1.06 * min(sd, IQR/1.34) * m^(-1/5).
/// Requires at least 3 samples, not all identical.
double bandwidth_plugin(const std::vector<double>& samples);

/// Per-point variable bandwidths: sigma_j = max(eps_floor, distance from point j
/// to its n_p-th nearest other point, spatially).
std::vector<double> bandwidth_variable(const PointPattern& p, std::size_t n_p, double eps_floor);

/// Default bandwidth set for a pattern: pcf bandwidths from the plug-in rule on
/// pairwise spatial/temporal lags, weighting bandwidths from the plug-in rule on
/// each coordinate. Any strictly positive override in `partial` is kept.
BandwidthSet default_bandwidths(const PointPattern& p, const BandwidthSet& partial = {});

}  // namespace stlgcp

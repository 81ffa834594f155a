#pragma once

#include <cstdint>
#include <optional>

#include "stlgcp/contrast.hpp"
#include "stlgcp/geometry.hpp"
#include "stlgcp/grf.hpp"

namespace stlgcp {

/// Homogeneous Poisson pattern on a window: Poisson count, uniform locations.
PointPattern poisson_homogeneous(double rate, const SpaceTimeWindow& w, std::uint64_t seed);

/// Baseline first-order intensity, either constant or piecewise constant on a
/// simulation grid (n_spatial x nt values).
struct BaselineIntensity {
    double constant = 1.0;
    std::optional<Eigen::MatrixXd> field;  // overrides the constant when present

    double at(const SpaceTimeGrid& g, std::size_t spatial, std::size_t temporal) const;
};

struct SimulationConfig {
    SpaceTimeGrid grid;
    CovarianceModel model;                 // global covariance
    BaselineIntensity baseline;
    std::uint64_t seed = 1;
    // When set, the random field is the local patchwork built from these fits.
    const LocalFitResult* local = nullptr;
    const PointPattern* local_pattern = nullptr;
};

struct SimulatedPattern {
    PointPattern pattern;
    GRFRealization field;
    double lambda_max = 0.0;
    std::size_t n_dominating = 0;
    bool empty_intensity = false;  // true when the dominating rate was zero
};

/// Thin a dominating homogeneous process against the cellwise intensity
/// baseline * exp(field). Exposed so tests can inject a fixed field.
SimulatedPattern lgcp_thin(const GRFRealization& field, const BaselineIntensity& baseline,
                           std::uint64_t seed);

/// Draw the Gaussian field (global, or local patchwork when configured) and
/// thin a dominating Poisson process against exp(field) times the baseline.
SimulatedPattern lgcp_simulate(const SimulationConfig& cfg);
SimulatedPattern lgcp_simulate(const SimulationConfig& cfg, const GrfSampler& sampler);

}  // namespace stlgcp

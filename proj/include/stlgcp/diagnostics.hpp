#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stlgcp/contrast.hpp"
#include "stlgcp/geometry.hpp"
#include "stlgcp/lgcp.hpp"
#include "stlgcp/summary.hpp"

namespace stlgcp {

/// Standardized departure statistic over a lag grid:
///   T = sum over cells of (K_hat - E_K) / sqrt(V_K),
/// excluding cells whose variance is below 1e-12. `excluded` (when given)
/// reports how many cells were skipped.
double test_statistic(const Eigen::MatrixXd& k_hat, const Eigen::MatrixXd& mean,
                      const Eigen::MatrixXd& variance, std::size_t* excluded = nullptr);

struct DiagnosticResult {
    LagGrid grid;
    double t_observed = 0.0;
    std::vector<double> t_replicates;
    double p_value = 1.0;
    Eigen::MatrixXd k_observed;
    Eigen::MatrixXd mean_k;      // E_K over replicates
    Eigen::MatrixXd var_k;       // V_K over replicates
    Eigen::MatrixXd env_lower;   // pointwise min over replicates
    Eigen::MatrixXd env_upper;   // pointwise max over replicates
    double envelope_level = 0.0;  // 2 / (Q + 1)
    std::size_t cells_excluded = 0;
};

struct DiagnosticConfig {
    LagGrid grid;
    SpaceTimeGrid sim_grid;
    std::size_t replicates = 39;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    // Fitted model under test: global covariance, optionally the local fits.
    CovarianceModel model;
    const LocalFitResult* local = nullptr;
    // Constant baseline intensity for the generator (data rule: n / |W x T|).
    double baseline = 1.0;
};

/// Monte Carlo goodness-of-fit test: Q replicate patterns are simulated from
/// the fitted model, the inhomogeneous K-function of each is compared against
/// the replicate mean and variance, and the observed pattern's statistic is
/// ranked among the replicates. Intensities are re-estimated per pattern with
/// the constant rule, so the observation and replicates get equal treatment.
DiagnosticResult run_mc_test(const PointPattern& observed, const DiagnosticConfig& cfg);

void write_envelope_csv(const DiagnosticResult& d, const std::string& path);

}  // namespace stlgcp

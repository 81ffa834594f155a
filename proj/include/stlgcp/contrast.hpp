#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stlgcp/covariance.hpp"
#include "stlgcp/geometry.hpp"
#include "stlgcp/kernels.hpp"
#include "stlgcp/summary.hpp"

namespace stlgcp {

enum class ContrastTransform { Identity, Log };

/// Configuration of the discrepancy between an empirical pair correlation
/// surface and a model family's theoretical one.
struct ContrastSpec {
    LagGrid grid;
    std::string family = "sep_exp";  // "sep_exp" or "gneiting"
    ContrastTransform transform = ContrastTransform::Identity;
    double gamma_s = 1.0;  // fixed shape exponents for the non-separable family
    double gamma_t = 1.0;

    std::size_t n_free() const;  // optimized parameter count
};

/// Mean over grid cells of (nu[empirical] - nu[theoretical])^2 with unit
/// weighting; the minimum-contrast objective.
double contrast_value(const ContrastSpec& spec, const Eigen::MatrixXd& empirical,
                      const CovarianceModel& model);

CovarianceModel model_from_free(const ContrastSpec& spec, const Eigen::VectorXd& packed);
Eigen::VectorXd free_from_model(const ContrastSpec& spec, const CovarianceModel& model);

struct SimplexOptions {
    std::size_t max_evals = 2000;
    double diameter_tol = 1e-6;
    double spread_tol = 1e-10;
    double initial_step = 0.25;
};

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

/// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// Non-finite objective values are treated as +infinity.
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& start, const SimplexOptions& opts = {});

struct StartTrace {
    Eigen::VectorXd start;
    double value = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

struct GlobalFitResult {
    CovarianceModel model;
    double contrast = 0.0;
    bool converged = false;
    std::size_t evals = 0;
    std::vector<StartTrace> starts;
};

/// Default multi-start list in the free (unconstrained) parameterization,
/// derived from the empirical surface and the grid extents.
std::vector<Eigen::VectorXd> default_starts(const ContrastSpec& spec,
                                            const Eigen::MatrixXd& empirical);

/// Minimum-contrast fit of a covariance family to a given empirical surface.
GlobalFitResult fit_contrast_curve(const ContrastSpec& spec, const Eigen::MatrixXd& empirical,
                                   const std::vector<Eigen::VectorXd>& starts = {},
                                   const SimplexOptions& opts = {});

/// Global fit: estimates the pooled pcf from the pattern and minimizes the
/// contrast over the requested family.
GlobalFitResult fit_global(const PointPattern& p, const std::vector<double>& intensity,
                           const ContrastSpec& spec, const BandwidthSet& bw,
                           unsigned threads = 1, const SimplexOptions& opts = {});

struct LocalFitResult {
    std::vector<CovarianceModel> models;      // one per point
    std::vector<double> contrast;             // attained local minima
    std::vector<unsigned char> converged;
    GlobalFitResult global;                   // warm-start source
    BandwidthSet bandwidths;
};

/// Locally weighted fits: every point's weighted pcf average is refitted,
/// warm-started from the global estimate.
LocalFitResult fit_local(const PointPattern& p, const std::vector<double>& intensity,
                         const ContrastSpec& spec, const BandwidthSet& bw, unsigned threads = 1,
                         const SimplexOptions& opts = {});

void write_local_fit_csv(const LocalFitResult& f, const PointPattern& p,
                         const std::string& path);

}  // namespace stlgcp

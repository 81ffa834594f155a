#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stlgcp/geometry.hpp"
#include "stlgcp/kernels.hpp"

namespace stlgcp {

/// Berman-Turner quadrature scheme: data points followed by one dummy point at
/// the centre of every cube of an equal-volume partition of the window. The
/// weight of a quadrature point is (cube volume) / (number of quadrature points
/// sharing its cube), so the weights sum exactly to the window volume.
struct QuadratureScheme {
    std::vector<Point> points;        // data first, then dummies
    std::vector<double> weights;      // a_j
    std::vector<unsigned char> is_data;  // e_j: 1 for data, 0 for dummy
    Eigen::MatrixXd covariates;       // one row per point; may have zero columns
    std::vector<double> offset;       // known log-intensity component B_j
    std::size_t n_data = 0;
    SpaceTimeWindow window{{0, 1}, {0, 1}, {0, 1}};
    std::array<std::size_t, 3> cubes{0, 0, 0};  // partition counts (nx, ny, nt)

    std::size_t size() const { return points.size(); }
    double response(std::size_t j) const {
        return is_data[j] ? 1.0 / weights[j] : 0.0;
    }
};

/// Build a scheme on an explicit nx x ny x nt partition.
QuadratureScheme build_quadrature(const PointPattern& p, std::size_t nx, std::size_t ny,
                                  std::size_t nt);

/// Choose the partition automatically: at least `dummy_factor * n` dummy points,
/// refined until no cube holds more than `max_per_cube` data points (within a
/// total-cube budget).
QuadratureScheme build_quadrature_auto(const PointPattern& p, double dummy_factor = 4.0,
                                       std::size_t max_per_cube = 8);

/// Attach covariate columns to a scheme by nearest-sample lookup: each
/// quadrature point takes the covariate row of its closest sample location
/// (distances scaled by the window extents).
void attach_covariates(QuadratureScheme& q, const std::vector<Point>& samples,
                       const Eigen::MatrixXd& values);

/// Quadrature approximation to the log-likelihood of a Poisson process with
/// log lambda_j = theta . z_j + B_j:
///   sum_j w_j a_j (y_j log lambda_j - lambda_j) + sum_j w_j a_j,
/// where y_j = e_j / a_j and w_j are optional extra weights (default 1).
double poisson_loglik_approx(const QuadratureScheme& q, const Eigen::VectorXd& theta,
                             const std::vector<double>& extra_weights = {});

struct IntensityFit {
    Eigen::VectorXd theta;            // intercept first, then covariate coefficients
    double deviance = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> fitted;       // lambda_j at the quadrature points
    std::vector<double> deviance_trace;
};

/// Weighted Poisson regression with log link and offset, fitted by iteratively
/// reweighted least squares with step halving. The design matrix is an
/// intercept column followed by the scheme's covariates.
IntensityFit fit_poisson(const QuadratureScheme& q, const std::vector<double>& extra_weights = {},
                         std::size_t max_iterations = 50, double tol = 1e-8);

/// Fitted intensity at an arbitrary location, using the covariates of the
/// nearest quadrature point (exact for intercept-only models).
double intensity_at(const QuadratureScheme& q, const IntensityFit& fit, const Point& where);

struct LocalIntensityField {
    std::vector<Point> locations;
    Eigen::MatrixXd thetas;           // one row per location
    std::vector<double> lambda;       // fitted intensity at each location
    std::vector<unsigned char> ok;    // 0 where the local fit failed
    BandwidthSet bandwidths;
};

/// Evaluation grid of cell centres for local model fields.
std::vector<Point> evaluation_grid(const SpaceTimeWindow& w, std::size_t nx = 10,
                                   std::size_t ny = 10, std::size_t nt = 5);

/// Locally weighted Poisson fits: at every evaluation location the quadrature
/// weights are multiplied by the product kernel w_j(v, s), and the global model
/// is refitted. Failures are flagged rather than fatal.
LocalIntensityField fit_local_intensity(const QuadratureScheme& q, const BandwidthSet& bw,
                                        const std::vector<Point>& locations,
                                        unsigned threads = 1);

/// Per-point intensity under the constant (stationary) rule: n / |W x T|.
std::vector<double> constant_intensity(const PointPattern& p);

void write_local_intensity_csv(const LocalIntensityField& f, const std::string& path);

}  // namespace stlgcp

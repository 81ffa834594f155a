#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "stlgcp/contrast.hpp"
#include "stlgcp/covariance.hpp"
#include "stlgcp/geometry.hpp"

namespace stlgcp {

/// Regular grid of cell centres tiling a space-time window. Spatial cells are
/// indexed a = iy * nx + ix, so a grid value array is (nx*ny) x nt with rows
/// over space and columns over time.
struct SpaceTimeGrid {
    SpaceTimeWindow window{{0, 1}, {0, 1}, {0, 1}};
    std::size_t nx = 0, ny = 0, nt = 0;

    SpaceTimeGrid() = default;
    SpaceTimeGrid(const SpaceTimeWindow& w, std::size_t nx_, std::size_t ny_, std::size_t nt_);

    std::size_t n_spatial() const { return nx * ny; }
    std::size_t n_cells() const { return nx * ny * nt; }
    double dx() const { return window.x_range.length() / static_cast<double>(nx); }
    double dy() const { return window.y_range.length() / static_cast<double>(ny); }
    double dt() const { return window.t_range.length() / static_cast<double>(nt); }
    double cell_volume() const { return dx() * dy() * dt(); }

    double x_center(std::size_t ix) const;
    double y_center(std::size_t iy) const;
    double t_center(std::size_t it) const;
    Point cell_center(std::size_t ix, std::size_t iy, std::size_t it) const;

    std::size_t spatial_index_of(double x, double y) const;  // containing cell, clamped
    std::size_t temporal_index_of(double t) const;
};

struct GRFRealization {
    SpaceTimeGrid grid;
    Eigen::MatrixXd values;  // n_spatial x nt
    std::uint64_t seed = 0;

    double value_at(double x, double y, double t) const;
};

/// Dense model covariance between all grid cells, ordered cell = a * nt + c
/// (spatial index outer, temporal inner). Intended for small grids and tests.
Eigen::MatrixXd model_covariance(const CovarianceModel& m, const SpaceTimeGrid& grid);

/// Gaussian random field sampler with cached factorizations: the separable
/// family uses a Kronecker square root (spatial times temporal Cholesky), the
/// non-separable one a dense Cholesky over all cells, capped at 4096 cells.
/// The field mean is -sigma2/2 so the log-Gaussian intensity has unit mean.
class GrfSampler {
public:
    /// force_dense routes a separable model through the dense path; the two
    /// factorizations agree, so draws from the same seed coincide.
    GrfSampler(const CovarianceModel& m, const SpaceTimeGrid& grid, bool force_dense = false);
    GRFRealization draw(std::uint64_t seed) const;
    const SpaceTimeGrid& grid() const { return grid_; }
    const CovarianceModel& model() const { return model_; }

private:
    CovarianceModel model_;
    SpaceTimeGrid grid_;
    Eigen::MatrixXd chol_space_;  // separable path
    Eigen::MatrixXd chol_time_;
    Eigen::MatrixXd chol_full_;   // dense path
    bool separable_ = true;
};

GRFRealization grf_simulate(const CovarianceModel& m, const SpaceTimeGrid& grid,
                            std::uint64_t seed);

/// Patchwork field for locally fitted models: a global draw everywhere, but in
/// every cell containing data points the value is replaced by the average of
/// independent single-cell draws N(-sigma2_i/2, sigma2_i), one per point in the
/// cell. An empty pattern reproduces the global draw exactly.
GRFRealization grf_local(const CovarianceModel& global_model, const LocalFitResult& local,
                         const PointPattern& p, const SpaceTimeGrid& grid, std::uint64_t seed);
GRFRealization grf_local(const GrfSampler& global_sampler, const LocalFitResult& local,
                         const PointPattern& p, std::uint64_t seed);

void write_field_csv(const GRFRealization& field, const std::string& path);

}  // namespace stlgcp

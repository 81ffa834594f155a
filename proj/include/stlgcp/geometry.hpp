#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace stlgcp {

/// Closed interval [lo, hi] with strictly positive length.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Rectangular space-time observation region W x T.
struct SpaceTimeWindow {
    Interval x_range;
    Interval y_range;
    Interval t_range;

    SpaceTimeWindow() = default;
    SpaceTimeWindow(Interval x, Interval y, Interval t);

    double spatial_area() const { return x_range.length() * y_range.length(); }
    double temporal_length() const { return t_range.length(); }
    /// Length of the spatial diagonal, the largest observable spatial distance.
    double spatial_diameter() const;
    bool contains(double x, double y, double t) const;
};

/// |W x T| = |W| * |T|.
double window_volume(const SpaceTimeWindow& w);

struct Point {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

/// Finite set of distinct events inside a window. Immutable after construction.
class PointPattern {
  public:
    PointPattern(std::vector<Point> points, SpaceTimeWindow window);

    std::size_t size() const { return points_.size(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Point>& points() const { return points_; }
    const SpaceTimeWindow& window() const { return window_; }

  private:
    std::vector<Point> points_;
    SpaceTimeWindow window_;
};

/// Cylinder b((u,t), r, h): spatial disk of radius r times time slab of half-height h.
struct CylindricalNeighborhood {
    Point center;
    double radius = 0.0;
    double half_height = 0.0;

    CylindricalNeighborhood(Point c, double r, double h);
    bool contains(const Point& p) const;
};

double spatial_distance(const Point& a, const Point& b);
double temporal_lag(const Point& a, const Point& b);

/// Symmetric n x n matrices of spatial distances and absolute time lags, row-major flat storage.
struct DistanceMatrices {
    std::size_t n = 0;
    std::vector<double> spatial;   // n*n
    std::vector<double> temporal;  // n*n

    double spatial_at(std::size_t i, std::size_t j) const { return spatial[i * n + j]; }
    double temporal_at(std::size_t i, std::size_t j) const { return temporal[i * n + j]; }
};

DistanceMatrices pairwise_distances(const PointPattern& p);

/// Translation edge-correction weight for the pair (i, j):
///   omega = [|W| / overlap(W, W shifted by u_i - u_j)] * [|T| / overlap(T, T shifted by t_i - t_j)].
/// Equals 1 for zero displacement and grows as the pair approaches the window extent.
/// Throws if the displaced windows no longer overlap.
double translation_correction(const PointPattern& p, std::size_t i, std::size_t j);

/// Same weight from raw displacements, usable without materializing index pairs.
double translation_correction(const SpaceTimeWindow& w, double dx, double dy, double dt);

/// Distance from point i to its k-th nearest other point. With spatial_only the
/// metric is the planar Euclidean distance; otherwise a normalized cylindrical
/// metric max(d_s / spatial diameter, |dt| / |T|) is used.
double kth_nearest_distance(const PointPattern& p, std::size_t i, std::size_t k,
                            bool spatial_only = true);

}  // namespace stlgcp

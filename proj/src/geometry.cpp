#include "stlgcp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stlgcp {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

SpaceTimeWindow::SpaceTimeWindow(Interval x, Interval y, Interval t)
    : x_range(x), y_range(y), t_range(t) {
    require(x_range.length() > 0.0, "window: x interval must have positive length");
    require(y_range.length() > 0.0, "window: y interval must have positive length");
    require(t_range.length() > 0.0, "window: t interval must have positive length");
}

double SpaceTimeWindow::spatial_diameter() const {
    return std::hypot(x_range.length(), y_range.length());
}

bool SpaceTimeWindow::contains(double x, double y, double t) const {
    return x_range.contains(x) && y_range.contains(y) && t_range.contains(t);
}

double window_volume(const SpaceTimeWindow& w) {
    return w.spatial_area() * w.temporal_length();
}

PointPattern::PointPattern(std::vector<Point> points, SpaceTimeWindow window)
    : points_(std::move(points)), window_(window) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Point& p = points_[i];
        require(std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.t),
                "pattern: non-finite coordinate at index " + std::to_string(i));
        require(window_.contains(p.x, p.y, p.t),
                "pattern: point " + std::to_string(i) + " lies outside the window");
    }
    // Duplicate check on lexicographically sorted indices.
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Point& pa = points_[a];
        const Point& pb = points_[b];
        if (pa.x != pb.x) return pa.x < pb.x;
        if (pa.y != pb.y) return pa.y < pb.y;
        return pa.t < pb.t;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const Point& a = points_[order[k - 1]];
        const Point& b = points_[order[k]];
        require(a.x != b.x || a.y != b.y || a.t != b.t,
                "pattern: duplicate point at indices " + std::to_string(order[k - 1]) + " and " +
                    std::to_string(order[k]));
    }
}

CylindricalNeighborhood::CylindricalNeighborhood(Point c, double r, double h)
    : center(c), radius(r), half_height(h) {
    require(r >= 0.0 && h >= 0.0, "cylinder: radius and half-height must be >= 0");
}

bool CylindricalNeighborhood::contains(const Point& p) const {
    return spatial_distance(center, p) <= radius && temporal_lag(center, p) <= half_height;
}

double spatial_distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double temporal_lag(const Point& a, const Point& b) {
    return std::abs(a.t - b.t);
}

DistanceMatrices pairwise_distances(const PointPattern& p) {
    const std::size_t n = p.size();
    DistanceMatrices out;
    out.n = n;
    out.spatial.assign(n * n, 0.0);
    out.temporal.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double ds = spatial_distance(p[i], p[j]);
            const double dt = temporal_lag(p[i], p[j]);
            out.spatial[i * n + j] = ds;
            out.spatial[j * n + i] = ds;
            out.temporal[i * n + j] = dt;
            out.temporal[j * n + i] = dt;
        }
    }
    return out;
}

double translation_correction(const SpaceTimeWindow& w, double dx, double dy, double dt) {
    const double ox = w.x_range.length() - std::abs(dx);
    const double oy = w.y_range.length() - std::abs(dy);
    const double ot = w.t_range.length() - std::abs(dt);
    if (ox <= 0.0 || oy <= 0.0 || ot <= 0.0)
        throw std::invalid_argument("translation correction: displacement exceeds window extent");
    const double spatial_factor = w.spatial_area() / (ox * oy);
    const double temporal_factor = w.temporal_length() / ot;
    return spatial_factor * temporal_factor;
}

double translation_correction(const PointPattern& p, std::size_t i, std::size_t j) {
    if (i == j) throw std::invalid_argument("translation correction: i == j");
    const Point& a = p[i];
    const Point& b = p[j];
    return translation_correction(p.window(), a.x - b.x, a.y - b.y, a.t - b.t);
}

double kth_nearest_distance(const PointPattern& p, std::size_t i, std::size_t k,
                            bool spatial_only) {
    const std::size_t n = p.size();
    if (k == 0) throw std::invalid_argument("kth_nearest_distance: k must be >= 1");
    if (k > n - 1 || n == 0)
        throw std::invalid_argument("kth_nearest_distance: insufficient neighbors");
    std::vector<double> d;
    d.reserve(n - 1);
    const double diam = p.window().spatial_diameter();
    const double tlen = p.window().temporal_length();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (spatial_only) {
            d.push_back(spatial_distance(p[i], p[j]));
        } else {
            d.push_back(std::max(spatial_distance(p[i], p[j]) / diam,
                                 temporal_lag(p[i], p[j]) / tlen));
        }
    }
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return d[k - 1];
}

}  // namespace stlgcp

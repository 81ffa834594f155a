#include "stlgcp/lgcp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stlgcp/rng.hpp"

namespace stlgcp {

namespace {

constexpr std::uint64_t kFieldStream = 0;
constexpr std::uint64_t kThinStream = 1;

// Exactly coincident points are nudged apart by one ulp in time so patterns
// remain simple; collisions only arise from degenerate accept streams.
std::vector<Point> perturb_duplicates(std::vector<Point> pts, const SpaceTimeWindow& w) {
    for (int pass = 0; pass < 64; ++pass) {
        std::vector<std::size_t> idx(pts.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& pa = pts[a];
            const auto& pb = pts[b];
            if (pa.x != pb.x) return pa.x < pb.x;
            if (pa.y != pb.y) return pa.y < pb.y;
            return pa.t < pb.t;
        });
        bool changed = false;
        for (std::size_t k = 1; k < idx.size(); ++k) {
            Point& prev = pts[idx[k - 1]];
            Point& cur = pts[idx[k]];
            if (cur.x == prev.x && cur.y == prev.y && cur.t == prev.t) {
                const double up = std::nextafter(cur.t, w.t_range.hi);
                cur.t = (up > cur.t && up <= w.t_range.hi)
                            ? up
                            : std::nextafter(cur.t, w.t_range.lo);
                changed = true;
            }
        }
        if (!changed) return pts;
    }
    throw std::runtime_error("could not separate coincident points");
}

}  // namespace

PointPattern poisson_homogeneous(double rate, const SpaceTimeWindow& w, std::uint64_t seed) {
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("rate must be finite and non-negative");
    Rng rng(seed);
    const std::uint64_t n = rng.poisson(rate * window_volume(w));
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double x = rng.uniform(w.x_range.lo, w.x_range.hi);
        const double y = rng.uniform(w.y_range.lo, w.y_range.hi);
        const double t = rng.uniform(w.t_range.lo, w.t_range.hi);
        pts.push_back({x, y, t});
    }
    return PointPattern(perturb_duplicates(std::move(pts), w), w);
}

double BaselineIntensity::at(const SpaceTimeGrid& g, std::size_t spatial,
                             std::size_t temporal) const {
    if (!field) return constant;
    if (field->rows() != static_cast<std::ptrdiff_t>(g.n_spatial()) ||
        field->cols() != static_cast<std::ptrdiff_t>(g.nt))
        throw std::invalid_argument("baseline field does not match the simulation grid");
    return (*field)(static_cast<std::ptrdiff_t>(spatial), static_cast<std::ptrdiff_t>(temporal));
}

SimulatedPattern lgcp_thin(const GRFRealization& field, const BaselineIntensity& baseline,
                           std::uint64_t seed) {
    const SpaceTimeGrid& g = field.grid;
    Eigen::MatrixXd lambda0(field.values.rows(), field.values.cols());
    double lambda_max = 0.0;
    for (std::size_t a = 0; a < g.n_spatial(); ++a)
        for (std::size_t c = 0; c < g.nt; ++c) {
            const double base = baseline.at(g, a, c);
            if (!(base >= 0.0) || !std::isfinite(base))
                throw std::invalid_argument("baseline intensity must be finite and non-negative");
            const double v = base * std::exp(field.values(static_cast<std::ptrdiff_t>(a),
                                                          static_cast<std::ptrdiff_t>(c)));
            if (!std::isfinite(v)) throw std::runtime_error("non-finite simulated intensity");
            lambda0(static_cast<std::ptrdiff_t>(a), static_cast<std::ptrdiff_t>(c)) = v;
            lambda_max = std::max(lambda_max, v);
        }

    if (!(lambda_max > 0.0))
        return SimulatedPattern{PointPattern(std::vector<Point>{}, g.window), field, lambda_max,
                                0, true};

    Rng rng(seed);
    const std::uint64_t n_dom = rng.poisson(lambda_max * window_volume(g.window));
    std::vector<Point> kept;
    for (std::uint64_t k = 0; k < n_dom; ++k) {
        const double x = rng.uniform(g.window.x_range.lo, g.window.x_range.hi);
        const double y = rng.uniform(g.window.y_range.lo, g.window.y_range.hi);
        const double t = rng.uniform(g.window.t_range.lo, g.window.t_range.hi);
        const double u = rng.uniform01();
        const double accept = lambda0(static_cast<std::ptrdiff_t>(g.spatial_index_of(x, y)),
                                      static_cast<std::ptrdiff_t>(g.temporal_index_of(t))) /
                              lambda_max;
        if (u <= accept) kept.push_back({x, y, t});
    }
    return SimulatedPattern{PointPattern(perturb_duplicates(std::move(kept), g.window), g.window),
                            field, lambda_max, n_dom, false};
}

SimulatedPattern lgcp_simulate(const SimulationConfig& cfg, const GrfSampler& sampler) {
    const std::uint64_t field_seed = derive_seed(cfg.seed, kFieldStream);
    GRFRealization field;
    if (cfg.local != nullptr) {
        if (cfg.local_pattern == nullptr)
            throw std::invalid_argument("local simulation needs the fitted pattern");
        field = grf_local(sampler, *cfg.local, *cfg.local_pattern, field_seed);
    } else {
        field = sampler.draw(field_seed);
    }
    return lgcp_thin(field, cfg.baseline, derive_seed(cfg.seed, kThinStream));
}

SimulatedPattern lgcp_simulate(const SimulationConfig& cfg) {
    return lgcp_simulate(cfg, GrfSampler(cfg.model, cfg.grid));
}

}  // namespace stlgcp

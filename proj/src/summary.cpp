#include "stlgcp/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "stlgcp/parallel.hpp"

namespace stlgcp {

namespace {

void check_even_spacing(const std::vector<double>& v, const char* label) {
    if (v.empty()) throw std::invalid_argument(std::string(label) + " grid is empty");
    if (v.front() <= 0.0)
        throw std::invalid_argument(std::string(label) + " grid must be strictly positive");
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] <= v[k - 1])
            throw std::invalid_argument(std::string(label) + " grid must be strictly increasing");
    if (v.size() > 1) {
        const double step = v[1] - v[0];
        for (std::size_t k = 1; k < v.size(); ++k) {
            const double d = v[k] - v[k - 1];
            if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
                throw std::invalid_argument(std::string(label) + " grid must be evenly spaced");
        }
    }
}

std::vector<double> even_lags(double max_value, std::size_t count) {
    if (count == 0) throw std::invalid_argument("lag grid needs at least one value");
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k)
        v[k] = max_value * static_cast<double>(k + 1) / static_cast<double>(count);
    return v;
}

void check_intensity(const PointPattern& p, const std::vector<double>& intensity) {
    if (intensity.size() != p.size())
        throw std::invalid_argument("intensity vector length does not match pattern size");
    for (double v : intensity)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("intensity values must be strictly positive and finite");
}

// Index range of grid cells whose kernel argument |x - v[a]| can be nonzero for
// a compact kernel with support halfwidth s. Widened by one cell on each side so
// boundary rounding can never drop a contributing cell.
std::pair<std::ptrdiff_t, std::ptrdiff_t> cell_range(const std::vector<double>& v, double step,
                                                     double x, double s) {
    if (v.size() == 1) return {0, 0};
    const auto lo = static_cast<std::ptrdiff_t>(std::floor((x - s - v.front()) / step)) - 1;
    const auto hi = static_cast<std::ptrdiff_t>(std::ceil((x + s - v.front()) / step)) + 1;
    const auto last = static_cast<std::ptrdiff_t>(v.size()) - 1;
    return {std::clamp<std::ptrdiff_t>(lo, 0, last), std::clamp<std::ptrdiff_t>(hi, 0, last)};
}

}  // namespace

LagGrid::LagGrid(std::vector<double> r, std::vector<double> h)
    : r_values(std::move(r)), h_values(std::move(h)) {
    check_even_spacing(r_values, "spatial lag");
    check_even_spacing(h_values, "temporal lag");
}

LagGrid LagGrid::make_default(const SpaceTimeWindow& w, std::size_t nr, std::size_t nh,
                              double fraction_r, double fraction_h) {
    const double r_max = w.spatial_diameter() * fraction_r;
    const double h_max = w.temporal_length() * fraction_h;
    return LagGrid(even_lags(r_max, nr), even_lags(h_max, nh));
}

double LagGrid::r_step() const {
    return r_values.size() > 1 ? r_values[1] - r_values[0] : r_values[0];
}

double LagGrid::h_step() const {
    return h_values.size() > 1 ? h_values[1] - h_values[0] : h_values[0];
}

bool LagGrid::same_as(const LagGrid& other) const {
    return r_values == other.r_values && h_values == other.h_values;
}

const Eigen::MatrixXd& SummaryStatistic::single() const {
    if (layers.size() != 1)
        throw std::logic_error("summary statistic does not have exactly one layer");
    return layers.front();
}

SummaryStatistic pcf_local_all(const PointPattern& p, const std::vector<double>& intensity,
                               const BandwidthSet& bw, const LagGrid& grid, unsigned threads) {
    check_intensity(p, intensity);
    bw.validate();
    const std::size_t n = p.size();
    if (n < 2) throw std::invalid_argument("local pcf needs at least two points (n < 2)");

    const auto nr = static_cast<std::ptrdiff_t>(grid.nr());
    const auto nh = static_cast<std::ptrdiff_t>(grid.nh());
    const double volume = window_volume(p.window());
    const Kernel1D ks{bw.pcf_kernel, bw.eps_space};
    const Kernel1D kt{bw.pcf_kernel, bw.eps_time};
    const bool compact = bw.pcf_kernel != KernelType::Gaussian;
    // Gaussian kernels have unbounded support; sweep every cell in that case.
    const double s_half = compact ? bw.eps_space : std::numeric_limits<double>::infinity();
    const double t_half = compact ? bw.eps_time : std::numeric_limits<double>::infinity();

    SummaryStatistic out{grid, StatKind::LocalPcfStack, {}};
    out.layers.assign(n, Eigen::MatrixXd::Zero(nr, nh));

    const auto& pts = p.points();
    const auto& w = p.window();
    parallel_for(n, threads, [&](std::size_t i) {
        Eigen::MatrixXd& layer = out.layers[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = pts[i].x - pts[j].x;
            const double dy = pts[i].y - pts[j].y;
            const double dt = pts[i].t - pts[j].t;
            const double d = std::hypot(dx, dy);
            const double tau = std::abs(dt);
            const double base =
                translation_correction(w, dx, dy, dt) / (intensity[i] * intensity[j]);

            const auto [a0, a1] = compact
                                      ? cell_range(grid.r_values, grid.r_step(), d, s_half)
                                      : std::pair<std::ptrdiff_t, std::ptrdiff_t>{0, nr - 1};
            const auto [b0, b1] = compact
                                      ? cell_range(grid.h_values, grid.h_step(), tau, t_half)
                                      : std::pair<std::ptrdiff_t, std::ptrdiff_t>{0, nh - 1};
            for (std::ptrdiff_t a = a0; a <= a1; ++a) {
                const double kr = kernel_eval(ks, d - grid.r_values[a]);
                if (kr == 0.0) continue;
                for (std::ptrdiff_t b = b0; b <= b1; ++b) {
                    const double kh = kernel_eval(kt, tau - grid.h_values[b]);
                    if (kh == 0.0) continue;
                    layer(a, b) += kr * kh * base;
                }
            }
        }
        const double n_over = static_cast<double>(n) / (4.0 * std::numbers::pi * volume);
        for (std::ptrdiff_t a = 0; a < nr; ++a) layer.row(a) *= n_over / grid.r_values[a];
    });
    return out;
}

SummaryStatistic pcf_global_from_stack(const SummaryStatistic& stack) {
    if (stack.kind != StatKind::LocalPcfStack || stack.layers.empty())
        throw std::invalid_argument("expected a non-empty local pcf stack");
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(stack.layers.front().rows(),
                                                 stack.layers.front().cols());
    for (const auto& layer : stack.layers) mean += layer;
    mean /= static_cast<double>(stack.layers.size());
    return SummaryStatistic{stack.grid, StatKind::GlobalPcf, {std::move(mean)}};
}

SummaryStatistic pcf_global(const PointPattern& p, const std::vector<double>& intensity,
                            const BandwidthSet& bw, const LagGrid& grid, unsigned threads) {
    return pcf_global_from_stack(pcf_local_all(p, intensity, bw, grid, threads));
}

SummaryStatistic lista_weighted_average(const SummaryStatistic& stack, const PointPattern& p,
                                        const BandwidthSet& bw, std::size_t target) {
    if (stack.kind != StatKind::LocalPcfStack)
        throw std::invalid_argument("expected a local pcf stack");
    if (stack.layers.size() != p.size())
        throw std::invalid_argument("stack layer count does not match pattern size");
    if (target >= p.size()) throw std::out_of_range("target point index out of range");
    bw.validate();

    const auto& pts = p.points();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(stack.layers.front().rows(),
                                                stack.layers.front().cols());
    double mass = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double w = product_weight(bw, pts[target].x - pts[j].x, pts[target].y - pts[j].y,
                                        pts[target].t - pts[j].t);
        acc += w * stack.layers[j];
        mass += w;
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        // All neighbours carry numerically zero weight; keep the target's own curve.
        return SummaryStatistic{stack.grid, StatKind::WeightedAvgPcf, {stack.layers[target]}};
    }
    acc /= mass;
    return SummaryStatistic{stack.grid, StatKind::WeightedAvgPcf, {std::move(acc)}};
}

SummaryStatistic k_inhom(const PointPattern& p, const std::vector<double>& intensity,
                         const LagGrid& grid) {
    check_intensity(p, intensity);
    const std::size_t n = p.size();
    if (n < 2) throw std::invalid_argument("K-function needs at least two points (n < 2)");

    const auto nr = static_cast<std::ptrdiff_t>(grid.nr());
    const auto nh = static_cast<std::ptrdiff_t>(grid.nh());
    // Bin each pair into the smallest (r, h) cell containing it, then take the
    // 2-d cumulative sum; identical to testing every indicator per cell.
    Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(nr, nh);
    const auto& pts = p.points();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = spatial_distance(pts[i], pts[j]);
            const double tau = temporal_lag(pts[i], pts[j]);
            const auto a = std::lower_bound(grid.r_values.begin(), grid.r_values.end(), d) -
                           grid.r_values.begin();
            const auto b = std::lower_bound(grid.h_values.begin(), grid.h_values.end(), tau) -
                           grid.h_values.begin();
            if (a >= nr || b >= nh) continue;
            hist(a, b) += 1.0 / (intensity[i] * intensity[j]);
        }
    }
    for (std::ptrdiff_t a = 0; a < nr; ++a)
        for (std::ptrdiff_t b = 1; b < nh; ++b) hist(a, b) += hist(a, b - 1);
    for (std::ptrdiff_t a = 1; a < nr; ++a) hist.row(a) += hist.row(a - 1);

    const double scale =
        window_volume(p.window()) / (static_cast<double>(n) * static_cast<double>(n - 1));
    hist *= scale;
    return SummaryStatistic{grid, StatKind::KInhom, {std::move(hist)}};
}

void write_summary_csv(const SummaryStatistic& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    const bool stacked = s.kind == StatKind::LocalPcfStack;
    out << (stacked ? "point_id,r,h,value\n" : "r,h,value\n");
    for (std::size_t k = 0; k < s.layers.size(); ++k) {
        const auto& layer = s.layers[k];
        for (std::size_t a = 0; a < s.grid.nr(); ++a)
            for (std::size_t b = 0; b < s.grid.nh(); ++b) {
                if (stacked) out << k << ',';
                out << s.grid.r_values[a] << ',' << s.grid.h_values[b] << ','
                    << layer(static_cast<std::ptrdiff_t>(a), static_cast<std::ptrdiff_t>(b))
                    << '\n';
            }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stlgcp

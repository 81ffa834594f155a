#include "stlgcp/grf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "stlgcp/rng.hpp"

namespace stlgcp {

namespace {

constexpr std::size_t kDenseCellCap = 4096;
constexpr std::uint64_t kLocalDrawSalt = 0x6c6f63616cULL;

// Cholesky with escalating diagonal jitter; `scale` sets the jitter units.
Eigen::MatrixXd chol_with_jitter(Eigen::MatrixXd m, double scale) {
    for (double jitter : {0.0, 1e-10, 1e-8, 1e-6}) {
        Eigen::MatrixXd trial = m;
        if (jitter > 0.0) trial.diagonal().array() += jitter * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(trial);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw std::runtime_error("covariance factorization failed even with jitter");
}

}  // namespace

SpaceTimeGrid::SpaceTimeGrid(const SpaceTimeWindow& w, std::size_t nx_, std::size_t ny_,
                             std::size_t nt_)
    : window(w), nx(nx_), ny(ny_), nt(nt_) {
    if (nx == 0 || ny == 0 || nt == 0)
        throw std::invalid_argument("grid cell counts must be positive");
}

double SpaceTimeGrid::x_center(std::size_t ix) const {
    return window.x_range.lo + (static_cast<double>(ix) + 0.5) * dx();
}
double SpaceTimeGrid::y_center(std::size_t iy) const {
    return window.y_range.lo + (static_cast<double>(iy) + 0.5) * dy();
}
double SpaceTimeGrid::t_center(std::size_t it) const {
    return window.t_range.lo + (static_cast<double>(it) + 0.5) * dt();
}
Point SpaceTimeGrid::cell_center(std::size_t ix, std::size_t iy, std::size_t it) const {
    return {x_center(ix), y_center(iy), t_center(it)};
}

std::size_t SpaceTimeGrid::spatial_index_of(double x, double y) const {
    auto clampi = [](double v, std::size_t n) {
        const auto k = static_cast<std::ptrdiff_t>(std::floor(v));
        return static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n) - 1));
    };
    const std::size_t ix = clampi((x - window.x_range.lo) / dx(), nx);
    const std::size_t iy = clampi((y - window.y_range.lo) / dy(), ny);
    return iy * nx + ix;
}

std::size_t SpaceTimeGrid::temporal_index_of(double t) const {
    const auto k = static_cast<std::ptrdiff_t>(std::floor((t - window.t_range.lo) / dt()));
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(nt) - 1));
}

double GRFRealization::value_at(double x, double y, double t) const {
    return values(static_cast<std::ptrdiff_t>(grid.spatial_index_of(x, y)),
                  static_cast<std::ptrdiff_t>(grid.temporal_index_of(t)));
}

Eigen::MatrixXd model_covariance(const CovarianceModel& m, const SpaceTimeGrid& grid) {
    const std::size_t ns = grid.n_spatial();
    const std::size_t n = grid.n_cells();
    std::vector<double> xs(ns), ys(ns);
    for (std::size_t iy = 0; iy < grid.ny; ++iy)
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
            xs[iy * grid.nx + ix] = grid.x_center(ix);
            ys[iy * grid.nx + ix] = grid.y_center(iy);
        }
    Eigen::MatrixXd cov(n, n);
    for (std::size_t a = 0; a < ns; ++a)
        for (std::size_t c = 0; c < grid.nt; ++c) {
            const auto row = static_cast<std::ptrdiff_t>(a * grid.nt + c);
            for (std::size_t b = 0; b < ns; ++b)
                for (std::size_t d = 0; d < grid.nt; ++d) {
                    const auto col = static_cast<std::ptrdiff_t>(b * grid.nt + d);
                    if (col < row) continue;
                    const double r = std::hypot(xs[a] - xs[b], ys[a] - ys[b]);
                    const double h = std::abs(grid.t_center(c) - grid.t_center(d));
                    const double v = cov_eval(m, r, h);
                    cov(row, col) = v;
                    cov(col, row) = v;
                }
        }
    return cov;
}

GrfSampler::GrfSampler(const CovarianceModel& m, const SpaceTimeGrid& grid, bool force_dense)
    : model_(m), grid_(grid), separable_(m.is_separable() && !force_dense) {
    if (separable_) {
        const auto& p = m.separable();
        const std::size_t ns = grid_.n_spatial();
        Eigen::MatrixXd S(ns, ns), T(grid_.nt, grid_.nt);
        for (std::size_t ia = 0; ia < ns; ++ia) {
            const double xa = grid_.x_center(ia % grid_.nx);
            const double ya = grid_.y_center(ia / grid_.nx);
            for (std::size_t ib = ia; ib < ns; ++ib) {
                const double xb = grid_.x_center(ib % grid_.nx);
                const double yb = grid_.y_center(ib / grid_.nx);
                const double v = std::exp(-std::hypot(xa - xb, ya - yb) / p.alpha);
                S(static_cast<std::ptrdiff_t>(ia), static_cast<std::ptrdiff_t>(ib)) = v;
                S(static_cast<std::ptrdiff_t>(ib), static_cast<std::ptrdiff_t>(ia)) = v;
            }
        }
        for (std::size_t c = 0; c < grid_.nt; ++c)
            for (std::size_t d = 0; d < grid_.nt; ++d)
                T(static_cast<std::ptrdiff_t>(c), static_cast<std::ptrdiff_t>(d)) =
                    std::exp(-std::abs(grid_.t_center(c) - grid_.t_center(d)) / p.beta);
        chol_space_ = chol_with_jitter(std::move(S), 1.0);
        chol_time_ = chol_with_jitter(std::move(T), 1.0);
    } else {
        if (grid_.n_cells() > kDenseCellCap)
            throw std::invalid_argument(
                "dense simulation is capped at 4096 grid cells; choose a coarser grid");
        chol_full_ = chol_with_jitter(model_covariance(m, grid_), m.sigma2());
    }
}

GRFRealization GrfSampler::draw(std::uint64_t seed) const {
    const std::size_t ns = grid_.n_spatial();
    const double sigma2 = model_.sigma2();
    const double mean = -0.5 * sigma2;
    Rng rng(seed);
    GRFRealization out;
    out.grid = grid_;
    out.seed = seed;
    if (separable_) {
        Eigen::MatrixXd g(ns, grid_.nt);
        for (std::size_t a = 0; a < ns; ++a)
            for (std::size_t c = 0; c < grid_.nt; ++c)
                g(static_cast<std::ptrdiff_t>(a), static_cast<std::ptrdiff_t>(c)) = rng.normal();
        out.values = mean + (std::sqrt(sigma2) *
                             (chol_space_ * g * chol_time_.transpose()).array());
    } else {
        Eigen::VectorXd z(static_cast<std::ptrdiff_t>(grid_.n_cells()));
        for (std::ptrdiff_t k = 0; k < z.size(); ++k) z[k] = rng.normal();
        const Eigen::VectorXd field = chol_full_ * z;
        out.values.resize(static_cast<std::ptrdiff_t>(ns),
                          static_cast<std::ptrdiff_t>(grid_.nt));
        for (std::size_t a = 0; a < ns; ++a)
            for (std::size_t c = 0; c < grid_.nt; ++c)
                out.values(static_cast<std::ptrdiff_t>(a), static_cast<std::ptrdiff_t>(c)) =
                    mean + field[static_cast<std::ptrdiff_t>(a * grid_.nt + c)];
    }
    return out;
}

GRFRealization grf_simulate(const CovarianceModel& m, const SpaceTimeGrid& grid,
                            std::uint64_t seed) {
    return GrfSampler(m, grid).draw(seed);
}

GRFRealization grf_local(const GrfSampler& global_sampler, const LocalFitResult& local,
                         const PointPattern& p, std::uint64_t seed) {
    if (local.models.size() != p.size())
        throw std::invalid_argument("local fit size does not match pattern");
    GRFRealization out = global_sampler.draw(seed);
    if (p.size() == 0) return out;

    const SpaceTimeGrid& grid = out.grid;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(out.values.rows(), out.values.cols());
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(out.values.rows(), out.values.cols());
    Rng rng(derive_seed(seed, kLocalDrawSalt));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& pt = p.points()[i];
        const double s2 = local.models[i].sigma2();
        const double draw = -0.5 * s2 + std::sqrt(s2) * rng.normal();
        const auto a = static_cast<std::ptrdiff_t>(grid.spatial_index_of(pt.x, pt.y));
        const auto c = static_cast<std::ptrdiff_t>(grid.temporal_index_of(pt.t));
        sums(a, c) += draw;
        counts(a, c) += 1.0;
    }
    for (std::ptrdiff_t a = 0; a < out.values.rows(); ++a)
        for (std::ptrdiff_t c = 0; c < out.values.cols(); ++c)
            if (counts(a, c) > 0.0) out.values(a, c) = sums(a, c) / counts(a, c);
    return out;
}

GRFRealization grf_local(const CovarianceModel& global_model, const LocalFitResult& local,
                         const PointPattern& p, const SpaceTimeGrid& grid, std::uint64_t seed) {
    return grf_local(GrfSampler(global_model, grid), local, p, seed);
}

void write_field_csv(const GRFRealization& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "ix,iy,it,x,y,t,value\n";
    const auto& g = field.grid;
    for (std::size_t it = 0; it < g.nt; ++it)
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix)
                out << ix << ',' << iy << ',' << it << ',' << g.x_center(ix) << ','
                    << g.y_center(iy) << ',' << g.t_center(it) << ','
                    << field.values(static_cast<std::ptrdiff_t>(iy * g.nx + ix),
                                    static_cast<std::ptrdiff_t>(it))
                    << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stlgcp

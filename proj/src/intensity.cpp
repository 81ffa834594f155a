#include "stlgcp/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stlgcp/parallel.hpp"

namespace stlgcp {

namespace {

std::size_t cube_of(const SpaceTimeWindow& w, const Point& pt, std::size_t nx, std::size_t ny,
                    std::size_t nt) {
    auto axis = [](const Interval& iv, double v, std::size_t n) {
        const auto k = static_cast<std::ptrdiff_t>(std::floor((v - iv.lo) / iv.length() *
                                                              static_cast<double>(n)));
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            k, 0, static_cast<std::ptrdiff_t>(n) - 1));
    };
    const std::size_t ix = axis(w.x_range, pt.x, nx);
    const std::size_t iy = axis(w.y_range, pt.y, ny);
    const std::size_t it = axis(w.t_range, pt.t, nt);
    return (it * ny + iy) * nx + ix;
}

double effective_weight(const std::vector<double>& extra, std::size_t j) {
    return extra.empty() ? 1.0 : extra[j];
}

}  // namespace

QuadratureScheme build_quadrature(const PointPattern& p, std::size_t nx, std::size_t ny,
                                  std::size_t nt) {
    if (nx == 0 || ny == 0 || nt == 0)
        throw std::invalid_argument("quadrature partition counts must be positive");
    const auto& w = p.window();
    const std::size_t n = p.size();
    const std::size_t n_cubes = nx * ny * nt;
    const double cube_volume = window_volume(w) / static_cast<double>(n_cubes);

    std::vector<std::size_t> counts(n_cubes, 1);  // every cube holds its own dummy
    std::vector<std::size_t> data_cube(n);
    for (std::size_t i = 0; i < n; ++i) {
        data_cube[i] = cube_of(w, p.points()[i], nx, ny, nt);
        ++counts[data_cube[i]];
    }

    QuadratureScheme q;
    q.window = w;
    q.cubes = {nx, ny, nt};
    q.n_data = n;
    q.points.reserve(n + n_cubes);
    q.weights.reserve(n + n_cubes);
    q.is_data.reserve(n + n_cubes);
    for (std::size_t i = 0; i < n; ++i) {
        q.points.push_back(p.points()[i]);
        q.weights.push_back(cube_volume / static_cast<double>(counts[data_cube[i]]));
        q.is_data.push_back(1);
    }
    for (std::size_t it = 0; it < nt; ++it)
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const Point c{
                    w.x_range.lo + (static_cast<double>(ix) + 0.5) * w.x_range.length() /
                                       static_cast<double>(nx),
                    w.y_range.lo + (static_cast<double>(iy) + 0.5) * w.y_range.length() /
                                       static_cast<double>(ny),
                    w.t_range.lo + (static_cast<double>(it) + 0.5) * w.t_range.length() /
                                       static_cast<double>(nt)};
                q.points.push_back(c);
                q.weights.push_back(cube_volume /
                                    static_cast<double>(counts[(it * ny + iy) * nx + ix]));
                q.is_data.push_back(0);
            }
    q.covariates = Eigen::MatrixXd(q.points.size(), 0);
    q.offset.assign(q.points.size(), 0.0);
    return q;
}

QuadratureScheme build_quadrature_auto(const PointPattern& p, double dummy_factor,
                                       std::size_t max_per_cube) {
    const double target = std::max(8.0, dummy_factor * static_cast<double>(p.size()));
    auto side = static_cast<std::size_t>(std::ceil(std::cbrt(target)));
    side = std::max<std::size_t>(side, 2);
    constexpr std::size_t kMaxCubes = std::size_t{1} << 21;
    const auto& w = p.window();
    while (true) {
        std::vector<std::size_t> counts(side * side * side, 0);
        std::size_t worst = 0;
        for (const auto& pt : p.points())
            worst = std::max(worst, ++counts[cube_of(w, pt, side, side, side)]);
        if (worst <= max_per_cube) return build_quadrature(p, side, side, side);
        if (side * side * side * 8 > kMaxCubes)
            throw std::runtime_error(
                "quadrature refinement limit reached: a cube still holds more than " +
                std::to_string(max_per_cube) + " data points");
        side *= 2;
    }
}

void attach_covariates(QuadratureScheme& q, const std::vector<Point>& samples,
                       const Eigen::MatrixXd& values) {
    if (samples.empty() || static_cast<std::size_t>(values.rows()) != samples.size())
        throw std::invalid_argument("covariate samples and value rows must match");
    const auto& w = q.window;
    q.covariates.resize(static_cast<std::ptrdiff_t>(q.size()), values.cols());
    for (std::size_t j = 0; j < q.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double dx = (q.points[j].x - samples[k].x) / w.x_range.length();
            const double dy = (q.points[j].y - samples[k].y) / w.y_range.length();
            const double dt = (q.points[j].t - samples[k].t) / w.t_range.length();
            const double d2 = dx * dx + dy * dy + dt * dt;
            if (d2 < best) {
                best = d2;
                best_k = k;
            }
        }
        q.covariates.row(static_cast<std::ptrdiff_t>(j)) =
            values.row(static_cast<std::ptrdiff_t>(best_k));
    }
}

double poisson_loglik_approx(const QuadratureScheme& q, const Eigen::VectorXd& theta,
                             const std::vector<double>& extra_weights) {
    const std::size_t m = q.size();
    if (!extra_weights.empty() && extra_weights.size() != m)
        throw std::invalid_argument("extra weight vector length does not match scheme");
    const auto p_cols = static_cast<std::size_t>(q.covariates.cols());
    if (static_cast<std::size_t>(theta.size()) != 1 + p_cols)
        throw std::invalid_argument("theta length does not match design");
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double eta = theta[0] + q.offset[j];
        for (std::size_t c = 0; c < p_cols; ++c)
            eta += theta[static_cast<std::ptrdiff_t>(c) + 1] *
                   q.covariates(static_cast<std::ptrdiff_t>(j), static_cast<std::ptrdiff_t>(c));
        const double lambda = std::exp(eta);
        if (!std::isfinite(lambda)) throw std::runtime_error("non-finite fitted intensity");
        const double wj = effective_weight(extra_weights, j);
        const double data_term = q.is_data[j] ? eta : 0.0;  // e_j * log(lambda_j)
        total += wj * (data_term - q.weights[j] * lambda + q.weights[j]);
    }
    return total;
}

IntensityFit fit_poisson(const QuadratureScheme& q, const std::vector<double>& extra_weights,
                         std::size_t max_iterations, double tol) {
    const std::size_t m = q.size();
    if (m == 0) throw std::invalid_argument("empty quadrature scheme");
    if (!extra_weights.empty() && extra_weights.size() != m)
        throw std::invalid_argument("extra weight vector length does not match scheme");
    const auto c_cols = q.covariates.cols();
    if (c_cols > 0 && static_cast<std::size_t>(q.covariates.rows()) != m)
        throw std::invalid_argument("covariate rows do not match scheme size");
    const std::ptrdiff_t p_cols = 1 + c_cols;

    Eigen::VectorXd w(m), y(m), offs(m);
    double data_mass = 0.0, volume_mass = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double ej = effective_weight(extra_weights, j);
        if (!(ej >= 0.0) || !std::isfinite(ej))
            throw std::invalid_argument("extra weights must be finite and non-negative");
        const auto jj = static_cast<std::ptrdiff_t>(j);
        w[jj] = ej * q.weights[j];
        y[jj] = q.response(j);
        offs[jj] = q.offset[j];
        if (q.is_data[j]) data_mass += ej;
        volume_mass += ej * q.weights[j];
    }
    if (!(data_mass > 0.0)) throw std::runtime_error("no effective data");

    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(static_cast<std::ptrdiff_t>(m), p_cols);
    if (c_cols > 0) X.rightCols(c_cols) = q.covariates;

    {
        // Rank check on the weighted support.
        Eigen::MatrixXd A = w.array().sqrt().matrix().asDiagonal() * X;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        qr.setThreshold(1e-10);
        if (qr.rank() < p_cols) {
            std::ostringstream msg;
            msg << "design matrix is rank deficient (collinear columns:";
            const auto& perm = qr.colsPermutation().indices();
            for (std::ptrdiff_t k = qr.rank(); k < p_cols; ++k) msg << ' ' << perm[k];
            msg << ")";
            throw std::runtime_error(msg.str());
        }
    }

    auto deviance_of = [&](const Eigen::VectorXd& lambda) {
        double d = 0.0;
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(m); ++j) {
            const double lj = lambda[j];
            double term = -(y[j] - lj);
            if (y[j] > 0.0) term += y[j] * std::log(y[j] / lj);
            d += 2.0 * w[j] * term;
        }
        return d;
    };
    auto lambda_of = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd eta = X * theta + offs;
        if ((eta.array() > 700.0).any())
            throw std::runtime_error("non-finite fitted intensity");
        return Eigen::VectorXd(eta.array().exp());
    };

    IntensityFit fit;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p_cols);
    theta[0] = std::log(data_mass / volume_mass);
    Eigen::VectorXd lambda = lambda_of(theta);
    double dev = deviance_of(lambda);
    fit.deviance_trace.push_back(dev);

    for (std::size_t it = 0; it < max_iterations; ++it) {
        const Eigen::VectorXd eta = X * theta + offs;
        const Eigen::VectorXd irls_w = (w.array() * lambda.array()).matrix();
        const Eigen::VectorXd z =
            (eta - offs).array() + (y - lambda).array() / lambda.array();
        const Eigen::MatrixXd Xw = irls_w.asDiagonal() * X;
        Eigen::VectorXd proposal =
            (X.transpose() * Xw).ldlt().solve(X.transpose() * (irls_w.asDiagonal() * z));
        if (!proposal.allFinite()) throw std::runtime_error("non-finite fitted intensity");

        // Step halving keeps the deviance monotone.
        Eigen::VectorXd trial = proposal;
        Eigen::VectorXd trial_lambda;
        double trial_dev = std::numeric_limits<double>::infinity();
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            try {
                trial_lambda = lambda_of(trial);
                trial_dev = deviance_of(trial_lambda);
            } catch (const std::runtime_error&) {
                trial_dev = std::numeric_limits<double>::infinity();
            }
            if (std::isfinite(trial_dev) && trial_dev <= dev + 1e-12 * (std::abs(dev) + 1.0)) {
                improved = true;
                break;
            }
            trial = 0.5 * (trial + theta);
        }
        if (!improved) {
            fit.converged = true;  // no descent direction left
            break;
        }
        const double change = std::abs(dev - trial_dev);
        theta = trial;
        lambda = trial_lambda;
        dev = trial_dev;
        fit.deviance_trace.push_back(dev);
        fit.iterations = it + 1;
        if (change <= tol * (std::abs(dev) + 0.1)) {
            fit.converged = true;
            break;
        }
    }

    fit.theta = theta;
    fit.deviance = dev;
    fit.fitted.resize(m);
    for (std::size_t j = 0; j < m; ++j) fit.fitted[j] = lambda[static_cast<std::ptrdiff_t>(j)];
    return fit;
}

double intensity_at(const QuadratureScheme& q, const IntensityFit& fit, const Point& where) {
    // Covariates and offset are carried over from the nearest quadrature point;
    // exact whenever the model is intercept-only with zero offset.
    const auto& w = q.window;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double dx = (where.x - q.points[j].x) / w.x_range.length();
        const double dy = (where.y - q.points[j].y) / w.y_range.length();
        const double dt = (where.t - q.points[j].t) / w.t_range.length();
        const double d2 = dx * dx + dy * dy + dt * dt;
        if (d2 < best) {
            best = d2;
            best_j = j;
        }
    }
    double eta = fit.theta[0] + q.offset[best_j];
    for (std::ptrdiff_t c = 0; c < q.covariates.cols(); ++c)
        eta += fit.theta[c + 1] * q.covariates(static_cast<std::ptrdiff_t>(best_j), c);
    return std::exp(eta);
}

std::vector<Point> evaluation_grid(const SpaceTimeWindow& w, std::size_t nx, std::size_t ny,
                                   std::size_t nt) {
    if (nx == 0 || ny == 0 || nt == 0)
        throw std::invalid_argument("evaluation grid counts must be positive");
    std::vector<Point> out;
    out.reserve(nx * ny * nt);
    for (std::size_t it = 0; it < nt; ++it)
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix)
                out.push_back({w.x_range.lo + (static_cast<double>(ix) + 0.5) *
                                                  w.x_range.length() / static_cast<double>(nx),
                               w.y_range.lo + (static_cast<double>(iy) + 0.5) *
                                                  w.y_range.length() / static_cast<double>(ny),
                               w.t_range.lo + (static_cast<double>(it) + 0.5) *
                                                  w.t_range.length() / static_cast<double>(nt)});
    return out;
}

LocalIntensityField fit_local_intensity(const QuadratureScheme& q, const BandwidthSet& bw,
                                        const std::vector<Point>& locations, unsigned threads) {
    bw.validate();
    if (locations.empty()) throw std::invalid_argument("no evaluation locations");
    LocalIntensityField field;
    field.locations = locations;
    field.bandwidths = bw;
    const auto p_cols = 1 + q.covariates.cols();
    field.thetas = Eigen::MatrixXd::Constant(static_cast<std::ptrdiff_t>(locations.size()),
                                             p_cols, std::numeric_limits<double>::quiet_NaN());
    field.lambda.assign(locations.size(), std::numeric_limits<double>::quiet_NaN());
    field.ok.assign(locations.size(), 0);

    parallel_for(locations.size(), threads, [&](std::size_t g) {
        std::vector<double> extra(q.size());
        for (std::size_t j = 0; j < q.size(); ++j)
            extra[j] = product_weight(bw, locations[g].x - q.points[j].x,
                                      locations[g].y - q.points[j].y,
                                      locations[g].t - q.points[j].t);
        try {
            const IntensityFit fit = fit_poisson(q, extra);
            field.thetas.row(static_cast<std::ptrdiff_t>(g)) = fit.theta.transpose();
            field.lambda[g] = intensity_at(q, fit, locations[g]);
            field.ok[g] = 1;
        } catch (const std::exception&) {
            // Leave the location flagged; callers decide how to handle gaps.
        }
    });
    return field;
}

std::vector<double> constant_intensity(const PointPattern& p) {
    if (p.size() == 0) throw std::invalid_argument("empty pattern has no intensity estimate");
    return std::vector<double>(p.size(),
                               static_cast<double>(p.size()) / window_volume(p.window()));
}

void write_local_intensity_csv(const LocalIntensityField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "vx,vy,vs";
    for (std::ptrdiff_t c = 0; c < f.thetas.cols(); ++c) out << ",theta" << c;
    out << ",lambda\n";
    for (std::size_t g = 0; g < f.locations.size(); ++g) {
        out << f.locations[g].x << ',' << f.locations[g].y << ',' << f.locations[g].t;
        for (std::ptrdiff_t c = 0; c < f.thetas.cols(); ++c)
            out << ',' << f.thetas(static_cast<std::ptrdiff_t>(g), c);
        out << ',' << f.lambda[g] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stlgcp

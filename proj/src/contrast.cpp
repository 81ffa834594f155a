#include "stlgcp/contrast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stlgcp/parallel.hpp"

namespace stlgcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logit_scale2(double v) {
    v = std::min(v, 2.0 - 1e-9);
    if (!(v > 0.0)) throw std::invalid_argument("exponent must lie in (0, 2]");
    return std::log(v / (2.0 - v));
}

double transform_of(ContrastTransform t, double v) {
    return t == ContrastTransform::Log ? std::log(v) : v;
}

// The contrast surface flattens once the parameters leave the range the lag
// grid can resolve (variance near zero, or scale parameters far beyond the
// largest lag): every theoretical curve on the plateau matches equally badly
// and the simplex random-walks without bound. Vertices outside a generous box
// tied to the grid are rejected so plateau fits stop at a finite value.
bool inside_search_box(const ContrastSpec& spec, const Eigen::VectorXd& x) {
    // sigma2 is the log pair correlation at zero lag, so values beyond
    // log(100) lie far outside anything an empirical surface can express.
    const double log_r = std::log(spec.grid.r_max());
    const double log_h = std::log(spec.grid.h_max());
    return x[0] >= -15.0 && x[0] <= std::log(100.0) &&
           x[1] >= log_r - 10.0 && x[1] <= log_r + std::log(2.0) &&
           x[2] >= log_h - 10.0 && x[2] <= log_h + std::log(2.0);
}

}  // namespace

std::size_t ContrastSpec::n_free() const {
    if (family == "sep_exp") return 3;
    if (family == "gneiting") return 4;  // delta is free, the gammas stay fixed
    throw std::invalid_argument("unknown model family: " + family);
}

CovarianceModel model_from_free(const ContrastSpec& spec, const Eigen::VectorXd& packed) {
    if (static_cast<std::size_t>(packed.size()) != spec.n_free())
        throw std::invalid_argument("free parameter vector has wrong length");
    if (spec.family == "sep_exp")
        return unpack_params("sep_exp", {packed[0], packed[1], packed[2]});
    return unpack_params("gneiting", {packed[0], packed[1], packed[2],
                                      logit_scale2(spec.gamma_s), logit_scale2(spec.gamma_t),
                                      packed[3]});
}

Eigen::VectorXd free_from_model(const ContrastSpec& spec, const CovarianceModel& model) {
    const std::vector<double> full = pack_params(model);
    if (spec.family == "sep_exp") {
        if (full.size() != 3) throw std::invalid_argument("model family does not match spec");
        return Eigen::Vector3d(full[0], full[1], full[2]);
    }
    if (full.size() != 6) throw std::invalid_argument("model family does not match spec");
    return Eigen::Vector4d(full[0], full[1], full[2], full[5]);
}

double contrast_value(const ContrastSpec& spec, const Eigen::MatrixXd& empirical,
                      const CovarianceModel& model) {
    const auto nr = static_cast<std::ptrdiff_t>(spec.grid.nr());
    const auto nh = static_cast<std::ptrdiff_t>(spec.grid.nh());
    if (empirical.rows() != nr || empirical.cols() != nh)
        throw std::invalid_argument("empirical surface does not match the lag grid");
    double total = 0.0;
    for (std::ptrdiff_t a = 0; a < nr; ++a)
        for (std::ptrdiff_t b = 0; b < nh; ++b) {
            const double theo = pcf_theoretical(
                model, spec.grid.r_values[static_cast<std::size_t>(a)],
                spec.grid.h_values[static_cast<std::size_t>(b)]);
            const double diff = transform_of(spec.transform, empirical(a, b)) -
                                transform_of(spec.transform, theo);
            total += diff * diff;
        }
    return total / static_cast<double>(nr * nh);
}

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& start, const SimplexOptions& opts) {
    const auto dim = start.size();
    if (dim == 0) throw std::invalid_argument("cannot optimize a zero-dimensional problem");
    SimplexResult res;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evals;
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    };

    std::vector<Eigen::VectorXd> v(static_cast<std::size_t>(dim) + 1, start);
    std::vector<double> fv(v.size());
    for (std::ptrdiff_t k = 0; k < dim; ++k) v[static_cast<std::size_t>(k) + 1][k] += opts.initial_step;
    for (std::size_t k = 0; k < v.size(); ++k) fv[k] = eval(v[k]);

    auto order = [&] {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return fv[a] < fv[b];
        });
        std::vector<Eigen::VectorXd> v2(v.size());
        std::vector<double> f2(v.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            v2[k] = v[idx[k]];
            f2[k] = fv[idx[k]];
        }
        v.swap(v2);
        fv.swap(f2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t k = 1; k < v.size(); ++k)
            d = std::max(d, (v[k] - v[0]).cwiseAbs().maxCoeff());
        return d;
    };

    bool converged = false;
    while (res.evals < opts.max_evals) {
        order();
        const double spread = fv.back() - fv.front();
        if (diameter() < opts.diameter_tol || (std::isfinite(spread) && spread < opts.spread_tol)) {
            converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t k = 0; k + 1 < v.size(); ++k) centroid += v[k];
        centroid /= static_cast<double>(v.size() - 1);

        const Eigen::VectorXd reflected = centroid + (centroid - v.back());
        const double fr = eval(reflected);
        if (fr < fv.front()) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - v.back());
            const double fe = eval(expanded);
            if (fe < fr) {
                v.back() = expanded;
                fv.back() = fe;
            } else {
                v.back() = reflected;
                fv.back() = fr;
            }
            continue;
        }
        if (fr < fv[v.size() - 2]) {
            v.back() = reflected;
            fv.back() = fr;
            continue;
        }
        Eigen::VectorXd contracted;
        double fc;
        if (fr < fv.back()) {  // outside contraction
            contracted = centroid + 0.5 * (reflected - centroid);
            fc = eval(contracted);
            if (fc <= fr) {
                v.back() = contracted;
                fv.back() = fc;
                continue;
            }
        } else {  // inside contraction
            contracted = centroid + 0.5 * (v.back() - centroid);
            fc = eval(contracted);
            if (fc < fv.back()) {
                v.back() = contracted;
                fv.back() = fc;
                continue;
            }
        }
        for (std::size_t k = 1; k < v.size(); ++k) {  // shrink toward the best vertex
            v[k] = v[0] + 0.5 * (v[k] - v[0]);
            fv[k] = eval(v[k]);
        }
    }
    order();
    res.x = v.front();
    res.value = fv.front();
    res.converged = converged;
    return res;
}

std::vector<Eigen::VectorXd> default_starts(const ContrastSpec& spec,
                                            const Eigen::MatrixXd& empirical) {
    const double g00 = empirical(0, 0);
    const double sigma2_0 =
        g00 > 0.0 ? std::clamp(std::log(g00), 0.5, 15.0) : 0.5;
    const double alpha_0 = spec.grid.r_max() / 5.0;
    const double beta_0 = spec.grid.h_max() / 5.0;

    std::vector<Eigen::VectorXd> starts;
    for (double factor : {1.0, 0.5, 1.5}) {
        Eigen::VectorXd x(static_cast<std::ptrdiff_t>(spec.n_free()));
        x[0] = std::log(sigma2_0 * factor);
        x[1] = std::log(alpha_0 * factor);
        x[2] = std::log(beta_0 * factor);
        if (spec.n_free() == 4) x[3] = logit_scale2(factor);  // delta start = factor
        starts.push_back(std::move(x));
    }
    return starts;
}

GlobalFitResult fit_contrast_curve(const ContrastSpec& spec, const Eigen::MatrixXd& empirical,
                                   const std::vector<Eigen::VectorXd>& starts,
                                   const SimplexOptions& opts) {
    if (empirical.rows() != static_cast<std::ptrdiff_t>(spec.grid.nr()) ||
        empirical.cols() != static_cast<std::ptrdiff_t>(spec.grid.nh()))
        throw std::invalid_argument("empirical surface does not match the lag grid");
    if (!empirical.allFinite())
        throw std::invalid_argument("empirical surface contains non-finite values");

    const std::vector<Eigen::VectorXd> use_starts =
        starts.empty() ? default_starts(spec, empirical) : starts;
    auto objective = [&](const Eigen::VectorXd& x) {
        if (!inside_search_box(spec, x)) return kInf;
        try {
            return contrast_value(spec, empirical, model_from_free(spec, x));
        } catch (const std::exception&) {
            return kInf;  // overflow or invalid parameters: reject the vertex
        }
    };

    GlobalFitResult result;
    result.contrast = kInf;
    for (const auto& s : use_starts) {
        if (static_cast<std::size_t>(s.size()) != spec.n_free())
            throw std::invalid_argument("start vector has wrong length");
        const SimplexResult r = minimize_simplex(objective, s, opts);
        result.starts.push_back({s, r.value, r.evals, r.converged});
        result.evals += r.evals;
        if (r.value < result.contrast) {
            result.contrast = r.value;
            result.model = model_from_free(spec, r.x);
            result.converged = r.converged;
        }
    }
    if (!std::isfinite(result.contrast))
        throw std::runtime_error("contrast objective was non-finite at every start");
    return result;
}

GlobalFitResult fit_global(const PointPattern& p, const std::vector<double>& intensity,
                           const ContrastSpec& spec, const BandwidthSet& bw, unsigned threads,
                           const SimplexOptions& opts) {
    const SummaryStatistic g = pcf_global(p, intensity, bw, spec.grid, threads);
    return fit_contrast_curve(spec, g.single(), {}, opts);
}

LocalFitResult fit_local(const PointPattern& p, const std::vector<double>& intensity,
                         const ContrastSpec& spec, const BandwidthSet& bw, unsigned threads,
                         const SimplexOptions& opts) {
    const SummaryStatistic stack = pcf_local_all(p, intensity, bw, spec.grid, threads);
    LocalFitResult out;
    out.bandwidths = bw;
    out.global = fit_contrast_curve(spec, pcf_global_from_stack(stack).single(), {}, opts);
    const Eigen::VectorXd warm = free_from_model(spec, out.global.model);

    const std::size_t n = p.size();
    out.models.assign(n, out.global.model);
    out.contrast.assign(n, 0.0);
    out.converged.assign(n, 0);
    parallel_for(n, threads, [&](std::size_t i) {
        const SummaryStatistic jbar = lista_weighted_average(stack, p, bw, i);
        auto objective = [&](const Eigen::VectorXd& x) {
            if (!inside_search_box(spec, x)) return kInf;
            try {
                return contrast_value(spec, jbar.single(), model_from_free(spec, x));
            } catch (const std::exception&) {
                return kInf;
            }
        };
        const SimplexResult r = minimize_simplex(objective, warm, opts);
        // The simplex never loses its best vertex, so the local minimum cannot
        // exceed the warm-start value.
        out.models[i] = model_from_free(spec, r.x);
        out.contrast[i] = r.value;
        out.converged[i] = r.converged ? 1 : 0;
    });
    return out;
}

void write_local_fit_csv(const LocalFitResult& f, const PointPattern& p,
                         const std::string& path) {
    if (f.models.size() != p.size())
        throw std::invalid_argument("local fit size does not match pattern");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    const bool gneiting = !f.models.empty() && !f.models.front().is_separable();
    out << "point_id,x,y,t,sigma2,alpha,beta" << (gneiting ? ",delta" : "")
        << ",contrast,converged\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& pt = p.points()[i];
        out << i << ',' << pt.x << ',' << pt.y << ',' << pt.t << ',';
        if (gneiting) {
            const auto& m = f.models[i].gneiting();
            out << m.sigma2 << ',' << m.alpha << ',' << m.beta << ',' << m.delta;
        } else {
            const auto& m = f.models[i].separable();
            out << m.sigma2 << ',' << m.alpha << ',' << m.beta;
        }
        out << ',' << f.contrast[i] << ',' << static_cast<int>(f.converged[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stlgcp

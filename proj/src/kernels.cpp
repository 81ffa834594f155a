#include "stlgcp/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "stlgcp/stats.hpp"

namespace stlgcp {

KernelType kernel_type_from_string(const std::string& name) {
    if (name == "epanechnikov") return KernelType::Epanechnikov;
    if (name == "gaussian") return KernelType::Gaussian;
    if (name == "box") return KernelType::Box;
    throw std::invalid_argument("unknown kernel: " + name);
}

std::string to_string(KernelType k) {
    switch (k) {
        case KernelType::Epanechnikov: return "epanechnikov";
        case KernelType::Gaussian: return "gaussian";
        case KernelType::Box: return "box";
    }
    return "?";
}

Kernel1D::Kernel1D(KernelType t, double b) : type(t), bandwidth(b) {
    if (!(b > 0.0)) throw std::invalid_argument("kernel bandwidth must be > 0");
}

double kernel_eval(const Kernel1D& k, double x) {
    const double b = k.bandwidth;
    switch (k.type) {
        case KernelType::Epanechnikov: {
            const double u = x / b;
            if (std::abs(u) >= 1.0) return 0.0;
            return 0.75 * (1.0 - u * u) / b;
        }
        case KernelType::Gaussian: {
            const double u = x / b;
            return std::exp(-0.5 * u * u) / (b * std::sqrt(2.0 * M_PI));
        }
        case KernelType::Box: {
            if (std::abs(x) > b) return 0.0;
            return 0.5 / b;
        }
    }
    return 0.0;
}

void BandwidthSet::validate() const {
    if (!(eps_space > 0.0) || !(eps_time > 0.0) || !(sigma_x > 0.0) || !(sigma_y > 0.0) ||
        !(sigma_t > 0.0))
        throw std::invalid_argument("bandwidths must all be strictly positive");
}

double product_weight(const BandwidthSet& b, double dx, double dy, double dt) {
    const Kernel1D kx(b.weight_kernel, b.sigma_x);
    const Kernel1D ky(b.weight_kernel, b.sigma_y);
    const Kernel1D kt(b.weight_kernel, b.sigma_t);
    return kernel_eval(kx, dx) * kernel_eval(ky, dy) * kernel_eval(kt, dt);
}

double bandwidth_plugin(const std::vector<double>& samples) {
    if (samples.size() < 3) throw std::invalid_argument("bandwidth_plugin: need >= 3 samples");
    const double sd = sample_sd(samples);
    std::vector<double> sorted = samples;
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    const double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) throw std::invalid_argument("bandwidth_plugin: degenerate sample");
    const double m = static_cast<double>(samples.size());
    return 1.06 * spread * std::pow(m, -0.2);
}

std::vector<double> bandwidth_variable(const PointPattern& p, std::size_t n_p, double eps_floor) {
    const std::size_t n = p.size();
    if (!(eps_floor > 0.0)) throw std::invalid_argument("bandwidth_variable: eps_floor must be > 0");
    if (n_p >= n) throw std::invalid_argument("bandwidth_variable: n_p must be < n");
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = std::max(eps_floor, kth_nearest_distance(p, j, n_p, /*spatial_only=*/true));
    return out;
}

BandwidthSet default_bandwidths(const PointPattern& p, const BandwidthSet& partial) {
    BandwidthSet out = partial;
    const std::size_t n = p.size();

    const bool need_pcf = !(out.eps_space > 0.0) || !(out.eps_time > 0.0);
    if (need_pcf) {
        if (n < 3) throw std::invalid_argument("default_bandwidths: need >= 3 points");
        std::vector<double> ds, dt;
        ds.reserve(n * (n - 1) / 2);
        dt.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                ds.push_back(spatial_distance(p[i], p[j]));
                dt.push_back(temporal_lag(p[i], p[j]));
            }
        }
        if (!(out.eps_space > 0.0)) out.eps_space = bandwidth_plugin(ds);
        if (!(out.eps_time > 0.0)) out.eps_time = bandwidth_plugin(dt);
    }

    const bool need_w =
        !(out.sigma_x > 0.0) || !(out.sigma_y > 0.0) || !(out.sigma_t > 0.0);
    if (need_w) {
        if (n < 3) throw std::invalid_argument("default_bandwidths: need >= 3 points");
        std::vector<double> xs(n), ys(n), ts(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = p[i].x;
            ys[i] = p[i].y;
            ts[i] = p[i].t;
        }
        if (!(out.sigma_x > 0.0)) out.sigma_x = bandwidth_plugin(xs);
        if (!(out.sigma_y > 0.0)) out.sigma_y = bandwidth_plugin(ys);
        if (!(out.sigma_t > 0.0)) out.sigma_t = bandwidth_plugin(ts);
    }

    out.validate();
    return out;
}

}  // namespace stlgcp

#include "stlgcp/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "stlgcp/intensity.hpp"
#include "stlgcp/parallel.hpp"
#include "stlgcp/rng.hpp"

namespace stlgcp {

namespace {
constexpr double kVarianceFloor = 1e-12;
constexpr std::uint64_t kRetrySalt = 1000;
}  // namespace

double test_statistic(const Eigen::MatrixXd& k_hat, const Eigen::MatrixXd& mean,
                      const Eigen::MatrixXd& variance, std::size_t* excluded) {
    if (k_hat.rows() != mean.rows() || k_hat.cols() != mean.cols() ||
        variance.rows() != mean.rows() || variance.cols() != mean.cols())
        throw std::invalid_argument("statistic inputs have mismatched shapes");
    double total = 0.0;
    std::size_t skipped = 0;
    for (std::ptrdiff_t a = 0; a < k_hat.rows(); ++a)
        for (std::ptrdiff_t b = 0; b < k_hat.cols(); ++b) {
            if (variance(a, b) < kVarianceFloor) {
                ++skipped;
                continue;
            }
            total += (k_hat(a, b) - mean(a, b)) / std::sqrt(variance(a, b));
        }
    if (excluded != nullptr) *excluded = skipped;
    if (skipped == static_cast<std::size_t>(k_hat.size()))
        throw std::runtime_error("degenerate variance: every grid cell was excluded");
    return total;
}

DiagnosticResult run_mc_test(const PointPattern& observed, const DiagnosticConfig& cfg) {
    if (observed.size() < 2)
        throw std::invalid_argument("observed pattern needs at least two points");
    if (cfg.replicates == 0) throw std::invalid_argument("need at least one replicate");

    const GrfSampler sampler(cfg.model, cfg.sim_grid);
    const std::size_t q_total = cfg.replicates;
    std::vector<Eigen::MatrixXd> k_rep(q_total);

    parallel_for(q_total, cfg.threads, [&](std::size_t q) {
        const std::uint64_t seed_q = derive_seed(cfg.seed, q + 1);
        SimulationConfig sim_cfg;
        sim_cfg.grid = cfg.sim_grid;
        sim_cfg.model = cfg.model;
        sim_cfg.baseline.constant = cfg.baseline;
        sim_cfg.local = cfg.local;
        sim_cfg.local_pattern = cfg.local == nullptr ? nullptr : &observed;

        PointPattern replicate(std::vector<Point>{}, observed.window());
        bool usable = false;
        for (std::uint64_t attempt = 0; attempt < 5 && !usable; ++attempt) {
            sim_cfg.seed = attempt == 0 ? seed_q : derive_seed(seed_q, kRetrySalt + attempt);
            replicate = lgcp_simulate(sim_cfg, sampler).pattern;
            usable = replicate.size() >= 2;
        }
        if (!usable)
            throw std::runtime_error(
                "replicate simulation kept fewer than two points after 5 attempts");
        k_rep[q] = k_inhom(replicate, constant_intensity(replicate), cfg.grid).single();
    });

    DiagnosticResult out{cfg.grid,
                         0.0,
                         {},
                         1.0,
                         Eigen::MatrixXd(),
                         Eigen::MatrixXd(),
                         Eigen::MatrixXd(),
                         Eigen::MatrixXd(),
                         Eigen::MatrixXd(),
                         2.0 / static_cast<double>(q_total + 1),
                         0};
    const auto nr = k_rep.front().rows();
    const auto nh = k_rep.front().cols();
    out.mean_k = Eigen::MatrixXd::Zero(nr, nh);
    for (const auto& k : k_rep) out.mean_k += k;
    out.mean_k /= static_cast<double>(q_total);

    out.var_k = Eigen::MatrixXd::Zero(nr, nh);
    if (q_total > 1) {
        for (const auto& k : k_rep) {
            const Eigen::MatrixXd d = k - out.mean_k;
            out.var_k += d.cwiseProduct(d);
        }
        out.var_k /= static_cast<double>(q_total - 1);
    }

    out.env_lower = k_rep.front();
    out.env_upper = k_rep.front();
    for (const auto& k : k_rep) {
        out.env_lower = out.env_lower.cwiseMin(k);
        out.env_upper = out.env_upper.cwiseMax(k);
    }

    out.k_observed = k_inhom(observed, constant_intensity(observed), cfg.grid).single();
    out.t_observed = test_statistic(out.k_observed, out.mean_k, out.var_k, &out.cells_excluded);
    out.t_replicates.resize(q_total);
    std::size_t exceed = 0;
    for (std::size_t q = 0; q < q_total; ++q) {
        out.t_replicates[q] = test_statistic(k_rep[q], out.mean_k, out.var_k, nullptr);
        if (out.t_replicates[q] > out.t_observed) ++exceed;
    }
    out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(q_total + 1);
    return out;
}

void write_envelope_csv(const DiagnosticResult& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "r,h,lower,mean,upper,observed\n";
    for (std::size_t a = 0; a < d.grid.nr(); ++a)
        for (std::size_t b = 0; b < d.grid.nh(); ++b) {
            const auto ia = static_cast<std::ptrdiff_t>(a);
            const auto ib = static_cast<std::ptrdiff_t>(b);
            out << d.grid.r_values[a] << ',' << d.grid.h_values[b] << ',' << d.env_lower(ia, ib)
                << ',' << d.mean_k(ia, ib) << ',' << d.env_upper(ia, ib) << ','
                << d.k_observed(ia, ib) << '\n';
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stlgcp

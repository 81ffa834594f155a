#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "stlgcp/geometry.hpp"
#include "stlgcp/kernels.hpp"

namespace stlgcp {

/// Evenly spaced positive lag grid for second-order summaries.
struct LagGrid {
    std::vector<double> r_values;
    std::vector<double> h_values;

    LagGrid(std::vector<double> r, std::vector<double> h);

    /// nr lags from r_max/nr to r_max and likewise in time, with r_max and h_max
    /// set to the given fractions of the maximum observable distances.
    static LagGrid make_default(const SpaceTimeWindow& w, std::size_t nr = 15,
                                std::size_t nh = 15, double fraction_r = 0.25,
                                double fraction_h = 0.25);

    std::size_t nr() const { return r_values.size(); }
    std::size_t nh() const { return h_values.size(); }
    double r_max() const { return r_values.back(); }
    double h_max() const { return h_values.back(); }
    double r_step() const;
    double h_step() const;

    bool same_as(const LagGrid& other) const;
};

enum class StatKind { GlobalPcf, LocalPcfStack, WeightedAvgPcf, KInhom };

/// Values over a lag grid: one layer for global statistics, n layers for the
/// per-point LISTA stack. layers[k](a, b) is the value at (r_values[a], h_values[b]).
struct SummaryStatistic {
    LagGrid grid;
    StatKind kind;
    std::vector<Eigen::MatrixXd> layers;

    const Eigen::MatrixXd& single() const;
};

/// Local pair correlation functions, one layer per point:
///   g_i(r,h) = n / (4 pi r |WxT|) * sum_{j != i} k_eps(d_ij - r) k_eps(tau_ij - h)
///              * omega_ij / (lambda_i lambda_j),
/// with omega_ij the translation correction weight. The n/(lambda_i lambda_j)
/// normalization makes the stack average the standard global pcf estimator
/// (so it sits near 1 under complete randomness).
SummaryStatistic pcf_local_all(const PointPattern& p, const std::vector<double>& intensity,
                               const BandwidthSet& bw, const LagGrid& grid,
                               unsigned threads = 1);

/// Global pcf: the unweighted mean over the LISTA stack layers.
SummaryStatistic pcf_global(const PointPattern& p, const std::vector<double>& intensity,
                            const BandwidthSet& bw, const LagGrid& grid, unsigned threads = 1);
SummaryStatistic pcf_global_from_stack(const SummaryStatistic& stack);

/// Kernel-weighted average of the stack around point `target`:
///   Jbar_i = sum_j g_j * w_ij / sum_j w_ij, with w_ij the product weight of the
/// displacement between points i and j (j = i included). Falls back to the
/// target's own layer if the weight mass vanishes.
SummaryStatistic lista_weighted_average(const SummaryStatistic& stack, const PointPattern& p,
                                        const BandwidthSet& bw, std::size_t target);

/// Inhomogeneous K-function, evaluated exactly as
///   K(r,h) = |W||T| / (n(n-1)) * sum_{i} sum_{j>i} I(d_ij <= r, tau_ij <= h)
///            / (lambda_i lambda_j).
SummaryStatistic k_inhom(const PointPattern& p, const std::vector<double>& intensity,
                         const LagGrid& grid);

/// Long-format CSV export: "r,h,value" for single-layer statistics,
/// "point_id,r,h,value" for stacks.
void write_summary_csv(const SummaryStatistic& s, const std::string& path);

}  // namespace stlgcp

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stlgcp/diagnostics.hpp"
#include "stlgcp/rng.hpp"

using namespace stlgcp;

namespace {

const SpaceTimeWindow kWindow{{0.0, 1.0}, {0.0, 1.0}, {0.0, 10.0}};

PointPattern uniform_pattern(std::uint64_t seed, std::size_t n, const SpaceTimeWindow& w) {
    Rng rng(seed);
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        pts.push_back({rng.uniform(w.x_range.lo, w.x_range.hi),
                       rng.uniform(w.y_range.lo, w.y_range.hi),
                       rng.uniform(w.t_range.lo, w.t_range.hi)});
    return PointPattern(std::move(pts), w);
}

DiagnosticConfig quick_config(std::size_t replicates, std::uint64_t seed) {
    DiagnosticConfig cfg{LagGrid({0.05, 0.1, 0.15, 0.2}, {1.0, 2.0, 3.0}),
                         SpaceTimeGrid(kWindow, 8, 8, 10),
                         replicates,
                         seed,
                         1,
                         CovarianceModel(SeparableExponentialParams{1.0, 0.1, 2.0}),
                         nullptr,
                         20.0};
    return cfg;
}

}  // namespace

TEST_CASE("test statistic sums standardized departures") {
    Eigen::MatrixXd mean(2, 2), var(2, 2), k(2, 2);
    mean << 1.0, 2.0, 3.0, 4.0;
    var << 4.0, 1.0, 0.25, 9.0;
    k << 3.0, 1.0, 3.5, 1.0;
    // By hand: (3-1)/2 + (1-2)/1 + (3.5-3)/0.5 + (1-4)/3 = 1 - 1 + 1 - 1 = 0.
    CHECK(test_statistic(k, mean, var) == doctest::Approx(0.0).epsilon(1e-15));

    k << 5.0, 2.0, 3.0, 4.0;  // only the first cell departs, by two sd
    CHECK(test_statistic(k, mean, var) == doctest::Approx(2.0));

    // Identical surfaces give exactly zero.
    CHECK(test_statistic(mean, mean, var) == 0.0);
}

TEST_CASE("near-zero variance cells are excluded from the statistic") {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd var(2, 2);
    var << 1.0, 0.0, 1e-13, 1.0;
    Eigen::MatrixXd k(2, 2);
    k << 1.0, 100.0, 100.0, 2.0;  // the wild cells fall in the excluded slots
    std::size_t excluded = 0;
    CHECK(test_statistic(k, mean, var, &excluded) == doctest::Approx(3.0));
    CHECK(excluded == 2);

    Eigen::MatrixXd all_zero = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_WITH_AS(test_statistic(k, mean, all_zero, &excluded),
                         doctest::Contains("degenerate variance"), std::runtime_error);

    Eigen::MatrixXd wrong(3, 2);
    wrong.setZero();
    CHECK_THROWS_AS(test_statistic(wrong, mean, var), std::invalid_argument);
}

TEST_CASE("monte carlo test ranks the observation among its replicates") {
    const PointPattern obs = uniform_pattern(42, 200, kWindow);
    const DiagnosticConfig cfg = quick_config(9, 7);
    const DiagnosticResult res = run_mc_test(obs, cfg);

    REQUIRE(res.t_replicates.size() == 9);
    CHECK(res.envelope_level == doctest::Approx(0.2));

    // The p-value is exactly the exceedance rank rule.
    std::size_t exceed = 0;
    for (double t : res.t_replicates)
        if (t > res.t_observed) ++exceed;
    CHECK(res.p_value == doctest::Approx((1.0 + exceed) / 10.0).epsilon(1e-15));
    CHECK(res.p_value >= 0.1);
    CHECK(res.p_value <= 1.0);

    // Envelopes bracket the replicate mean pointwise.
    for (std::ptrdiff_t a = 0; a < res.mean_k.rows(); ++a)
        for (std::ptrdiff_t b = 0; b < res.mean_k.cols(); ++b) {
            CHECK(res.env_lower(a, b) <= res.mean_k(a, b) + 1e-12);
            CHECK(res.env_upper(a, b) >= res.mean_k(a, b) - 1e-12);
            CHECK(std::isfinite(res.k_observed(a, b)));
        }
    CHECK(res.var_k.minCoeff() >= 0.0);
}

TEST_CASE("monte carlo test is deterministic in the seed") {
    const PointPattern obs = uniform_pattern(52, 150, kWindow);
    const DiagnosticConfig cfg = quick_config(7, 99);
    const DiagnosticResult a = run_mc_test(obs, cfg);
    const DiagnosticResult b = run_mc_test(obs, cfg);
    CHECK(a.t_observed == b.t_observed);
    CHECK(a.p_value == b.p_value);
    for (std::size_t q = 0; q < a.t_replicates.size(); ++q)
        CHECK(a.t_replicates[q] == b.t_replicates[q]);
    CHECK((a.mean_k - b.mean_k).cwiseAbs().maxCoeff() == 0.0);

    DiagnosticConfig threaded = cfg;
    threaded.threads = 3;
    const DiagnosticResult c = run_mc_test(obs, threaded);
    CHECK(a.t_observed == c.t_observed);
    CHECK(a.p_value == c.p_value);
    for (std::size_t q = 0; q < a.t_replicates.size(); ++q)
        CHECK(a.t_replicates[q] == c.t_replicates[q]);
}

TEST_CASE("an implausibly clustered observation lands in the far tail") {
    // A tight cluster against a near-random null: the observed K sits far above
    // every replicate, so the p-value is the smallest attainable value.
    std::vector<Point> pts;
    Rng rng(3);
    for (int k = 0; k < 60; ++k)
        pts.push_back({0.45 + 0.1 * rng.uniform01(), 0.45 + 0.1 * rng.uniform01(),
                       4.5 + 1.0 * rng.uniform01()});
    const PointPattern obs(std::move(pts), kWindow);

    DiagnosticConfig cfg = quick_config(19, 5);
    cfg.model = CovarianceModel(SeparableExponentialParams{1e-12, 0.1, 2.0});
    cfg.baseline = 6.0;  // matches the observed count's constant-rule intensity
    const DiagnosticResult res = run_mc_test(obs, cfg);
    CHECK(res.p_value == doctest::Approx(1.0 / 20.0).epsilon(1e-15));
    CHECK(res.t_observed > *std::max_element(res.t_replicates.begin(), res.t_replicates.end()));
}

TEST_CASE("hopeless generators exhaust their retries") {
    const PointPattern obs = uniform_pattern(62, 50, kWindow);
    DiagnosticConfig cfg = quick_config(3, 1);
    cfg.baseline = 1e-9;  // essentially no points can ever be kept
    CHECK_THROWS_WITH_AS(run_mc_test(obs, cfg), doctest::Contains("fewer than two points"),
                         std::runtime_error);
}

TEST_CASE("diagnostics validate their inputs") {
    const PointPattern tiny({{0.5, 0.5, 5.0}}, kWindow);
    const DiagnosticConfig cfg = quick_config(5, 1);
    CHECK_THROWS_AS(run_mc_test(tiny, cfg), std::invalid_argument);

    const PointPattern obs = uniform_pattern(72, 80, kWindow);
    DiagnosticConfig zero = cfg;
    zero.replicates = 0;
    CHECK_THROWS_AS(run_mc_test(obs, zero), std::invalid_argument);
}

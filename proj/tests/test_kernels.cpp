#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stlgcp/kernels.hpp"

using namespace stlgcp;

TEST_CASE("kernel names round-trip") {
    for (auto k : {KernelType::Epanechnikov, KernelType::Gaussian, KernelType::Box})
        CHECK(kernel_type_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(kernel_type_from_string("triangular"), std::invalid_argument);
}

TEST_CASE("kernel point values match hand arithmetic") {
    // Epanechnikov with bandwidth 2 at the mode: 0.75 / 2 = 3/8.
    CHECK(kernel_eval(Kernel1D(KernelType::Epanechnikov, 2.0), 0.0) == doctest::Approx(0.375));
    CHECK(kernel_eval(Kernel1D(KernelType::Epanechnikov, 2.0), 2.0) == 0.0);
    CHECK(kernel_eval(Kernel1D(KernelType::Epanechnikov, 2.0), -3.0) == 0.0);
    // Epanechnikov at half bandwidth: 0.75 * (1 - 0.25) / 1 = 0.5625.
    CHECK(kernel_eval(Kernel1D(KernelType::Epanechnikov, 1.0), 0.5) == doctest::Approx(0.5625));

    CHECK(kernel_eval(Kernel1D(KernelType::Gaussian, 1.0), 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)));

    CHECK(kernel_eval(Kernel1D(KernelType::Box, 4.0), 3.9) == doctest::Approx(0.125));
    CHECK(kernel_eval(Kernel1D(KernelType::Box, 4.0), 4.0) == doctest::Approx(0.125));
    CHECK(kernel_eval(Kernel1D(KernelType::Box, 4.0), 4.1) == 0.0);

    CHECK_THROWS_AS(Kernel1D(KernelType::Box, 0.0), std::invalid_argument);
}

TEST_CASE("kernels integrate to one") {
    for (auto type : {KernelType::Epanechnikov, KernelType::Gaussian, KernelType::Box}) {
        const Kernel1D k(type, 0.7);
        double integral = 0.0;
        const double step = 1e-4;
        for (double x = -8.0; x < 8.0; x += step)
            integral += kernel_eval(k, x + 0.5 * step) * step;
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("plug-in bandwidth on {0,1,2}") {
    // sd = 1, IQR = 1 so the IQR branch wins: 1.06 * (1/1.34) * 3^(-1/5).
    const double expected = 1.06 * (1.0 / 1.34) * std::pow(3.0, -0.2);
    CHECK(bandwidth_plugin({0.0, 1.0, 2.0}) == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(bandwidth_plugin({1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(bandwidth_plugin({3.0, 3.0, 3.0}), doctest::Contains("degenerate"),
                         std::invalid_argument);
}

TEST_CASE("variable bandwidths floor the k-th neighbor distance") {
    const SpaceTimeWindow w{{0.0, 3.0}, {0.0, 1.0}, {0.0, 1.0}};
    const PointPattern p({{0, 0, 0}, {1, 0, 0.1}, {3, 0, 0.2}}, w);
    const auto bw = bandwidth_variable(p, 1, 0.5);
    REQUIRE(bw.size() == 3);
    CHECK(bw[0] == doctest::Approx(1.0));
    CHECK(bw[1] == doctest::Approx(1.0));
    CHECK(bw[2] == doctest::Approx(2.0));

    const auto floored = bandwidth_variable(p, 1, 1.5);
    CHECK(floored[0] == doctest::Approx(1.5));
    CHECK(floored[2] == doctest::Approx(2.0));

    CHECK_THROWS_AS(bandwidth_variable(p, 3, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bandwidth_variable(p, 1, 0.0), std::invalid_argument);
}

TEST_CASE("product weight behaves as a separable kernel") {
    BandwidthSet b;
    b.sigma_x = 1.0;
    b.sigma_y = 2.0;
    b.sigma_t = 3.0;
    b.eps_space = 1.0;
    b.eps_time = 1.0;

    const double at_zero = product_weight(b, 0.0, 0.0, 0.0);
    CHECK(at_zero > 0.0);
    // Gaussian product decays in every coordinate.
    CHECK(product_weight(b, 0.5, 0.0, 0.0) < at_zero);
    CHECK(product_weight(b, 0.0, 0.5, 0.0) < at_zero);
    CHECK(product_weight(b, 0.0, 0.0, 0.5) < at_zero);
    // Symmetric in the sign of each displacement.
    CHECK(product_weight(b, 0.5, -0.25, 1.0) == doctest::Approx(product_weight(b, -0.5, 0.25, -1.0)));
    // Factorizes: w(dx,dy,dt) * w(0,0,0)^2 == w(dx,0,0) * w(0,dy,0) * w(0,0,dt).
    CHECK(product_weight(b, 0.5, 0.7, 2.0) * at_zero * at_zero ==
          doctest::Approx(product_weight(b, 0.5, 0, 0) * product_weight(b, 0, 0.7, 0) *
                          product_weight(b, 0, 0, 2.0)));

    // A box kernel with huge bandwidths is flat.
    b.weight_kernel = KernelType::Box;
    b.sigma_x = b.sigma_y = b.sigma_t = 1e9;
    CHECK(product_weight(b, 0.3, 0.2, 5.0) == doctest::Approx(product_weight(b, 0, 0, 0)));
}

TEST_CASE("default bandwidths keep positive overrides") {
    const SpaceTimeWindow w{{0.0, 1.0}, {0.0, 1.0}, {0.0, 10.0}};
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i)
        pts.push_back({0.05 * i, 0.3 + 0.01 * i, 0.5 * i});
    const PointPattern p(std::move(pts), w);

    BandwidthSet partial;
    partial.eps_space = 0.123;
    const BandwidthSet full = default_bandwidths(p, partial);
    CHECK(full.eps_space == doctest::Approx(0.123));
    CHECK(full.eps_time > 0.0);
    CHECK(full.sigma_x > 0.0);
    CHECK(full.sigma_y > 0.0);
    CHECK(full.sigma_t > 0.0);
    CHECK_NOTHROW(full.validate());

    BandwidthSet bad;
    bad.eps_space = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

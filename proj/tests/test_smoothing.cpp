#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gradopt/benchmarks.hpp"
#include "gradopt/smoothing.hpp"

using namespace gradopt;

TEST(Smoothing, KernelNames) {
    EXPECT_EQ(parse_kernel("uniform_ball"), SmoothingKernel::UniformBall);
    EXPECT_EQ(parse_kernel("gaussian_unit"), SmoothingKernel::GaussianUnit);
    EXPECT_THROW(parse_kernel("box"), InvalidArgument);
}

TEST(Smoothing, BallSamplesStayInsideUnitBall) {
    KeyedRng rng(3, 0);
    std::vector<double> u(5);
    double mean_sq = 0.0;
    constexpr int n = 20000;
    for (int k = 0; k < n; ++k) {
        sample_kernel(SmoothingKernel::UniformBall, rng, u);
        double s = 0.0;
        for (double v : u) s += v * v;
        EXPECT_LE(s, 1.0 + 1e-12);
        mean_sq += s / n;
    }
    EXPECT_NEAR(mean_sq, kernel_second_moment(SmoothingKernel::UniformBall, 5), 0.01);
    EXPECT_DOUBLE_EQ(kernel_second_moment(SmoothingKernel::UniformBall, 5), 5.0 / 7.0);
    EXPECT_DOUBLE_EQ(kernel_second_moment(SmoothingKernel::GaussianUnit, 5), 5.0);
}

TEST(Smoothing, ZeroDeltaIsExact) {
    const BenchmarkFunction fn(FunctionId::Rastrigin, 4);
    const SmoothingOracle oracle(fn, 0.0, SmoothingKernel::GaussianUnit, 64, 1);
    const std::vector<double> x{0.3, -1.2, 2.2, 0.01};
    EXPECT_EQ(oracle.smoothed_eval(x), fn.eval(x));
    EXPECT_EQ(oracle.smoothed_grad(x), fn.grad(x));
    EXPECT_EQ(oracle.cost_per_call(), 1u);
}

TEST(Smoothing, SphereClosedFormBothKernels) {
    const BenchmarkFunction fn(FunctionId::Sphere, 3);
    const std::vector<double> x{1.0, -2.0, 0.5};
    for (auto k : {SmoothingKernel::GaussianUnit, SmoothingKernel::UniformBall}) {
        const SmoothingOracle oracle(fn, 0.7, k, 200000, 9);
        const double want = sphere_smoothed_closed_form(x, 0.7, k);
        EXPECT_NEAR(oracle.smoothed_eval(x), want, 0.01 * want) << to_string(k);
        // The smoothed gradient of a quadratic is unchanged.
        const auto g = oracle.smoothed_grad(x);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], 2.0 * x[i], 0.02);
    }
}

TEST(Smoothing, RastriginClosedFormMatchesMonteCarlo) {
    for (std::size_t d : {1u, 2u}) {
        const BenchmarkFunction fn(FunctionId::Rastrigin, d);
        std::vector<double> x(d, 0.3);
        for (double delta : {0.1, 0.5, 1.0}) {
            const SmoothingOracle oracle(fn, delta, SmoothingKernel::GaussianUnit, 200000, 17);
            const double want = rastrigin_smoothed_closed_form(x, delta);
            EXPECT_NEAR(oracle.smoothed_eval(x), want, 0.01 * want) << "d=" << d << " delta=" << delta;
            const auto g = oracle.smoothed_grad(x);
            const auto gw = rastrigin_smoothed_closed_form_grad(x, delta);
            // Per-sample gradient std is about 20*pi/sqrt(2) ~ 44, so 2e5 samples give ~0.1.
            for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(g[i], gw[i], 0.5);
        }
    }
}

TEST(Smoothing, ClosedFormGradientMatchesFiniteDifference) {
    const std::vector<double> x{0.3, -0.7, 1.9};
    for (double delta : {0.0, 0.2, 0.8}) {
        const auto g = rastrigin_smoothed_closed_form_grad(x, delta);
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto xp = x, xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            const double fd =
                (rastrigin_smoothed_closed_form(xp, delta) - rastrigin_smoothed_closed_form(xm, delta)) / 2e-6;
            EXPECT_NEAR(g[i], fd, 1e-5);
        }
    }
    // At delta = 0 the closed form is the raw function.
    EXPECT_NEAR(rastrigin_smoothed_closed_form(x, 0.0), eval(BenchmarkFunction(FunctionId::Rastrigin, 3), x), 1e-12);
}

TEST(Smoothing, DeterministicPerSeedAndStream) {
    const BenchmarkFunction fn(FunctionId::Ackley, 6);
    const std::vector<double> x(6, 1.5);
    const SmoothingOracle a(fn, 0.4, SmoothingKernel::GaussianUnit, 10, 99);
    const SmoothingOracle b(fn, 0.4, SmoothingKernel::GaussianUnit, 10, 99);
    std::vector<double> ga(6), gb(6), gc(6);
    a.gradient(x, {0, 5, 12}, ga);
    b.gradient(x, {0, 5, 12}, gb);
    b.gradient(x, {0, 5, 13}, gc);
    EXPECT_EQ(ga, gb);
    EXPECT_NE(ga, gc);
}

TEST(Smoothing, NonFiniteSampleRaises) {
    struct Blowup {
        std::size_t dim() const { return 1; }
        double eval(std::span<const double>) const { return std::numeric_limits<double>::infinity(); }
        void gradient(std::span<const double>, std::span<double> g) const {
            g[0] = std::numeric_limits<double>::quiet_NaN();
        }
    };
    const Blowup f;
    const SmoothingOracle oracle(f, 0.1, SmoothingKernel::GaussianUnit, 4, 0);
    const std::vector<double> x{0.0};
    EXPECT_THROW(oracle.smoothed_eval(x), NumericOverflow);
    EXPECT_THROW(oracle.smoothed_grad(x), NumericOverflow);
}

TEST(Smoothing, RastriginAnchors) {
    // r+(0) = acos(-1 / (20 pi^2)) / (2 pi)
    const double r0 = std::acos(-1.0 / (20.0 * std::numbers::pi * std::numbers::pi)) / (2.0 * std::numbers::pi);
    EXPECT_NEAR(strong_convexity_radius(0.0), r0, 1e-15);
    EXPECT_NEAR(strong_convexity_radius(0.0), 0.2507, 1e-3);
    EXPECT_NEAR(delta_star(), 0.917, 1e-3);
    EXPECT_TRUE(std::isinf(strong_convexity_radius(delta_star() + 1e-6)));
    // Radius grows with delta below the threshold.
    double prev = 0.0;
    for (double d = 0.0; d < delta_star(); d += 0.05) {
        const double r = strong_convexity_radius(d);
        EXPECT_GE(r, prev);
        prev = r;
    }
    // At the threshold the curvature at x = 1/2 vanishes.
    EXPECT_NEAR(rastrigin_1d_curvature(0.5, delta_star()), 0.0, 1e-9);
}

TEST(Smoothing, SigmaNiceRastrigin) {
    const std::vector<double> grid{0.25, 0.2, 0.1, 0.05};
    const auto rep = verify_sigma_nice_rastrigin(grid, 50);
    EXPECT_TRUE(rep.passed);
    EXPECT_GE(rep.sigma, 2.0 - 1e-6);
    ASSERT_EQ(rep.levels.size(), 4u);
    for (const auto& l : rep.levels) {
        EXPECT_TRUE(l.nested);
        EXPECT_TRUE(l.strongly_convex);
    }
    const std::vector<double> bad{0.05, 0.1};
    EXPECT_THROW(verify_sigma_nice_rastrigin(bad, 2), InvalidArgument);
}

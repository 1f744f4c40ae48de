#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gradopt/benchmarks.hpp"
#include "gradopt/random.hpp"

using namespace gradopt;

namespace {

// Independent textbook definitions.
double ref_rastrigin(const std::vector<double>& x) {
    double s = 10.0 * x.size();
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

double ref_ackley(const std::vector<double>& x) {
    double a = 0.0, b = 0.0;
    for (double v : x) {
        a += v * v;
        b += std::cos(2.0 * std::numbers::pi * v);
    }
    const double n = static_cast<double>(x.size());
    return -20.0 * std::exp(-0.2 * std::sqrt(a / n)) - std::exp(b / n) + 20.0 + std::exp(1.0);
}

double ref_griewank(const std::vector<double>& x) {
    double a = 0.0, b = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        a += x[i] * x[i] / 4000.0;
        b *= std::cos(x[i] / std::sqrt(i + 1.0));
    }
    return 1.0 + a - b;
}

double ref_rosenbrock(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    return s;
}

std::vector<double> random_point(std::size_t d, Interval r, KeyedRng& rng) {
    std::vector<double> x(d);
    for (double& v : x) v = rng.uniform(r.lo, r.hi);
    return x;
}

}  // namespace

TEST(Benchmarks, NamesRoundTrip) {
    ASSERT_EQ(kAllFunctions.size(), 16u);
    for (FunctionId id : kAllFunctions) EXPECT_EQ(parse_function_id(to_string(id)), id);
    EXPECT_THROW(parse_function_id("nope"), InvalidArgument);
}

TEST(Benchmarks, MatchesIndependentDefinitions) {
    KeyedRng rng(11, 0);
    for (int k = 0; k < 50; ++k) {
        const auto x = random_point(7, {-5.12, 5.12}, rng);
        EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Rastrigin, 7), x), ref_rastrigin(x), 1e-10);
        EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Ackley, 7), x), ref_ackley(x), 1e-12);
        EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Griewank, 7), x), ref_griewank(x), 1e-12);
        EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Rosenbrock, 7), x), ref_rosenbrock(x), 1e-9);
    }
}

TEST(Benchmarks, KnownValues) {
    const std::vector<double> half(3, 0.5);
    // Each coordinate: 0.25 - 10 cos(pi) + 10 = 20.25
    EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Rastrigin, 3), half), 60.75, 1e-12);
    EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Sphere, 3), half), 0.75, 1e-15);
    EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::Ellipsoid, 3), half), 0.25 * 6.0, 1e-15);
    EXPECT_NEAR(eval(BenchmarkFunction(FunctionId::RotatedHyperEllipsoid, 3), half), 0.25 * 6.0, 1e-15);
    const std::vector<double> y{1.0, -3.0, 2.0};
    EXPECT_DOUBLE_EQ(eval(BenchmarkFunction(FunctionId::Schwefel221, 3), y), 3.0);
    EXPECT_DOUBLE_EQ(eval(BenchmarkFunction(FunctionId::Ellipsoid, 3), y), 1.0 + 18.0 + 12.0);
    EXPECT_DOUBLE_EQ(eval(BenchmarkFunction(FunctionId::RotatedHyperEllipsoid, 3), y), 3.0 + 18.0 + 4.0);
}

TEST(Benchmarks, OptimumPointsAttainOptimumValue) {
    for (FunctionId id : kAllFunctions) {
        for (std::size_t d : {2u, 10u, 50u}) {
            const BenchmarkFunction fn(id, d);
            const auto md = fn.metadata();
            ASSERT_EQ(md.optimum_point.size(), d);
            EXPECT_NEAR(fn.eval(md.optimum_point), md.optimum_value, 1e-9) << to_string(id);
            EXPECT_TRUE(md.range.contains(md.optimum_point[0])) << to_string(id);
        }
    }
}

TEST(Benchmarks, OptimumIsLocallyMinimal) {
    KeyedRng rng(5, 1);
    for (FunctionId id : kAllFunctions) {
        const BenchmarkFunction fn(id, 10);
        const auto md = fn.metadata();
        for (int k = 0; k < 20; ++k) {
            auto x = md.optimum_point;
            for (double& v : x) v += 1e-3 * rng.normal();
            EXPECT_GE(fn.eval(x), md.optimum_value - 1e-9) << to_string(id);
        }
    }
}

TEST(Benchmarks, SchwefelOptimumCoordinate) {
    const auto md = metadata(FunctionId::Schwefel, 5);
    EXPECT_NEAR(md.optimum_point[0], 420.9687, 1e-4);
    EXPECT_NEAR(md.optimum_value, 0.0, 1e-3);
}

TEST(Benchmarks, GradientMatchesFiniteDifferences) {
    for (FunctionId id : kAllFunctions) {
        for (std::size_t d : {2u, 50u}) {
            const BenchmarkFunction fn(id, d);
            const auto md = fn.metadata();
            KeyedRng rng(42, static_cast<std::uint64_t>(id), d);
            for (int k = 0; k < 100; ++k) {
                auto x = random_point(d, md.range, rng);
                const auto g = fn.grad(x);
                double err = 0.0, scale = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
                    auto xp = x, xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    const double fd = (fn.eval(xp) - fn.eval(xm)) / (2.0 * h);
                    err += (fd - g[i]) * (fd - g[i]);
                    scale += g[i] * g[i];
                }
                EXPECT_LE(std::sqrt(err), 1e-4 * std::max(1.0, std::sqrt(scale)))
                    << to_string(id) << " d=" << d << " point " << k;
            }
        }
    }
}

TEST(Benchmarks, SubgradientConventionAtKinks) {
    const std::vector<double> zero(4, 0.0);
    for (FunctionId id : {FunctionId::Alpine1, FunctionId::Schwefel221, FunctionId::Sphere, FunctionId::Ackley}) {
        const auto g = BenchmarkFunction(id, 4).grad(zero);
        for (double v : g) EXPECT_EQ(v, 0.0) << to_string(id);
    }
}

TEST(Benchmarks, DimensionChecks) {
    EXPECT_THROW(BenchmarkFunction(FunctionId::Sphere, 0), InvalidArgument);
    EXPECT_THROW(BenchmarkFunction(FunctionId::Rosenbrock, 1), InvalidArgument);
    EXPECT_THROW(BenchmarkFunction(FunctionId::SchafferF7, 1), InvalidArgument);
    const BenchmarkFunction fn(FunctionId::Sphere, 3);
    const std::vector<double> x(2, 0.0);
    EXPECT_THROW(fn.eval(x), InvalidArgument);
}

TEST(Benchmarks, LearningRateRules) {
    const auto r = LearningRateRule::scaled(0.01);
    EXPECT_DOUBLE_EQ(r(2.0), 0.02);
    EXPECT_DOUBLE_EQ(r(-2.0), 0.02);
    const auto q = LearningRateRule::scaled_pow(50.0);
    EXPECT_NEAR(q(0.1), std::pow(5.0, 0.1), 1e-15);
}

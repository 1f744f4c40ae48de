#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gradopt/schedules.hpp"

using namespace gradopt;

TEST(Schedules, PolynomialTelescopes) {
    for (double p : {0.1, 0.5, 0.9, 1.0}) {
        for (std::size_t M : {10u, 200u, 1000u}) {
            const auto s = NoiseSchedule::polynomial(p, M, 1.0);
            double prod = 1.0;
            for (double g : gammas(s)) prod *= g;
            EXPECT_NEAR(prod, std::pow(static_cast<double>(M), -p), 1e-12) << p << " " << M;
        }
    }
}

TEST(Schedules, PolynomialValues) {
    const auto s = NoiseSchedule::polynomial(1.0, 4, 8.0);
    EXPECT_DOUBLE_EQ(gamma(s, 1), 3.0 / 4.0);
    EXPECT_DOUBLE_EQ(gamma(s, 3), 1.0 / 2.0);
    const auto d = noise_sequence(s);
    ASSERT_EQ(d.size(), 4u);
    // delta_m = delta_1 (M - m + 1)^p / M^p
    for (std::size_t m = 1; m <= 4; ++m) EXPECT_NEAR(d[m - 1], 8.0 * (5.0 - m) / 4.0, 1e-12);
}

TEST(Schedules, GeometricCosineExponential) {
    const auto g = NoiseSchedule::geometric(0.9, 5, 2.0);
    for (double v : gammas(g)) EXPECT_DOUBLE_EQ(v, 0.9);
    EXPECT_NEAR(noise_sequence(g).back(), 2.0 * std::pow(0.9, 4), 1e-15);

    const auto e = NoiseSchedule::exponential(0.3, 5, 1.0);
    for (double v : gammas(e)) EXPECT_DOUBLE_EQ(v, std::exp(-0.3));

    const auto c = NoiseSchedule::cosine(8, 1.0);
    const auto d = noise_sequence(c);
    for (std::size_t m = 0; m + 1 < d.size(); ++m) {
        EXPECT_LT(d[m + 1], d[m]);
        EXPECT_GT(d[m + 1], 0.0);
    }
}

TEST(Schedules, Validation) {
    EXPECT_THROW(gammas(NoiseSchedule::polynomial(0.0, 5, 1.0)), InvalidArgument);
    EXPECT_THROW(gammas(NoiseSchedule::polynomial(1.5, 5, 1.0)), InvalidArgument);
    EXPECT_THROW(gammas(NoiseSchedule::geometric(1.0, 5, 1.0)), InvalidArgument);
    EXPECT_THROW(gammas(NoiseSchedule::polynomial(1.0, 0, 1.0)), InvalidArgument);
    EXPECT_THROW(gammas(NoiseSchedule::polynomial(1.0, 5, 0.0)), InvalidArgument);
    EXPECT_THROW(gamma(NoiseSchedule::polynomial(1.0, 5, 1.0), 5), InvalidArgument);
    EXPECT_THROW(gamma(NoiseSchedule::polynomial(1.0, 5, 1.0), 0), InvalidArgument);
    EXPECT_TRUE(gammas(NoiseSchedule::polynomial(1.0, 1, 1.0)).empty());
    EXPECT_EQ(parse_schedule_kind("cosine"), NoiseSchedule::Kind::Cosine);
    EXPECT_THROW(parse_schedule_kind("linear"), InvalidArgument);
}

TEST(Schedules, FeasibilityBound) {
    // a = m - M - sqrt(2); bound = (sqrt(a^2 - 1) - 1) / (-a)
    const double a = 1.0 - 10.0 - std::sqrt(2.0);
    EXPECT_NEAR(feasibility_lower_bound(1, 10), (std::sqrt(a * a - 1.0) - 1.0) / (-a), 1e-15);
    // The bound shrinks as the last step approaches.
    for (std::size_t M : {10u, 200u}) {
        for (std::size_t m = 1; m + 1 < M; ++m) {
            const double b = feasibility_lower_bound(m, M);
            EXPECT_GT(b, 0.0);
            EXPECT_LT(b, 1.0);
            EXPECT_LT(feasibility_lower_bound(m + 1, M), b);
        }
    }
    // At the final step a = -1 - sqrt(2): bound = (sqrt(2 + 2 sqrt(2)) - 1) / (1 + sqrt(2))
    const double r2 = std::sqrt(2.0);
    EXPECT_NEAR(feasibility_lower_bound(199, 200), (std::sqrt(2.0 + 2.0 * r2) - 1.0) / (1.0 + r2), 1e-12);
}

TEST(Schedules, PolynomialSchedulesAreFeasible) {
    for (double p : {0.1, 0.5, 0.9, 1.0})
        for (std::size_t M : {10u, 200u, 1000u})
            for (bool ok : schedule_feasible(NoiseSchedule::polynomial(p, M, 1.0))) EXPECT_TRUE(ok) << p << " " << M;
}

TEST(Schedules, CosineAndGeometricViolateSomewhere) {
    auto any_false = [](const std::vector<bool>& v) {
        for (bool b : v)
            if (!b) return true;
        return false;
    };
    EXPECT_TRUE(any_false(schedule_feasible(NoiseSchedule::cosine(200, 1.0))));
    for (double c : {0.5, 0.9, 0.95}) EXPECT_TRUE(any_false(schedule_feasible(NoiseSchedule::geometric(c, 200, 1.0))));
}

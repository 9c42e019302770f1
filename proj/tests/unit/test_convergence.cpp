#include <gtest/gtest.h>

#include <cmath>

#include "elastoblow/convergence.hpp"

using namespace elastoblow;

TEST(Convergence, FittedOrderRecoversPowerLaw) {
    const std::vector<double> h{0.1, 0.05, 0.025};
    for (double p : {1.0, 2.0, 3.7}) {
        std::vector<double> e;
        for (double x : h) e.push_back(3.0 * std::pow(x, p));
        EXPECT_NEAR(convergence::fitted_order(h, e), p, 1e-12);
    }
}

TEST(Convergence, RichardsonOrderRecoversPowerLaw) {
    const double h1 = 1.0 / 32, h2 = 1.0 / 48, h3 = 1.0 / 64;
    for (double p : {1.0, 2.0, 4.0}) {
        // u_h = u + C h^p: differences against the finest solution.
        const double e1 = std::pow(h1, p) - std::pow(h3, p);
        const double e2 = std::pow(h2, p) - std::pow(h3, p);
        const auto got = convergence::richardson_order(h1, h2, h3, 2.5 * e1, 2.5 * e2);
        ASSERT_TRUE(got.has_value());
        EXPECT_NEAR(*got, p, 1e-9);
    }
    EXPECT_FALSE(convergence::richardson_order(h1, h2, h3, 0.0, 1.0).has_value());
    EXPECT_FALSE(convergence::richardson_order(h1, h2, h3, 1.0, 1.0).has_value());
}

TEST(Convergence, OrderedEntryFlagsExactAndUndetermined) {
    const std::vector<double> h{0.1, 0.05, 0.025};
    EXPECT_TRUE(convergence::ordered_entry(h, {0.0, 0.0, 0.0}).exact);
    EXPECT_TRUE(convergence::ordered_entry(h, {0.0, 0.0, 0.0}).passes(4));
    const auto mixed = convergence::ordered_entry(h, {1e-3, 0.0, 1e-5});
    EXPECT_FALSE(mixed.exact);
    EXPECT_FALSE(mixed.order.has_value());
    EXPECT_FALSE(mixed.passes(2));
    const auto good = convergence::ordered_entry(h, {4e-2, 1e-2, 2.5e-3});
    EXPECT_NEAR(*good.order, 2.0, 1e-12);
    EXPECT_TRUE(good.passes(2));
    EXPECT_FALSE(good.passes(4));
}

TEST(Convergence, CubicInterpolationIsExactOnCubics) {
    const Grid g({9, 10, 11}, 1.3);
    ScalarField f(g.size());
    auto poly = [](const Vec3& x) {
        return 1.0 + x[0] - 2 * x[1] * x[1] + x[2] * x[2] * x[2] + x[0] * x[1] * x[2] - 0.5 * x[0] * x[0] * x[2];
    };
    for (int k = 0; k < 11; ++k) {
        for (int j = 0; j < 10; ++j) {
            for (int i = 0; i < 9; ++i) f[g.index(i, j, k)] = poly(g.center(i, j, k));
        }
    }
    for (const Vec3 x : {Vec3{0.0, 0.0, 0.0}, Vec3{0.31, -0.77, 1.05}, Vec3{-1.2, 1.1, -1.25}, Vec3{1.29, 0.0, 0.4}}) {
        EXPECT_NEAR(convergence::interpolate_cubic(f, g, x), poly(x), 1e-12);
    }
}

TEST(Convergence, SmoothPulseStudyMeetsDesignOrder) {
    PhysParams p;
    p.A = 0.5;
    StencilConfig sc;
    RunConfig rc = RunConfig::defaults_for(p);
    rc.t_end = 0.2;
    rc.output_stride = 1000;
    const double hw = 2.4;
    const auto study = convergence::run_study(p, hw, sc, rc, {32, 48, 64}, [&](const PhysParams& pp, const Grid& g) {
        return initdata::make_bump({0.05, 0.05, 0.05}, pp, g);
    });
    ASSERT_EQ(study.runs.size(), 3u);
    for (const auto& r : study.runs) EXPECT_EQ(r.status, RunStatus::Completed);
    ASSERT_TRUE(study.solution.order.has_value());
    EXPECT_GE(*study.solution.order, 1.5);
    ASSERT_TRUE(study.div_residual.order.has_value());
    EXPECT_GE(*study.div_residual.order, 1.5);
}

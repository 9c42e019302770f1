#include <gtest/gtest.h>

#include <cmath>

#include "elastoblow/eos.hpp"

using namespace elastoblow;

namespace {

auto params(double A, double gamma, double rho_bar = 1.0) -> PhysParams {
    PhysParams p;
    p.A = A;
    p.gamma = gamma;
    p.rho_bar = rho_bar;
    return p;
}

} // namespace

TEST(Eos, PressureValues) {
    EXPECT_EQ(eos::pressure(0.0, params(1, 2)), 0.0);
    EXPECT_EQ(eos::pressure(1.0, params(1, 2)), 1.0);
    // Oracle through exp/log rather than pow.
    const double expected = 1.5 * std::exp(1.4 * std::log(2.0));
    EXPECT_NEAR(eos::pressure(2.0, params(1.5, 1.4)), expected, 1e-13);
    EXPECT_NEAR(expected, 3.9585237323186826, 1e-15);
}

TEST(Eos, NegativeDensityIsDegenerate) {
    try {
        (void)eos::pressure(-1e-3, params(1, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateDensity);
    }
    EXPECT_THROW((void)eos::p_hat(0.0, params(1, 2)), Error);
}

TEST(Eos, PHatValues) {
    EXPECT_DOUBLE_EQ(eos::p_hat(1.0, params(1, 2)), 2.0);
    const PhysParams p = params(1, 2);
    const double s = eos::sound_speed_inf(p);
    EXPECT_NEAR((p.gamma - 1.0) * eos::p_hat(p.rho_bar, p), s * s, 1e-14);
}

TEST(Eos, SoundSpeedAtInfinity) {
    EXPECT_NEAR(eos::sound_speed_inf(params(1, 2)), 1.4142135624, 1e-10);
    for (double g : {1.1, 1.4, 2.0, 3.0}) {
        EXPECT_NEAR(eos::sound_speed_inf(params(1.0 / g, g)), 1.0, 1e-15);
    }
    const double expected = std::sqrt(2.8 * std::exp(0.4 * std::log(0.5)));
    EXPECT_NEAR(eos::sound_speed_inf(params(2, 1.4, 0.5)), expected, 1e-14);
    EXPECT_NEAR(expected, 1.4567097147731793, 1e-15);
}

TEST(Eos, PressureIsIncreasing) {
    const PhysParams p = params(0.7, 1.6);
    double prev = eos::pressure(1e-3, p);
    for (double r = 2e-3; r < 10.0; r *= 1.07) {
        const double cur = eos::pressure(r, p);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(Eos, PHatIsTheEnthalpy) {
    // rho d(P_hat)/drho = dP/drho, checked with central differences.
    for (const PhysParams& p : {params(1, 2), params(1.5, 1.4), params(0.3, 3.0, 2.0)}) {
        for (double r : {0.3, 1.0, 2.5}) {
            const double h = 1e-6 * r;
            const double dphat = (eos::p_hat(r + h, p) - eos::p_hat(r - h, p)) / (2 * h);
            const double dP = (eos::pressure(r + h, p) - eos::pressure(r - h, p)) / (2 * h);
            EXPECT_NEAR(r * dphat / dP, 1.0, 1e-6);
            EXPECT_NEAR(eos::sound_speed_sq(r, p) / dP, 1.0, 1e-6);
        }
    }
}

TEST(Eos, SigmaSquaredIsDpDrhoAtBackground) {
    const PhysParams p = params(2, 1.4, 0.5);
    const double h = 1e-6 * p.rho_bar;
    const double dP = (eos::pressure(p.rho_bar + h, p) - eos::pressure(p.rho_bar - h, p)) / (2 * h);
    const double s = eos::sound_speed_inf(p);
    EXPECT_NEAR(s * s / dP, 1.0, 1e-6);
}

TEST(Eos, EvaluateBundlesPositiveQuantities) {
    const auto q = eos::evaluate(1.3, params(1, 2));
    EXPECT_GT(q.P, 0.0);
    EXPECT_GT(q.P0, 0.0);
    EXPECT_GT(q.P_hat, 0.0);
    EXPECT_GT(q.sigma, 0.0);
    EXPECT_DOUBLE_EQ(q.P0, 1.0);
}

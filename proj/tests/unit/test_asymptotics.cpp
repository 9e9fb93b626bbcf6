#include <cmath>

#include <gtest/gtest.h>

#include "ibdwaves/asymptotics.hpp"
#include "ibdwaves/errors.hpp"
#include "ibdwaves/scalarwaves.hpp"

using namespace ibdwaves;

namespace {
ModelParams unit(double sigma, double delta = 0.05, double D = 1.0) {
    return ModelParams::from_sigma(sigma, delta, D);
}
}  // namespace

TEST(VstarAsym, SmallSigmaExample) {
    EXPECT_NEAR(vstar_asym(unit(0.1), AsymBranch::SmallSigma), 0.017408, 5e-6);
}

TEST(VstarAsym, NearOneExample) {
    EXPECT_NEAR(vstar_asym(unit(0.9), AsymBranch::NearOne), 0.41042, 5e-5);
}

TEST(VstarAsym, NearOneMeetsCubicFisherAtOne) {
    const auto p = unit(1.0);
    EXPECT_NEAR(vstar_asym(p, AsymBranch::NearOne), cubic_fisher_speed(p), 1e-15);
    EXPECT_NEAR(cubic_fisher_speed(p), 0.5, 1e-15);
    EXPECT_THROW(vstar_asym(unit(1.2), AsymBranch::NearOne), DomainError);
}

TEST(FamilySpeeds, ClosedForms) {
    EXPECT_NEAR(uptw_min_speed(unit(4.0)), 2.0 * std::sqrt(0.6), 1e-14);
    EXPECT_NEAR(uptw_min_speed(unit(1.25)), std::sqrt(8.0 / 9.0) * 0.75, 1e-14);
    // D = 4 compensates beta1 = 1/4 so that the example value 2 sqrt(3)/sqrt(0.05) is reproduced
    EXPECT_NEAR(lptw_min_speed(unit(4.0, 0.05, 4.0)), 2.0 * std::sqrt(3.0) / std::sqrt(0.05), 1e-11);
    EXPECT_NEAR(lptw_min_speed(unit(4.0)), std::sqrt(3.0) / std::sqrt(0.05), 1e-11);
    EXPECT_NEAR(mvp4_min_speed(2.0), 2.0, 0.0);
    EXPECT_NEAR(mvp4_min_speed(1.25), std::sqrt(0.5) + 1.0 / std::sqrt(0.5), 1e-14);
}

TEST(FamilySpeeds, PopulatesOnlyExistingFamilies) {
    const auto hi = family_min_speeds(unit(4.0, 0.05, 4.0));
    EXPECT_FALSE(hi.fptw);
    ASSERT_TRUE(hi.uptw && hi.lptw);
    EXPECT_NEAR(*hi.uptw, 1.5492, 1e-4);
    EXPECT_NEAR(*hi.lptw, 15.492, 1e-3);
    EXPECT_NEAR(*hi.lptw / *hi.uptw, 10.0, 1e-9);

    const auto one = family_min_speeds(unit(1.0));
    ASSERT_TRUE(one.fptw);
    EXPECT_FALSE(one.fptw_numeric);
    EXPECT_NEAR(*one.fptw, 0.5, 1e-15);
    EXPECT_FALSE(one.uptw || one.lptw);

    const auto lo = family_min_speeds(unit(0.5));
    ASSERT_TRUE(lo.fptw);
    EXPECT_TRUE(lo.fptw_numeric);
}

TEST(FamilySpeeds, BelowThreeHalvesUsesFirstFormula) {
    const auto p = unit(1.4);
    const double b = p.b();
    EXPECT_NEAR(uptw_min_speed(p), std::sqrt(2 * b) * 0.9, 1e-14);
    EXPECT_GT(std::abs(uptw_min_speed(p) - 2 * std::sqrt(b * 0.4)), 1e-3);
}

TEST(FamilySpeeds, PiecewiseContinuityAtThreeHalves) {
    const auto p = unit(1.5);
    const double b = p.b();
    EXPECT_NEAR(std::sqrt(2 * b) * 1.0, 2 * std::sqrt(b * 0.5), 4e-16);
    const auto below = unit(std::nextafter(1.5, 0.0));
    EXPECT_NEAR(uptw_min_speed(below), uptw_min_speed(p), 1e-15);
}

TEST(FamilySpeeds, ContinuityAcrossSigmaOne) {
    const double target = cubic_fisher_speed(unit(1.0));
    double prev_gap = INFINITY;
    for (double e : {0.1, 0.01}) {
        const double left = vstar_asym(unit(1.0 - e), AsymBranch::NearOne);
        const double right = uptw_min_speed(unit(1.0 + e));
        const double gap = std::max(std::abs(left - target), std::abs(right - target));
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 0.02);
}

TEST(BestVstar, BranchSelection) {
    EXPECT_EQ(best_vstar(unit(0.2)), vstar_asym(unit(0.2), AsymBranch::SmallSigma));
    EXPECT_EQ(best_vstar(unit(0.8)), vstar_asym(unit(0.8), AsymBranch::NearOne));
    EXPECT_NEAR(best_vstar(unit(0.5)), solve_mvp1_speed(unit(0.5)).speed, 1e-12);
}

TEST(AppendixC, LeadingPhasePath) {
    EXPECT_EQ(appendix_c_leading(0.0), 0.0);
    EXPECT_NEAR(appendix_c_leading(1.0), -kV0, 1e-15);
    EXPECT_NEAR(appendix_c_leading(0.5), -0.40825, 5e-6);
    EXPECT_THROW(appendix_c_leading(1.5), DomainError);
}

TEST(AppendixC, LeadingPathSolvesLimitEquation) {
    // Y dY/dX = X (1 - X) in the sigma -> 0 limit
    for (double X = 0.05; X < 1.0; X += 0.05) {
        const double h = 1e-6;
        const double dY = (appendix_c_leading(X + h) - appendix_c_leading(X - h)) / (2 * h);
        EXPECT_NEAR(appendix_c_leading(X) * dY, X * (1 - X), 1e-8);
    }
}

TEST(AppendixC, RescaledSpeedTendsToV0) {
    const double V = small_sigma_rescaled_speed(0.02);
    EXPECT_NEAR(V / kV0, 1.0, 0.03);
    EXPECT_LT(std::abs(small_sigma_rescaled_speed(0.01) - kV0), std::abs(small_sigma_rescaled_speed(0.1) - kV0));
}

TEST(AppendixC, RescaledSpeedMatchesShooting) {
    // v* = sigma^{3/2} V sqrt(b) when the rescaled problem is posed with unit b
    for (double s : {0.05, 0.1}) {
        const auto p = unit(s, 0.01);
        const double v = solve_mvp1_speed(p).speed;
        EXPECT_NEAR(v / (std::sqrt(p.b()) * s * std::sqrt(s) * small_sigma_rescaled_speed(s)), 1.0, 0.05);
    }
}

TEST(TailRates, Families) {
    const auto t3 = tail_rates(TailFamily::LowerRescaled, 2.0, unit(4.0));
    EXPECT_NEAR(t3.right_slow, 1.0, 1e-15);
    EXPECT_TRUE(t3.right_double_root);

    const auto p1 = unit(1.0);
    const auto t2 = tail_rates(TailFamily::CubicFisher, 0.7, p1);
    EXPECT_TRUE(t2.right_algebraic);
    const auto t2m = tail_rates(TailFamily::CubicFisher, 0.5, p1);
    EXPECT_FALSE(t2m.right_algebraic);
    EXPECT_NEAR(t2m.right_slow, 0.5, 1e-15);

    const auto t1 = tail_rates(TailFamily::CutoffFPTW, 0.3, unit(0.75));
    EXPECT_EQ(t1.right_slow, 0.3);
    EXPECT_GT(t1.left_growth, 0.0);

    EXPECT_THROW(tail_rates(TailFamily::LowerRescaled, 1.5, unit(4.0)), DomainError);
    EXPECT_THROW(tail_rates(TailFamily::UpperRescaled, 1.9, unit(1.25)), DomainError);
}

TEST(TailRates, UpperRatesSolveCharacteristicEquation) {
    for (double V : {2.2, 3.0}) {
        const auto t = tail_rates(TailFamily::UpperRescaled, V, unit(1.25));
        for (double r : {t.right_slow, t.right_fast}) EXPECT_NEAR(r * r - V * r + 1.0, 0.0, 1e-12);
    }
}

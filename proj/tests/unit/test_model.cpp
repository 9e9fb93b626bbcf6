#include <cmath>

#include <gtest/gtest.h>

#include "ibdwaves/errors.hpp"
#include "ibdwaves/model.hpp"

using namespace ibdwaves;

namespace {

ModelParams unit(double sigma, double delta = 0.05) { return ModelParams::from_sigma(sigma, delta); }

}  // namespace

TEST(ModelParams, RejectsNonPositive) {
    EXPECT_THROW(ModelParams(0.0, 1.0, 1.0, 0.05), ParameterError);
    EXPECT_THROW(ModelParams(1.0, -1.0, 1.0, 0.05), ParameterError);
    EXPECT_THROW(ModelParams(1.0, 1.0, 1.0, NAN), ParameterError);
}

TEST(ModelParams, SigmaBelowDeltaRejected) {
    EXPECT_THROW(ModelParams::from_sigma(0.01, 0.05), ParameterError);
    EXPECT_NO_THROW(ModelParams::from_sigma(0.05, 0.05));
}

TEST(ModelParams, FastRegimeRequiresEpsilonBelowDelta) {
    EXPECT_THROW(unit(1.0, 0.05).with_epsilon(0.1).require_fast_regime(), ParameterError);
    EXPECT_NO_THROW(unit(1.0, 0.05).with_epsilon(1e-3).require_fast_regime());
}

TEST(ModelParams, WithSigmaAdjustsBeta1Only) {
    const ModelParams p(2.0, 1.0, 0.5, 0.05);
    const auto q = p.with_sigma(0.5);
    EXPECT_DOUBLE_EQ(q.sigma(), 0.5);
    EXPECT_DOUBLE_EQ(q.alpha2(), 2.0);
    EXPECT_DOUBLE_EQ(q.beta2(), 0.5);
}

TEST(ModelParams, ProductIdentityOnGrid) {
    for (double a2 : {0.3, 1.0, 2.5})
        for (double b1 : {0.2, 1.0, 4.0})
            for (double b2 : {0.5, 1.0, 3.0}) {
                const ModelParams p(a2, b1, b2, 0.01);
                if (p.sigma() < p.delta()) continue;
                EXPECT_NEAR(p.a() * p.b(), b1 * b2, 1e-14 * b1 * b2);
            }
}

TEST(ModelParams, BDecreasingAndBounded) {
    double prev = INFINITY;
    for (double s = 0.1; s < 6.0; s += 0.1) {
        const auto p = unit(s);
        EXPECT_GT(p.b(), 0.0);
        EXPECT_LT(p.b(), p.beta2() / p.alpha2());
        EXPECT_LT(p.b(), prev);
        prev = p.b();
    }
}

TEST(DerivedCoeffs, OptionalFields) {
    const auto lo = derived_coeffs(unit(0.75), 0.3);
    EXPECT_TRUE(lo.c_transition.has_value());
    const auto hi = derived_coeffs(unit(4.0));
    EXPECT_FALSE(hi.c_transition.has_value());
    EXPECT_TRUE(hi.gamma_sigma.has_value());
}

TEST(ReactionLds, HandExample) {
    const auto r = reaction_lds(0.5, 0.5, unit(1.0));
    EXPECT_NEAR(r.F_I, -5.0, 1e-12);
    EXPECT_NEAR(r.F_M, 0.125, 1e-15);
}

TEST(ReactionLds, VanishesAtOriginAndFullState) {
    for (double s : {0.3, 1.0, 4.0}) {
        const auto p = unit(s);
        auto r = reaction_lds(0.0, 0.0, p);
        EXPECT_EQ(r.F_M, 0.0);
        EXPECT_EQ(r.F_I, 0.0);
        r = reaction_lds(1.0, p.b() * s, p);
        EXPECT_NEAR(r.F_M, 0.0, 1e-14);
        EXPECT_NEAR(r.F_I, 0.0, 1e-12);
    }
}

TEST(ReactionLds, VanishesAtEveryEquilibrium) {
    for (double s : {0.3, 0.75, 1.0, 1.25, 4.0}) {
        const auto p = unit(s);
        for (const auto& e : equilibria(p)) {
            const auto r = reaction_lds(e.m, e.i, p);
            EXPECT_NEAR(r.F_M, 0.0, 1e-13) << "sigma " << s << " m " << e.m;
            EXPECT_NEAR(r.F_I, 0.0, 1e-12) << "sigma " << s << " m " << e.m;
        }
    }
}

TEST(ReactionLds, CornerIsSingular) {
    EXPECT_THROW(reaction_lds(1.0, 0.0, unit(0.5)), SingularityError);
    EXPECT_THROW(reaction_lds(1.2, 0.0, unit(0.5)), DomainError);
}

TEST(ImmuneReaction, SignMatchesSlowManifold) {
    for (double s : {0.5, 1.0, 2.0}) {
        const auto p = unit(s);
        for (int a = 0; a <= 20; ++a)
            for (int c = 1; c <= 20; ++c) {
                const double M = 0.049 * a, I = 0.05 * c;
                const double S = slow_manifold_S(M, p);
                if (std::abs(I - S) < 1e-9) continue;
                const double f = immune_reaction(M, I, p);
                EXPECT_EQ(f > 0.0, I < S) << "s " << s << " M " << M << " I " << I;
            }
    }
}

TEST(ReactionRds, HandExample) {
    const ModelParams p(1.0, 1.0, 1.0, 0.1, 1.0, 0.01);
    const auto r = reaction_rds({0.0, 0.5, 0.5, 0.5}, p);
    EXPECT_NEAR(r[0], 0.0, 1e-15);
    EXPECT_NEAR(r[1], -2.5, 1e-12);
    EXPECT_NEAR(r[2], -25.0, 1e-11);
    EXPECT_NEAR(r[3], 0.0, 1e-12);
}

TEST(ReactionRds, SlowManifoldIsStationaryInFastVariables) {
    const ModelParams p(1.0, 1.0, 1.0, 0.1, 1.0, 0.01);
    for (double M : {0.1, 0.4, 0.8})
        for (double I : {0.2, 0.6}) {
            const double B = slow_manifold_B(M, I, p);
            const auto r = reaction_rds({M, I, B, B}, p);
            EXPECT_NEAR(r[2], 0.0, 1e-11);
            EXPECT_NEAR(r[3], 0.0, 1e-11);
        }
    const auto z = reaction_rds({0, 0, 0, 0}, p);
    for (double v : z) EXPECT_EQ(v, 0.0);
}

TEST(SlowManifoldB, Examples) {
    const auto p = unit(1.0);
    EXPECT_DOUBLE_EQ(slow_manifold_B(0.5, 0.5, p), 0.5);
    EXPECT_DOUBLE_EQ(slow_manifold_B(0.3, 0.0, p), 0.0);
    EXPECT_DOUBLE_EQ(slow_manifold_B(1.0, 0.4, p), 1.0);
}

TEST(SlowManifoldB, RangeAndMonotone) {
    const ModelParams p(0.7, 1.3, 2.0, 0.05);
    for (int a = 0; a < 10; ++a)
        for (int c = 0; c < 10; ++c) {
            const double M = 0.1 * a, I = 0.1 * c + 0.05;
            const double B = slow_manifold_B(M, I, p);
            EXPECT_GE(B, 0.0);
            EXPECT_LE(B, 1.0);
            EXPECT_LT(B, slow_manifold_B(M, I + 0.04, p) + 1e-15);
            EXPECT_LT(B, slow_manifold_B(M + 0.05, I, p) + 1e-15);
        }
}

TEST(CutoffReaction, Examples) {
    const auto p = unit(0.75);
    EXPECT_EQ(cutoff_reaction(0.25, 0.75, p), 0.0);
    EXPECT_EQ(cutoff_reaction(1.0, 0.75, p), 0.0);
    EXPECT_NEAR(cutoff_reaction(0.5, 0.75, p), 1.0 / 28.0, 1e-15);
    EXPECT_THROW(cutoff_reaction(0.5, 1.5, p), DomainError);
}

TEST(CutoffReaction, ZeroBelowCutAndLipschitz) {
    const auto p = unit(0.4);
    double prev = cutoff_reaction(0.0, 0.4, p);
    for (int k = 1; k <= 1000; ++k) {
        const double X = k / 1000.0;
        const double v = cutoff_reaction(X, 0.4, p);
        if (X <= 0.6) {
            EXPECT_EQ(v, 0.0);
        }
        EXPECT_LE(std::abs(v - prev), 1.0 / 1000.0);
        prev = v;
    }
}

TEST(SlowManifoldS, Examples) {
    EXPECT_EQ(slow_manifold_S(0.0, unit(0.5)), 0.0);
    const auto p = unit(1.25);
    EXPECT_NEAR(slow_manifold_S(0.5, p), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(slow_manifold_S(1.0, p), p.b() * 1.25, 1e-15);
}

TEST(Equilibria, Classification) {
    EXPECT_EQ(continuum_equilibrium(0.2, unit(0.5)).stability, Stability::DegenerateStableNode);
    EXPECT_EQ(continuum_equilibrium(0.5, unit(0.5)).stability, Stability::DegenerateTransition);
    EXPECT_EQ(continuum_equilibrium(0.7, unit(0.5)).stability, Stability::DegenerateUnstableNode);
    EXPECT_THROW(continuum_equilibrium(0.99, unit(0.5)), DomainError);

    const auto p = unit(4.0);
    const auto eT = transitional_equilibrium(p);
    ASSERT_TRUE(eT.has_value());
    EXPECT_NEAR(eT->i, 0.6, 1e-15);
    EXPECT_EQ(eT->stability, Stability::HyperbolicSaddle);
    const auto eF = full_equilibrium(p);
    EXPECT_NEAR(eF.i, 0.8, 1e-15);
    EXPECT_EQ(eF.stability, Stability::HyperbolicStableNode);
    EXPECT_FALSE(transitional_equilibrium(unit(0.9)).has_value());
}

TEST(Equilibria, ContinuumPointsSitOnAxis) {
    for (double s : {0.3, 0.9, 2.0}) {
        for (const auto& e : equilibria(unit(s))) {
            if (e.kind != EquilibriumKind::ContinuumE) continue;
            EXPECT_EQ(e.i, 0.0);
            EXPECT_GE(e.m, 0.0);
            EXPECT_LE(e.m, 1.0 - 0.05);
        }
    }
}

TEST(ClippedRectangle, MembershipAndProjection) {
    const double d = 0.05;
    EXPECT_TRUE(in_clipped_rectangle(0.5, 0.5, d));
    EXPECT_TRUE(in_clipped_rectangle(1.0, 0.06, d));
    EXPECT_FALSE(in_clipped_rectangle(1.0, 0.01, d));
    EXPECT_FALSE(in_clipped_rectangle(-0.1, 0.5, d));

    double M = 1.0, I = 0.0;
    EXPECT_TRUE(project_to_clipped_rectangle(M, I, d));
    EXPECT_TRUE(in_clipped_rectangle(M, I, d, 1e-15));
    EXPECT_NEAR(I, M - (1.0 - d), 1e-15);

    M = 0.4;
    I = 0.3;
    EXPECT_FALSE(project_to_clipped_rectangle(M, I, d));
    EXPECT_EQ(M, 0.4);
}

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "ibdwaves/asymptotics.hpp"
#include "ibdwaves/errors.hpp"
#include "ibdwaves/evolution.hpp"
#include "ibdwaves/integrate.hpp"
#include "ibdwaves/scalarwaves.hpp"

using namespace ibdwaves;

namespace {

ModelParams unit(double sigma, double delta = 0.05, double D = 1.0) {
    return ModelParams::from_sigma(sigma, delta, D);
}

double sup_abs(const std::vector<double>& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> times(double t0, double t1, int n) {
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) out.push_back(t0 + (t1 - t0) * k / n);
    return out;
}

}  // namespace

TEST(Grid, Validation) {
    EXPECT_THROW(Grid1D(1.0, 0.0, 10), ParameterError);
    EXPECT_THROW(Grid1D(0.0, 1.0, 2), ParameterError);
    const Grid1D g(-1.0, 1.0, 201);
    EXPECT_NEAR(g.dx(), 0.01, 1e-15);
    EXPECT_NEAR(g.x(200), 1.0, 1e-14);
}

TEST(Initial, HeavisideRamp) {
    const auto p = unit(0.75);
    const Grid1D g(-1.0, 1.0, 21);
    const auto s = heaviside_initial(g, 0.5, 0.4, p);
    EXPECT_EQ(s.fields.size(), 2u);
    EXPECT_EQ(s.M().front(), 0.5);
    EXPECT_EQ(s.I().back(), 0.0);
    EXPECT_NEAR(s.M()[10], 0.25, 1e-12);  // x = 0 sits mid-ramp
    EXPECT_THROW(heaviside_initial(g, 1.0, 0.0, p), DomainError);

    const auto p4 = p.with_epsilon(1e-3);
    const auto f = heaviside_initial(g, 0.5, 0.4, p4, true);
    ASSERT_EQ(f.fields.size(), 4u);
    EXPECT_NEAR(f.fields[kRho][0], slow_manifold_B(0.5, 0.4, p4), 1e-15);
    const auto d = heaviside_initial(g, 0.5, 0.4, p4, true, 0.2, 0.3);
    EXPECT_NEAR(d.fields[kB][0], 0.3, 1e-15);
}

TEST(SimulateLds, StabilityLimits) {
    const auto p = unit(0.75);
    const auto s = heaviside_initial(Grid1D(-5, 5, 101), 0.5, 0.5, p);
    SimOptions o;
    o.dt = p.delta() / 5;
    EXPECT_THROW(simulate_lds(s, p, 1.0, o), CflViolation);
    o.scheme = Scheme::Explicit;
    o.dt = 0.01;  // dx^2/2 = 0.005
    EXPECT_THROW(simulate_lds(s, p, 1.0, o), CflViolation);
    FieldState bad = s;
    bad.fields.resize(1);
    EXPECT_THROW(simulate_lds(bad, p, 1.0), ParameterError);
}

TEST(SimulateLds, SnapshotsAtRequestedTimes) {
    const auto p = unit(0.75);
    const auto s = heaviside_initial(Grid1D(-5, 5, 101), 0.5, 0.5, p);
    SimOptions o;
    o.output_times = {0.013, 0.5, 1.0};
    const auto r = simulate_lds(s, p, 1.2, o);
    ASSERT_EQ(r.snapshots.size(), 4u);
    EXPECT_DOUBLE_EQ(r.snapshots[0].t, 0.013);
    EXPECT_DOUBLE_EQ(r.snapshots.back().t, 1.2);
}

TEST(SimulateLds, ImexAndExplicitAgree) {
    const auto p = unit(0.75);
    const auto s = heaviside_initial(Grid1D(-5, 5, 101), 0.5, 0.5, p);
    SimOptions o;
    o.dt = 5e-5;
    const auto a = simulate_lds(s, p, 1.0, o).snapshots.back();
    o.scheme = Scheme::Explicit;
    const auto b = simulate_lds(s, p, 1.0, o).snapshots.back();
    for (std::size_t j = 0; j < a.grid.n; ++j) {
        EXPECT_NEAR(a.M()[j], b.M()[j], 2e-3);
        EXPECT_NEAR(a.I()[j], b.I()[j], 2e-3);
    }
}

TEST(SimulateLds, ContainmentWithoutProjection) {
    for (double s : {0.75, 1.0, 4.0}) {
        const auto p = unit(s);
        const auto init = heaviside_initial(Grid1D(-10, 30, 801), 0.5, 0.5, p);
        SimOptions o;
        o.output_times = times(0.0, 10.0, 20);
        const auto r = simulate_lds(init, p, 10.0, o);
        EXPECT_EQ(r.projection_events, 0u) << s;
        for (const auto& snap : r.snapshots)
            for (std::size_t j = 0; j < snap.grid.n; ++j)
                EXPECT_TRUE(in_clipped_rectangle(snap.M()[j], snap.I()[j], p.delta(), 1e-8));
    }
}

TEST(SimulateLds, FarFieldFollowsTemporalSystem) {
    const auto p = unit(0.75);
    const auto init = heaviside_initial(Grid1D(-40, 20, 601), 0.5, 0.5, p);
    SimOptions o;
    o.output_times = {1.0, 3.0};
    const auto r = simulate_lds(init, p, 3.0, o);
    const auto ode = solve_temporal_ds(0.5, 0.5, p, 3.0);
    for (const auto& snap : r.snapshots) {
        const auto y = ode.sample(snap.t);
        EXPECT_NEAR(snap.M().front(), y[0], 2e-3);
        EXPECT_NEAR(snap.I().front(), y[1], 2e-3);
    }
}

TEST(SimulateLds, ComparisonOrdering) {
    const auto p = unit(0.75);
    const Grid1D g(-10, 30, 401);
    const std::array<std::pair<std::array<double, 2>, std::array<double, 2>>, 3> pairs{{
        {{0.3, 0.3}, {0.5, 0.3}},
        {{0.5, 0.2}, {0.5, 0.6}},
        {{0.1, 0.1}, {0.8, 0.9}},
    }};
    for (const auto& [lo, hi] : pairs) {
        SimOptions o;
        o.output_times = times(0.0, 5.0, 10);
        const auto a = simulate_lds(heaviside_initial(g, lo[0], lo[1], p), p, 5.0, o);
        const auto b = simulate_lds(heaviside_initial(g, hi[0], hi[1], p), p, 5.0, o);
        for (std::size_t k = 0; k < a.snapshots.size(); ++k)
            for (std::size_t j = 0; j < g.n; ++j) {
                EXPECT_LE(a.snapshots[k].M()[j], b.snapshots[k].M()[j] + 1e-10);
                EXPECT_LE(a.snapshots[k].I()[j], b.snapshots[k].I()[j] + 1e-10);
            }
    }
}

TEST(SimulateLds, BelowThresholdImmuneFieldDecays) {
    const auto p = unit(0.75, 0.01);
    const auto init = heaviside_initial(Grid1D(-10, 10, 401), 0.1, 0.5, p);
    SimOptions o;
    o.output_times = times(0.0, 100 * p.delta(), 100);
    const auto r = simulate_lds(init, p, 100 * p.delta(), o);
    double prev = 1.0;
    for (const auto& s : r.snapshots) {
        const double sup = sup_abs(s.I());
        EXPECT_LE(sup, prev + 1e-15);
        prev = sup;
    }
    EXPECT_LT(prev, 1e-6);
    EXPECT_LT(sup_abs(r.snapshots.back().M()), 0.1 * (1.0 + p.delta()));
}

TEST(SimulateLds, CubicFisherFrontSpeed) {
    const auto p = unit(1.0);
    const auto init = heaviside_initial(Grid1D(-10, 110, 1201), 0.5, 0.5, p);
    SimOptions o;
    o.output_times = times(0.0, 150.0, 150);
    const auto r = simulate_lds(init, p, 150.0, o);
    const double v = track_front(r.snapshots, kM, 0.5).fitted_speed;
    EXPECT_LT(v, 0.5 * 1.05);
    EXPECT_GT(v, 0.5 * 0.98);
}

TEST(SimulateLds, FrontSpeedGridConvergence) {
    const auto p = unit(1.0);
    auto speed = [&](std::size_t n) {
        const auto init = heaviside_initial(Grid1D(-10, 70, n), 0.5, 0.5, p);
        SimOptions o;
        o.output_times = times(0.0, 100.0, 100);
        return track_front(simulate_lds(init, p, 100.0, o).snapshots, kM, 0.5).fitted_speed;
    };
    const double a = speed(801), b = speed(1601);
    EXPECT_LT(std::abs(a - b) / b, 0.01);
}

TEST(SimulateRds, ManifoldStartStaysClose) {
    const auto p = ModelParams::from_sigma(0.75, 0.05).with_epsilon(1e-3);
    const auto init = heaviside_initial(Grid1D(-10, 20, 301), 0.5, 0.5, p, true);
    SimOptions o;
    o.output_times = times(0.0, 2.0, 10);
    const auto r = simulate_rds(init, p, 2.0, o);
    for (const auto& s : r.snapshots)
        for (std::size_t j = 0; j < s.grid.n; ++j) {
            const double M = s.fields[kM][j], I = s.fields[kI][j];
            if (M > 0.95 && I < 0.05) continue;
            const double Bi = slow_manifold_B(M, I, p);
            EXPECT_LE(std::abs(s.fields[kRho][j] - Bi), 10 * p.epsilon());
            EXPECT_LE(std::abs(s.fields[kB][j] - Bi), 10 * p.epsilon());
        }
}

TEST(SimulateRds, DisplacedStartRelaxes) {
    const auto p = ModelParams::from_sigma(0.75, 0.05).with_epsilon(1e-3);
    const Grid1D g(-5, 5, 51);
    // (M, I) on S_delta, so the slow variables do not drag the manifold along
    auto init = heaviside_initial(g, 0.5, slow_manifold_S(0.5, p), p, true);
    for (std::size_t j = 0; j < g.n; ++j) {
        init.fields[kRho][j] = std::min(1.0, init.fields[kRho][j] + 0.2);
        init.fields[kB][j] = std::min(1.0, init.fields[kB][j] + 0.2);
    }
    SimOptions o;
    o.dt = p.epsilon() / 20;
    const auto r = simulate_rds(init, p, 10 * p.epsilon(), o);
    const auto& s = r.snapshots.back();
    for (std::size_t j = 0; j < g.n; ++j) {
        if (std::abs(g.x(j)) < 1.0) continue;  // the one-cell ramp diffuses on its own scale
        const double Bi = slow_manifold_B(s.fields[kM][j], s.fields[kI][j], p);
        EXPECT_LT(std::abs(s.fields[kRho][j] - Bi), p.epsilon());
        EXPECT_LT(std::abs(s.fields[kB][j] - Bi), p.epsilon());
    }
}

TEST(SimulateRds, RequiresFastRegime) {
    const auto p = ModelParams::from_sigma(0.75, 0.05).with_epsilon(0.1);
    const auto init = heaviside_initial(Grid1D(-5, 5, 51), 0.5, 0.5, p, true);
    EXPECT_THROW(simulate_rds(init, p, 1.0), ParameterError);
}

TEST(SimulateRds, AgreesWithReducedModel) {
    const auto p = ModelParams::from_sigma(0.75, 0.05).with_epsilon(1e-3);
    const Grid1D g(-10, 20, 301);
    SimOptions o;
    o.output_times = times(1.0, 5.0, 4);
    o.dt = p.delta() / 50;
    const auto full = simulate_rds(heaviside_initial(g, 0.5, 0.5, p, true), p, 5.0, o);
    const auto red = simulate_lds(heaviside_initial(g, 0.5, 0.5, p), p, 5.0, o);
    for (std::size_t k = 1; k < full.snapshots.size(); ++k)
        for (std::size_t j = 0; j < g.n; ++j) {
            EXPECT_NEAR(full.snapshots[k].M()[j], red.snapshots[k].M()[j], 10 * p.epsilon());
            EXPECT_NEAR(full.snapshots[k].I()[j], red.snapshots[k].I()[j], 10 * p.epsilon());
        }
}

TEST(SimulateFkpp, PulledSpeedNearTwo) {
    const auto p = unit(0.75);
    const auto init = heaviside_initial(Grid1D(-10, 230, 2401), 1.0 - p.delta(), 1.0, p);
    SimOptions o;
    o.output_times = times(0.0, 100.0, 100);
    const auto r = simulate_fkpp(init, 100.0, o);
    const double v = track_front(r.snapshots, kM, 0.5).fitted_speed;
    EXPECT_LT(v, 2.0);
    EXPECT_GT(v, 2.0 * 0.97);
}

TEST(TrackFront, ExactTranslation) {
    const Grid1D g(-20, 80, 2001);
    std::vector<FieldState> snaps;
    const double v = 0.37;
    for (int k = 0; k <= 40; ++k) {
        FieldState s;
        s.grid = g;
        s.t = k;
        s.fields.assign(2, std::vector<double>(g.n));
        for (std::size_t j = 0; j < g.n; ++j) s.fields[kM][j] = 0.5 * (1 - std::tanh(g.x(j) - v * s.t));
        snaps.push_back(std::move(s));
    }
    const auto tr = track_front(snaps, kM, 0.5);
    EXPECT_NEAR(tr.fitted_speed, v, 1e-6);
    EXPECT_EQ(tr.times.size(), 41u);
    EXPECT_EQ(tr.fit_window, 0.5);

    for (auto& s : snaps) s.fields[kM] = snaps.front().fields[kM];
    EXPECT_NEAR(track_front(snaps, kM, 0.5).fitted_speed, 0.0, 1e-12);
    EXPECT_TRUE(track_front(snaps, kM, 2.0).times.empty());
    EXPECT_THROW(track_front(snaps, kM, 0.5, 0.0), ParameterError);
}

TEST(Bounds, DecayConstantExample) {
    const auto p = unit(0.5);  // beta1 = 2
    EXPECT_NEAR(threshold_decay_constant(0.1, p), 2.0 * 0.4 / 4.0, 1e-15);
    EXPECT_NEAR(threshold_decay_constant(0.1, ModelParams(0.5, 1.0, 1.0, 0.05)), 0.4 / 3.0, 1e-15);
    EXPECT_NEAR(threshold_mass(0.1, p), 0.3, 1e-15);
}

TEST(Bounds, RegimeSelection) {
    const auto p = unit(0.75, 4e-4);
    EXPECT_EQ(bounds_regime(0.1, p), BoundsRegime::SubThreshold);
    EXPECT_EQ(bounds_regime(0.5, p), BoundsRegime::SuperThreshold);
    EXPECT_EQ(bounds_regime(0.5, unit(4.0)), BoundsRegime::SuperThreshold);
    EXPECT_THROW(bounds_regime(0.245, p), RegimeMismatch);
}

TEST(Bounds, SubThresholdHoldsOnSimulation) {
    const auto p = unit(0.75, 4e-4);
    const auto init = heaviside_initial(Grid1D(-15, 15, 601), 0.1, 0.5, p);
    SimOptions o;
    o.output_times = times(0.0, 5.0, 25);
    const auto r = simulate_lds(init, p, 5.0, o);
    const auto rep = check_appendix_bounds(r.snapshots, p, 0.1, 0.5, BoundsRegime::SubThreshold, 0.2);
    EXPECT_FALSE(rep.checks.empty());
    EXPECT_LT(rep.worst(), 1e-3);
    EXPECT_THROW(check_appendix_bounds(r.snapshots, p, 0.1, 0.5, BoundsRegime::SuperThreshold), RegimeMismatch);
}

TEST(Bounds, SuperThresholdHoldsOnSimulation) {
    const auto p = unit(4.0, 0.05);
    const auto init = heaviside_initial(Grid1D(-10, 30, 401), 0.5, 0.5, p);
    SimOptions o;
    o.output_times = times(0.0, 5.0, 10);
    const auto r = simulate_lds(init, p, 5.0, o);
    const auto rep = check_appendix_bounds(r.snapshots, p, 0.5, 0.5, BoundsRegime::SuperThreshold, 0.2);
    bool has_fkpp = false;
    for (const auto& c : rep.checks) has_fkpp |= c.name.find("fkpp") != std::string::npos;
    EXPECT_TRUE(has_fkpp);
    EXPECT_LT(rep.worst(), 1e-3);
}

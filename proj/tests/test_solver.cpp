#include <gtest/gtest.h>

#include <cmath>

#include <wavedecay/simulation.hpp>
#include <wavedecay/solver.hpp>

#include "oracles.hpp"

using namespace wavedecay;

namespace {

const CoefficientProfile unit = profiles::constant(1.0, 1.0, {0.0, 1.0});

double max_error_vs_exact(std::size_t nx, double t_end, double cfl = 0.9) {
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, BumpSpec{0.5, 0.3, 0.5});
    GridSpec g = make_grid(unit, d, nx, cfl, t_end, 0.5);
    // Land exactly on t_end.
    g.dt = t_end / static_cast<double>(g.steps());
    LeapfrogSolver s(unit, g);
    SimState st = initial_state(unit, d, g);
    while (st.step < g.steps()) s.advance(st);
    double err = 0.0;
    for (std::size_t j = 0; j <= g.nx; ++j) {
        const double x = g.x(j);
        const double exact = 0.5 * (oracle::bump(0.5, 0.4, 1.0, x + t_end) + oracle::bump(0.5, 0.4, 1.0, x - t_end)) +
                             0.5 * oracle::bump_integral(0.5, 0.3, 0.5, x - t_end, x + t_end);
        err = std::max(err, std::abs(st.u_curr[j] - exact));
    }
    return err;
}

}  // namespace

TEST(DAlembert, TranslatesHaveLeftTheOrigin) {
    const auto d = initial_data::bumps(BumpSpec{0.0, 2.0, 1.0}, std::nullopt);
    EXPECT_EQ(dalembert_exact(d, 1.0, 1.0, 0.0, 3.0), 0.0);
}

TEST(DAlembert, VelocityOnlyReducesToConeIntegral) {
    const auto d = initial_data::bumps(std::nullopt, BumpSpec{0.5, 0.4, 2.0});
    const double c = 2.0;  // alpha0 = 4, beta0 = 1
    const double x = 0.7;
    const double t = 0.1;
    EXPECT_NEAR(dalembert_exact(d, 4.0, 1.0, x, t), oracle::bump_integral(0.5, 0.4, 2.0, x - c * t, x + c * t) / (2 * c),
                1e-12);
}

TEST(DAlembert, LongTimeLimitIsUInfinity) {
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, BumpSpec{0.5, 0.4, 2.0});
    const auto p = profiles::constant(4.0, 1.0, {0.0, 1.0});
    EXPECT_NEAR(dalembert_exact(d, 4.0, 1.0, 0.3, 100.0), limit_constant(p, d), 1e-11);
}

TEST(Leapfrog, SecondOrderAgainstExactSolution) {
    const double e1 = max_error_vs_exact(1000, 0.4);
    const double e2 = max_error_vs_exact(2000, 0.4);
    const double e3 = max_error_vs_exact(4000, 0.4);
    EXPECT_LT(e2, 5e-4);
    EXPECT_GE(e1 / e2, 3.5);
    EXPECT_LE(e1 / e2, 4.5);
    EXPECT_GE(e2 / e3, 3.5);
    EXPECT_LE(e2 / e3, 4.5);
}

TEST(Leapfrog, CflViolationThrows) {
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, std::nullopt);
    GridSpec g = make_grid(unit, d, 200, 0.9, 1.0, 0.5);
    g.dt *= 1.2;
    EXPECT_THROW((LeapfrogSolver{unit, g}), Error);
}

TEST(Leapfrog, GridEndsInsideRampThrow) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.5, {0.0, 1.0});
    GridSpec g;
    g.x_left = 0.2;
    g.x_right = 2.0;
    g.nx = 100;
    g.dt = 0.001;
    EXPECT_THROW((LeapfrogSolver{p, g}), Error);
}

TEST(Leapfrog, GlobalEnergyDriftIsSecondOrderBeforeBoundaryContact) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.6, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    double drift[2];
    int k = 0;
    for (std::size_t nx : {2500u, 5000u}) {
        // Margin 2 keeps the ends quiet for t < 2.
        const GridSpec g = make_grid(p, d, nx, 0.9, 1.5, 2.0);
        RunOptions o;
        o.omega = Interval{g.x_left + 1e-9, g.x_right - 1e-9};
        const auto r = run(p, d, g, 10, o);
        const double e0 = r.records.front().e_loc;
        drift[k] = 0.0;
        for (const auto& rec : r.records) drift[k] = std::max(drift[k], std::abs(rec.e_loc - e0) / e0);
        EXPECT_LT(drift[k], 20.0 * g.h() * g.h());
        ++k;
    }
    EXPECT_GT(drift[0] / drift[1], 3.5);
    EXPECT_LT(drift[0] / drift[1], 4.5);
}

TEST(Leapfrog, OutflowReflectionBelowThreshold) {
    for (auto scheme : {BoundaryScheme::box, BoundaryScheme::upwind}) {
        const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, std::nullopt);
        const GridSpec g = make_grid(unit, d, 4000, 0.9, 2.5, 0.5, scheme);
        LeapfrogSolver s(unit, g);
        SimState st = initial_state(unit, d, g);
        while (st.step < g.steps()) s.advance(st);
        double residual = 0.0;
        for (double v : st.u_curr) residual = std::max(residual, std::abs(v));
        EXPECT_LT(residual, 1e-3) << static_cast<int>(scheme);
    }
}

TEST(Leapfrog, BoxBoundaryReflectsLessThanUpwind) {
    double res[2];
    int k = 0;
    for (auto scheme : {BoundaryScheme::box, BoundaryScheme::upwind}) {
        const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, std::nullopt);
        const GridSpec g = make_grid(unit, d, 2000, 0.9, 2.5, 0.5, scheme);
        LeapfrogSolver s(unit, g);
        SimState st = initial_state(unit, d, g);
        while (st.step < g.steps()) s.advance(st);
        res[k] = 0.0;
        for (double v : st.u_curr) res[k] = std::max(res[k], std::abs(v));
        ++k;
    }
    EXPECT_LT(res[0], res[1]);
}

TEST(Simulation, ZeroDataGiveZeroTrace) {
    const auto d = initial_data::zero({0.0, 1.0});
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.6, {0.0, 1.0});
    const GridSpec g = make_grid(p, d, 200, 0.9, 1.0, 0.5);
    const auto r = run(p, d, g, 5);
    ASSERT_FALSE(r.records.empty());
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.e_loc, 0.0);
        EXPECT_EQ(rec.h1_dist, 0.0);
    }
}

TEST(Simulation, ConstantCoefficientsSettleInFiniteTime) {
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    const GridSpec g = make_grid(unit, d, 2000, 0.9, 4.0, 0.5);
    const auto r = run(unit, d, g, 10);
    const double e0 = r.records.front().e_loc;
    EXPECT_LT(r.records.back().e_loc, 1e-15 * e0);
    EXPECT_LT(r.records.back().h1_dist, 1e-6);
    EXPECT_TRUE(r.monotone);
}

TEST(Simulation, VariableRampDecaysPositively) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.6, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    const GridSpec g = make_grid(p, d, 1000, 0.9, 2.0, 0.5);
    const auto r = run(p, d, g, 10);
    for (const auto& rec : r.records) EXPECT_GT(rec.e_loc, 0.0);
    EXPECT_LT(r.records.back().e_loc, 1e-3 * r.records.front().e_loc);
    EXPECT_TRUE(r.monotone);
}

TEST(Simulation, InitialRecordUsesExactVelocity) {
    const auto d = initial_data::bumps(std::nullopt, BumpSpec{0.5, 0.4, 1.0});
    const GridSpec g = make_grid(unit, d, 2000, 0.9, 0.1, 0.5);
    const auto r = run(unit, d, g, 1);
    // u0 = 0: e_loc(0) = (t0/2) int u1^2, t0 = 1 over the hull [0, 1].
    auto sq = [](double x) { return oracle::bump(0.5, 0.4, 1.0, x) * oracle::bump(0.5, 0.4, 1.0, x); };
    EXPECT_NEAR(r.records.front().e_loc, 0.5 * oracle::simpson(sq, 0.3, 0.7, 20000), 1e-6);
}

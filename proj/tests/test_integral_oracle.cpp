#include <gtest/gtest.h>

#include <cmath>

#include <wavedecay/certificates.hpp>
#include <wavedecay/integral_oracle.hpp>
#include <wavedecay/solver.hpp>

#include "oracles.hpp"

using namespace wavedecay;

TEST(IntegralIteration, NoDriftIsPlainDAlembertInOneSweep) {
    const auto p = profiles::constant(1.0, 1.0, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, BumpSpec{0.5, 0.4, 0.5});
    const Transform tr(p, {0.0, 1.0}, 256);
    const auto td = transform_data(tr, d);
    IntegralOptions o;
    o.cells = 100;
    const auto sol = integral_iteration(td, 1.0, o);
    ASSERT_FALSE(sol.iterations.empty());
    EXPECT_EQ(sol.iterations.front(), 1u);
    double err = 0.0;
    for (std::size_t n = 0; n < sol.levels; ++n) {
        for (std::size_t i = 0; i <= sol.m; ++i) {
            err = std::max(err, std::abs(sol.v[sol.index(n, i)] - dalembert_exact(d, 1.0, 1.0, sol.y(i), sol.tau(n))));
        }
    }
    // Per-cell quadrature tolerance accumulates along characteristics.
    EXPECT_LT(err, 1e-10);
}

TEST(IntegralIteration, SmallDriftConvergesWithinTolerance) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.2, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    const Transform tr(p, {0.0, 1.0}, 1024);
    const auto td = transform_data(tr, d);
    IntegralOptions o;
    o.cells = 100;
    o.tol = 1e-11;
    const auto sol = integral_iteration(td, 2.0, o);
    EXPECT_LT(sol.last_update, 1e-11);
    for (auto it : sol.iterations) EXPECT_LT(it, 20u);
}

TEST(IntegralIteration, VelocityConsistentWithDisplacement) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.4, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    const Transform tr(p, {0.0, 1.0}, 1024);
    const auto td = transform_data(tr, d);
    // Central differences of v against the returned derivatives.
    auto mismatch = [&](std::size_t cells) {
        const auto sol = integral_iteration(td, 1.5, IntegralOptions{cells});
        double worst = 0.0;
        for (std::size_t n = 1; n + 1 < sol.levels; ++n) {
            for (std::size_t i = 1; i < sol.m; ++i) {
                const double dy = (sol.v[sol.index(n, i + 1)] - sol.v[sol.index(n, i - 1)]) / (2 * sol.k);
                const double dt = (sol.v[sol.index(n + 1, i)] - sol.v[sol.index(n - 1, i)]) / (2 * sol.k);
                worst = std::max(worst, std::abs(dy - sol.vy[sol.index(n, i)]));
                worst = std::max(worst, std::abs(dt - sol.vtau[sol.index(n, i)]));
            }
        }
        return worst;
    };
    const double coarse = mismatch(100);
    const double fine = mismatch(200);
    EXPECT_LT(fine, 2e-3);
    EXPECT_GT(coarse / fine, 3.0);
}

TEST(IntegralIteration, EnergyBoundedByPrecedingWindowAverage) {
    // E(tau) <= b0 t0 int_{tau-1}^{tau} E for tau >= 1 once b0 t0 < 1.
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.6, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    const Transform tr(p, {0.0, 1.0}, 2048);
    const auto sol = integral_iteration(transform_data(tr, d), 3.0, IntegralOptions{200});
    const double b0t0 = variation_constant(p) * tr.t0();
    ASSERT_LT(b0t0, 1.0);
    std::vector<double> e(sol.levels);
    for (std::size_t n = 0; n < sol.levels; ++n) e[n] = transformed_energy(sol, tr, n);
    const std::size_t w = sol.m;  // one unit of tau
    std::size_t checked = 0;
    for (std::size_t n = w; n < sol.levels; ++n) {
        std::vector<double> window(e.begin() + static_cast<long>(n - w), e.begin() + static_cast<long>(n + 1));
        const double avg = numerics::trapezoid(window, sol.k);
        if (avg < 1e-20) continue;
        EXPECT_LE(e[n], b0t0 * avg * (1.0 + 1e-6)) << "tau=" << sol.tau(n);
        ++checked;
    }
    EXPECT_GT(checked, 0u);
}

TEST(IntegralIteration, RejectsTooFewCells) {
    TransformedData td;
    td.v0 = td.v0_deriv = td.v1 = td.gamma = [](double) { return 0.0; };
    EXPECT_THROW((void)integral_iteration(td, 1.0, IntegralOptions{2}), Error);
}

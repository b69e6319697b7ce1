#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "analysis.hpp"
#include "certificates.hpp"
#include "profiles.hpp"
#include "solver.hpp"

namespace wavedecay {

struct RunOptions {
    /// Interval for local diagnostics; defaults to the hull of omega_in and omega0.
    std::optional<Interval> omega;
    /// Weights for the weighted energy; omitted means e_weighted = 0.
    std::optional<WeightPair> weights;
    /// Constant for the H1 distance; defaults to the limit constant of the data.
    std::optional<double> u_infty;
    std::size_t transform_resolution = 4096;
    /// Called after every step with the state at the new time.
    std::function<void(const SimState&)> on_step;
};

struct RunResult {
    std::vector<TraceRecord> records;
    SimState final_state;
    /// Largest per-step increase of e_loc relative to e_loc(0).
    double max_increase_per_step = 0.0;
    bool monotone = true;  ///< increase stays below 10 h^2 per step
};

/// Simulates the wave equation and records diagnostics every `record_every`
/// steps, starting at t = 0 and ending at the last step not past t_final.
inline RunResult run(const CoefficientProfile& profile, const InitialData& data, const GridSpec& grid,
                     std::size_t record_every, const RunOptions& opt = {}) {
    if (record_every == 0) {
        throw Error("record_every must be positive");
    }
    const Interval hull = working_interval(profile, data);
    if (!(grid.x_left < hull.lo && grid.x_right > hull.hi)) {
        throw Error("grid ends must lie outside omega_in and the data support");
    }
    LeapfrogSolver solver(profile, grid);
    const std::size_t steps = grid.steps();
    RunResult out;

    if (data.zero) {
        const std::size_t n = grid.nx + 1;
        for (std::size_t k = 0; k <= steps; k += record_every) {
            TraceRecord r;
            r.t = static_cast<double>(k) * grid.dt;
            out.records.push_back(r);
        }
        out.final_state = SimState{static_cast<double>(steps) * grid.dt, steps, std::vector<double>(n, 0.0),
                                   std::vector<double>(n, 0.0)};
        return out;
    }

    const Transform tr(profile, hull, opt.transform_resolution);
    const Interval omega = opt.omega.value_or(hull);
    const double u_inf = opt.u_infty.value_or(limit_constant(profile, data));
    const double beta_u1 = 2.0 * profile.far_impedance() * limit_constant(profile, data);
    const EnergyContext ctx(profile, grid, tr, omega, opt.weights, u_inf, beta_u1);

    // Level -1 by the backward Taylor expansion gives the exact u1 as the
    // centred time derivative at t = 0.
    const std::vector<double> u_back = taylor_level(profile, data, grid, -1.0);
    SimState state = initial_state(profile, data, grid);
    out.records.push_back(ctx.record({0.0, u_back, state.u_prev, state.u_curr}));
    if (opt.on_step) opt.on_step(state);

    std::vector<double> older;
    for (std::size_t k = 1; k < steps; ++k) {
        const bool rec = k % record_every == 0;
        if (rec) older = state.u_prev;
        solver.advance(state);
        if (opt.on_step) opt.on_step(state);
        if (rec) {
            // state now holds levels k and k+1; `older` is level k-1.
            out.records.push_back(ctx.record({static_cast<double>(k) * grid.dt, older, state.u_prev, state.u_curr}));
        }
    }
    out.final_state = std::move(state);
    const double h = grid.h();
    out.max_increase_per_step = max_energy_increase_per_step(out.records, grid.dt);
    out.monotone = out.max_increase_per_step <= 10.0 * h * h;
    return out;
}

}  // namespace wavedecay

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "certificates.hpp"
#include "config.hpp"
#include "integral_oracle.hpp"
#include "simulation.hpp"

namespace wavedecay {

/// Runs `n` independent tasks on at most `jobs` threads; results keep task order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, const std::function<T(std::size_t)>& task) {
    std::vector<T> out(n);
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = task(i);
        return out;
    }
    for (std::size_t start = 0; start < n; start += jobs) {
        const std::size_t stop = std::min(n, start + jobs);
        std::vector<std::future<T>> batch;
        for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, task, i));
        for (std::size_t i = start; i < stop; ++i) out[i] = batch[i - start].get();
    }
    return out;
}

struct SweepRow {
    double gamma0 = 0.0;
    double lambda_star = 0.0;
    double lambda0 = 0.0;
};

/// Critical and explicit rates on a log-spaced drift grid.
inline std::vector<SweepRow> rate_sweep(double gamma0_min, double gamma0_max, std::size_t n, std::size_t jobs = 1) {
    if (!(gamma0_min > 0.0 && gamma0_min < gamma0_max) || n < 2) {
        throw Error("sweep needs 0 < gamma0_min < gamma0_max and n >= 2");
    }
    const std::vector<double> grid = numerics::log_space(gamma0_min, gamma0_max, n);
    return parallel_map<SweepRow>(n, jobs, [&](std::size_t i) {
        const double d = grid[i];
        return SweepRow{d, weights::critical_rate(d).value, weights::explicit_rate(d)};
    });
}

/// Sign changes of the scaled root function on a log grid of ratios.
inline std::size_t root_sign_changes(double drift, std::size_t samples = 2000) {
    // The critical ratio behaves like 2 exp(-2 drift) for large drift.
    const double lower = std::min(1e-8, std::exp(-2.0 * drift - 8.0));
    const auto ratios = numerics::log_space(lower, 1e4, samples);
    std::size_t changes = 0;
    double prev = weights::root_function(drift, ratios.front());
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        const double cur = weights::root_function(drift, ratios[i]);
        if ((prev < 0.0) != (cur < 0.0)) ++changes;
        prev = cur;
    }
    return changes;
}

/// Verdicts over a drift sweep: one root, explicit below critical,
/// admissibility at the explicit rate, critical rate decreasing.
inline std::vector<Verdict> sweep_verdicts(const std::vector<SweepRow>& rows) {
    Verdict one_root{"sweep_single_sign_change", true, {}};
    Verdict below{"sweep_explicit_below_critical", true, {}};
    Verdict admissible{"sweep_admissible_at_explicit", true, {}};
    Verdict monotone{"sweep_critical_decreasing", true, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (root_sign_changes(r.gamma0) != 1) {
            one_root.pass = false;
            one_root.detail = "gamma0=" + detail::num(r.gamma0);
        }
        if (!(r.lambda0 < r.lambda_star)) {
            below.pass = false;
            below.detail = "gamma0=" + detail::num(r.gamma0);
        }
        if (!(weights::admissibility_margin(r.gamma0, r.lambda0) > 0.0)) {
            admissible.pass = false;
            admissible.detail = "gamma0=" + detail::num(r.gamma0);
        }
        if (i > 0 && !(r.lambda_star < rows[i - 1].lambda_star)) {
            monotone.pass = false;
            monotone.detail = "gamma0=" + detail::num(r.gamma0);
        }
    }
    for (Verdict* v : {&one_root, &below, &admissible, &monotone}) {
        if (v->pass) v->detail = std::to_string(rows.size()) + " drift values";
    }
    return {one_root, below, admissible, monotone};
}

/// Largest deviation between the closed-form weights and a classical RK4
/// integration of their ODE system on `steps` uniform steps over [0,1].
inline double weight_ode_residual(const WeightPair& w, std::size_t steps = 1000) {
    const double d = w.drift;
    const double l = w.lambda;
    auto rhs = [d, l](double p1, double p2, double& f1, double& f2) {
        f1 = l * p1 + d * (p1 - p2);
        f2 = -l * p2 - d * (p1 - p2);
    };
    const double h = 1.0 / static_cast<double>(steps);
    double p1 = 1.0;
    double p2 = 1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        double a1, a2, b1, b2, c1, c2, e1, e2;
        rhs(p1, p2, a1, a2);
        rhs(p1 + 0.5 * h * a1, p2 + 0.5 * h * a2, b1, b2);
        rhs(p1 + 0.5 * h * b1, p2 + 0.5 * h * b2, c1, c2);
        rhs(p1 + h * c1, p2 + h * c2, e1, e2);
        p1 += h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + e1);
        p2 += h / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + e2);
        const double y = h * static_cast<double>(i + 1);
        worst = std::max({worst, std::abs(p1 - w.phi1(y)), std::abs(p2 - w.phi2(y))});
    }
    return worst;
}

/// Inputs for the property suite behind `verify`.
struct VerifyOptions {
    std::size_t jobs = 1;
    std::size_t oracle_cells = 200;
    double oracle_horizon = 3.0;
    double oracle_tol = 1e-10;
};

struct VerifyReport {
    RateCertificate certificate;
    std::vector<TraceRecord> trace;
    std::vector<Verdict> verdicts;

    [[nodiscard]] bool all_pass() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
};

/// Max-norm difference between the leapfrog solution mapped to travel-time
/// coordinates and the integral-equation iterate on (0,1) x (0, horizon).
inline double cross_oracle_difference(const CoefficientProfile& p, const InitialData& d, std::size_t nx, double cfl,
                                      double margin, const IntegralOptions& io, double horizon,
                                      std::size_t transform_resolution = 4096) {
    const Transform tr(p, working_interval(p, d), transform_resolution);
    const TransformedData td = transform_data(tr, d);
    const IntegralSolution sol = integral_iteration(td, horizon, io);
    GridSpec g = make_grid(p, d, nx, cfl, horizon * tr.t0(), margin);
    // Land exactly on the oracle levels.
    const double level_dt = tr.t0() * sol.k;
    const auto sub = static_cast<std::size_t>(std::ceil(level_dt / g.dt - 1e-12));
    g.dt = level_dt / static_cast<double>(sub);
    LeapfrogSolver solver(p, g);
    SimState st = initial_state(p, d, g);
    std::vector<double> xs(sol.m + 1);
    for (std::size_t i = 0; i <= sol.m; ++i) xs[i] = tr.x_at(sol.y(i));
    double worst = 0.0;
    auto compare_level = [&](std::size_t n, const std::vector<double>& u) {
        for (std::size_t i = 0; i <= sol.m; ++i) {
            const double f = (xs[i] - g.x_left) / g.h();
            const auto j = std::min(static_cast<std::size_t>(f), g.nx - 1);
            const double w = f - static_cast<double>(j);
            const double uf = (1.0 - w) * u[j] + w * u[j + 1];
            worst = std::max(worst, std::abs(uf - sol.v[sol.index(n, i)]));
        }
    };
    compare_level(0, st.u_prev);
    for (std::size_t n = 1; n < sol.levels; ++n) {
        while (st.step < n * sub) solver.advance(st);
        compare_level(n, st.u_curr);
    }
    return worst;
}

/// Runs the property suite for one configuration.
inline VerifyReport verify(const RunConfig& cfg, const VerifyOptions& vo = {}) {
    VerifyReport rep;
    auto& out = rep.verdicts;
    const CoefficientProfile profile = cfg.build_profile();
    const InitialData data = cfg.build_data();

    const CheckResult pv = validate_profile(profile);
    out.push_back({"profile_valid", pv.ok, pv.detail});
    const CheckResult dv = validate_data(data);
    out.push_back({"data_valid", dv.ok, dv.detail});

    CertificateOptions co = cfg.certificate_options();
    co.weight_rate.reset();
    rep.certificate = certify(profile, data, co);
    const RateCertificate& base = rep.certificate;

    {
        const Transform tr(profile, working_interval(profile, data), co.transform_resolution, co.quad_tol);
        const double in_x = drift_bound_x(profile, tr.t0(), tr.working(), co.sup_samples);
        const double diff = std::abs(in_x - base.gamma0);
        const bool ok = diff <= 1e-6 * std::max(1.0, base.gamma0);
        out.push_back({"drift_cross_check", ok,
                       "y-space=" + detail::num(base.gamma0) + " x-space=" + detail::num(in_x)});
    }

    double rate = base.lambda0;
    bool weights_ok = true;
    {
        Verdict v{"weights_admissible", true, {}};
        if (cfg.weight_rate) rate = *cfg.weight_rate;
        if (!base.lambda_star.infinite && !(rate < base.lambda_star.value)) {
            v.pass = false;
            weights_ok = false;
            v.detail = "lambda=" + detail::num(rate) + " >= lambda_star=" + io::format_rate(base.lambda_star);
        } else {
            const WeightPair w = build_weights(base.gamma0, rate);
            v.pass = w.phi2(1.0) > 0.0;
            weights_ok = v.pass;
            v.detail = "phi2(1)=" + detail::num(w.phi2(1.0));
        }
        out.push_back(v);
    }
    if (weights_ok) {
        const double res = weight_ode_residual(build_weights(base.gamma0, rate));
        out.push_back({"weights_ode_residual", res < 1e-9, "max deviation=" + detail::num(res)});
    }

    {
        const auto rows = rate_sweep(cfg.sweep.gamma0_min, cfg.sweep.gamma0_max, cfg.sweep.n, vo.jobs);
        for (auto& v : sweep_verdicts(rows)) out.push_back(std::move(v));
    }
    {
        Verdict v{"coth_inequality", true, {}};
        std::size_t count = 0;
        for (double a : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double top = weights::coth_inequality_bound(a);
            for (std::size_t i = 1; i <= 1000; ++i) {
                const double q = 1.0 + (top - 1.0) * static_cast<double>(i) / 1001.0;
                if (q <= 1.0 || q >= top) continue;
                ++count;
                if (!weights::coth_inequality(a, q).holds) {
                    v.pass = false;
                    v.detail = "fails at a=" + detail::num(a) + " q=" + detail::num(q);
                }
            }
        }
        if (v.pass) v.detail = std::to_string(count) + " samples";
        out.push_back(v);
    }

    if (!weights_ok) {
        out.push_back({"simulation", false, "skipped: weights not admissible"});
        return rep;
    }

    // Simulation and cross-oracle are independent; run them side by side.
    CertificateOptions sim_co = cfg.certificate_options();
    const RateCertificate cert = certify(profile, data, sim_co);
    const GridSpec grid = cfg.build_grid(profile, data);
    auto simulate = [&]() {
        RunOptions ro;
        ro.weights = cert.weights();
        ro.transform_resolution = cfg.numerics.transform_resolution;
        return run(profile, data, grid, cfg.grid.record_every, ro);
    };
    IntegralOptions io;
    io.cells = vo.oracle_cells;
    io.tol = vo.oracle_tol;
    auto oracle = [&]() {
        return cross_oracle_difference(profile, data, cfg.grid.nx, cfg.grid.cfl, cfg.grid.margin, io, vo.oracle_horizon,
                                       cfg.numerics.transform_resolution);
    };
    RunResult sim;
    double xo = 0.0;
    if (vo.jobs > 1) {
        auto f = std::async(std::launch::async, oracle);
        sim = simulate();
        xo = f.get();
    } else {
        sim = simulate();
        xo = oracle();
    }
    const double h = grid.h();

    out.push_back({"energy_monotone", sim.monotone,
                   "max increase per step=" + detail::num(sim.max_increase_per_step) +
                       " slack=" + detail::num(10.0 * h * h)});
    {
        double worst = 0.0;
        for (const auto& r : sim.records) worst = std::max(worst, r.balance_residual);
        out.push_back({"balance_identity", worst < 10.0 * h * h,
                       "max residual=" + detail::num(worst) + " bound=" + detail::num(10.0 * h * h)});
    }
    {
        // ||u_t||^2 <= ||1/beta||_inf / (phi2(1) t0) * weighted energy.
        const WeightPair w = cert.weights();
        const double c0 = w.phi2(1.0);
        const double inv_beta = 1.0 / profile.beta_min;
        double worst = 0.0;
        bool ok = true;
        for (const auto& r : sim.records) {
            const double bound = inv_beta / (c0 * cert.t0) * r.e_weighted;
            const double lhs = r.l2_ut * r.l2_ut;
            if (lhs > bound * (1.0 + 50.0 * h * h) + 1e-300) ok = false;
            if (bound > 0.0) worst = std::max(worst, lhs / bound);
        }
        out.push_back({"velocity_bound", ok, "max ratio=" + detail::num(worst)});
    }
    {
        const double bound = 5e-4 + io.tol;
        out.push_back({"cross_oracle", xo < bound, "max difference=" + detail::num(xo) + " bound=" + detail::num(bound)});
    }

    EnergyTrace trace{sim.records, grid, cfg.hash, cert};
    CompareOptions cmp;
    cmp.fit = FitOptions{cfg.analysis.fit_lo, cfg.analysis.fit_hi, cfg.analysis.floor, 10};
    cmp.rate_rel_tol = cfg.analysis.rate_rel_tol;
    cmp.rate_h_factor = cfg.analysis.rate_h_factor;
    cmp.envelope_h2_factor = cfg.analysis.envelope_h2_factor;
    const ComparisonReport cr = compare(trace, cert, cmp);
    for (const auto& v : cr.verdicts) out.push_back(v);
    rep.trace = std::move(sim.records);
    return rep;
}

}  // namespace wavedecay

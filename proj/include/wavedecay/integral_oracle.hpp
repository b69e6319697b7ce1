#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "numerics.hpp"
#include "profiles.hpp"

namespace wavedecay {

/// Data of the transformed problem v_tt - v_yy + gamma v_y = 0 on the
/// travel-time coordinate, all supported in (0, 1).
struct TransformedData {
    RealFn v0;
    RealFn v0_deriv;
    RealFn v1;
    RealFn gamma;
    std::vector<double> kinks;  ///< of v1, in y
};

/// Maps physical data through the travel-time coordinate:
/// v0(y) = u0(x(y)), v0'(y) = u0'(x(y)) dx/dy, v1(y) = t0 u1(x(y)).
inline TransformedData transform_data(const Transform& tr, const InitialData& d) {
    TransformedData td;
    td.v0 = [&tr, u0 = d.u0](double y) { return u0(tr.x_at(y)); };
    td.v0_deriv = [&tr, du0 = d.u0_deriv](double y) {
        const double x = tr.x_at(y);
        return du0(x) / tr.dy_dx(x);
    };
    td.v1 = [&tr, u1 = d.u1](double y) { return tr.t0() * u1(tr.x_at(y)); };
    td.gamma = [&tr](double y) { return tr.gamma_at(y); };
    for (double k : d.kinks) td.kinks.push_back(tr.y_at(k));
    return td;
}

/// Space-time samples of v, v_y, v_tau on y_i = i k (i = 0..m), tau_n = n k.
struct IntegralSolution {
    std::size_t m = 0;  ///< cells in y over [0, 1]
    std::size_t levels = 0;
    double k = 0.0;
    std::vector<double> v;
    std::vector<double> vy;
    std::vector<double> vtau;
    std::vector<std::size_t> iterations;  ///< Picard sweeps per window
    double last_update = 0.0;              ///< max-norm change of the final sweep

    [[nodiscard]] std::size_t index(std::size_t n, std::size_t i) const { return n * (m + 1) + i; }
    [[nodiscard]] double tau(std::size_t n) const { return static_cast<double>(n) * k; }
    [[nodiscard]] double y(std::size_t i) const { return static_cast<double>(i) * k; }
};

struct IntegralOptions {
    std::size_t cells = 200;      ///< cells per unit length in y (and tau)
    double tol = 1e-10;           ///< max-norm change between Picard sweeps
    std::size_t max_iterations = 500;
    double window = 1.0;          ///< tau-length of each Picard window
    double quad_tol = 1e-12;
};

/// Solves the integral form
///   v = D[v0, v1] - 1/2 int_0^tau int_{y-s}^{y+s} gamma v_y(z, tau - s) dz ds
/// on (0,1) x (0, tau_final) by Picard iteration for v_y, one tau-window at
/// a time. Space and time share the step k, so both characteristic feet
/// (y -+ s, tau - s) fall on grid nodes and the s-integrals use the
/// trapezoid rule; gamma vanishes outside (0,1), which closes the system
/// on the unit interval.
inline IntegralSolution integral_iteration(const TransformedData& td, double tau_final,
                                           const IntegralOptions& opt = {}) {
    if (opt.cells < 4 || !(tau_final > 0.0)) {
        throw Error("integral iteration needs at least 4 cells and a positive horizon");
    }
    IntegralSolution sol;
    sol.m = opt.cells;
    sol.k = 1.0 / static_cast<double>(sol.m);
    const std::size_t nlev = static_cast<std::size_t>(std::ceil(tau_final / sol.k - 1e-9)) + 1;
    sol.levels = nlev;
    const std::size_t m = sol.m;
    const double k = sol.k;
    const std::size_t width = m + 1;

    // Data on the integer grid extended by the horizon on both sides.
    const long ext = static_cast<long>(nlev);
    auto node = [k](long i) { return static_cast<double>(i) * k; };
    auto in_unit = [m](long i) { return i > 0 && i < static_cast<long>(m); };
    std::vector<double> gam(width, 0.0);
    for (std::size_t i = 1; i < m; ++i) gam[i] = td.gamma(node(static_cast<long>(i)));
    auto data_at = [&](const RealFn& f, long i) { return in_unit(i) ? f(node(i)) : 0.0; };
    std::vector<double> dv0(static_cast<std::size_t>(m + 2 * ext + 1));
    std::vector<double> v0(dv0.size());
    std::vector<double> v1(dv0.size());
    std::vector<double> v1_cum(dv0.size());  // int_0^{y} v1
    for (long i = -ext; i <= static_cast<long>(m) + ext; ++i) {
        const auto s = static_cast<std::size_t>(i + ext);
        dv0[s] = data_at(td.v0_deriv, i);
        v0[s] = data_at(td.v0, i);
        v1[s] = data_at(td.v1, i);
    }
    {
        double acc = 0.0;
        for (long i = -ext; i <= static_cast<long>(m) + ext; ++i) {
            const auto s = static_cast<std::size_t>(i + ext);
            if (i > 0 && i <= static_cast<long>(m)) {
                acc += numerics::integrate_piecewise(td.v1, node(i - 1), node(i), td.kinks, opt.quad_tol);
            }
            v1_cum[s] = acc;
        }
    }
    auto at = [ext](const std::vector<double>& a, long i) { return a[static_cast<std::size_t>(i + ext)]; };

    sol.vy.assign(nlev * width, 0.0);
    sol.vtau.assign(nlev * width, 0.0);
    sol.v.assign(nlev * width, 0.0);
    auto gw = [&](const std::vector<double>& w, std::size_t lev, long i) {
        return (i <= 0 || i >= static_cast<long>(m)) ? 0.0 : gam[static_cast<std::size_t>(i)] * w[lev * width + static_cast<std::size_t>(i)];
    };

    // Free (d'Alembert) parts.
    std::vector<double> free_y(nlev * width);
    std::vector<double> free_t(nlev * width);
    for (std::size_t n = 0; n < nlev; ++n) {
        for (std::size_t i = 0; i <= m; ++i) {
            const long p = static_cast<long>(i + n);
            const long q = static_cast<long>(i) - static_cast<long>(n);
            free_y[n * width + i] = 0.5 * (at(dv0, p) + at(dv0, q)) + 0.5 * (at(v1, p) - at(v1, q));
            free_t[n * width + i] = 0.5 * (at(dv0, p) - at(dv0, q)) + 0.5 * (at(v1, p) + at(v1, q));
        }
    }

    // v_y(y_i, tau_n) = free + 1/2 int_0^tau [g w(y-s, tau-s) - g w(y+s, tau-s)] ds;
    // the s = 0 term cancels, so level n only reads earlier levels.
    auto sweep_level = [&](const std::vector<double>& w, std::size_t n, std::size_t i) {
        double integral = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double wt = (j == n) ? 0.5 : 1.0;
            const long il = static_cast<long>(i) - static_cast<long>(j);
            const long ir = static_cast<long>(i + j);
            integral += wt * (gw(w, n - j, il) - gw(w, n - j, ir));
        }
        return free_y[n * width + i] + 0.5 * k * integral;
    };

    const auto window_levels = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.window / k)));
    std::vector<double> next(sol.vy);
    for (std::size_t n = 0; n < nlev; ++n) {
        for (std::size_t i = 0; i <= m; ++i) sol.vy[n * width + i] = free_y[n * width + i];
    }
    for (std::size_t start = 0; start < nlev; start += window_levels) {
        const std::size_t stop = std::min(nlev, start + window_levels);
        std::size_t it = 0;
        double change = 0.0;
        for (;;) {
            ++it;
            change = 0.0;
            for (std::size_t n = start; n < stop; ++n) {
                for (std::size_t i = 0; i <= m; ++i) {
                    next[n * width + i] = sweep_level(sol.vy, n, i);
                }
            }
            for (std::size_t n = start; n < stop; ++n) {
                for (std::size_t i = 0; i <= m; ++i) {
                    const std::size_t idx = n * width + i;
                    change = std::max(change, std::abs(next[idx] - sol.vy[idx]));
                    sol.vy[idx] = next[idx];
                }
            }
            if (change < opt.tol) break;
            if (it >= opt.max_iterations) {
                throw Error("integral iteration did not converge; shorten the window");
            }
        }
        sol.iterations.push_back(it);
        sol.last_update = change;
    }

    // v_tau = free - 1/2 int_0^tau [g w(y-s, tau-s) + g w(y+s, tau-s)] ds.
    for (std::size_t n = 0; n < nlev; ++n) {
        for (std::size_t i = 0; i <= m; ++i) {
            double integral = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                const double wt = (j == 0 || j == n) ? 0.5 : 1.0;
                if (n == 0) break;
                const long il = static_cast<long>(i) - static_cast<long>(j);
                const long ir = static_cast<long>(i + j);
                integral += wt * (gw(sol.vy, n - j, il) + gw(sol.vy, n - j, ir));
            }
            sol.vtau[n * width + i] = free_t[n * width + i] - 0.5 * k * integral;
        }
    }

    // v = (v0(y+tau) + v0(y-tau))/2 + 1/2 int_{y-tau}^{y+tau} v1
    //     - 1/2 int_0^tau int_{y-s}^{y+s} gamma v_y(z, tau - s) dz ds,
    // with the inner integral from prefix sums of gamma v_y per level.
    std::vector<double> prefix(nlev * width, 0.0);
    for (std::size_t n = 0; n < nlev; ++n) {
        for (std::size_t i = 1; i <= m; ++i) {
            prefix[n * width + i] = prefix[n * width + i - 1] +
                                    0.5 * k * (gw(sol.vy, n, static_cast<long>(i) - 1) + gw(sol.vy, n, static_cast<long>(i)));
        }
    }
    auto cum = [&](std::size_t lev, long i) {
        const long c = std::clamp<long>(i, 0, static_cast<long>(m));
        return prefix[lev * width + static_cast<std::size_t>(c)];
    };
    for (std::size_t n = 0; n < nlev; ++n) {
        for (std::size_t i = 0; i <= m; ++i) {
            const long p = static_cast<long>(i + n);
            const long q = static_cast<long>(i) - static_cast<long>(n);
            double value = 0.5 * (at(v0, p) + at(v0, q)) + 0.5 * (at(v1_cum, p) - at(v1_cum, q));
            double integral = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                if (n == 0) break;
                const double wt = (j == 0 || j == n) ? 0.5 : 1.0;
                const long ir = static_cast<long>(i + j);
                const long il = static_cast<long>(i) - static_cast<long>(j);
                integral += wt * (cum(n - j, ir) - cum(n - j, il));
            }
            sol.v[n * width + i] = value - 0.5 * k * integral;
        }
    }
    return sol;
}

/// Local energy (1/2) int_0^1 (v_tau^2 + v_y^2) / rho dy of the iterate at level n.
inline double transformed_energy(const IntegralSolution& sol, const Transform& tr, std::size_t n) {
    std::vector<double> f(sol.m + 1);
    for (std::size_t i = 0; i <= sol.m; ++i) {
        const double a = sol.vtau[sol.index(n, i)];
        const double b = sol.vy[sol.index(n, i)];
        f[i] = 0.5 * (a * a + b * b) / tr.rho_at(sol.y(i));
    }
    return numerics::trapezoid(f, sol.k);
}

}  // namespace wavedecay

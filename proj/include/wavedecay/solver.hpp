#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "profiles.hpp"

namespace wavedecay {

/// Discretisation of the characteristic outflow conditions at the two ends.
enum class BoundaryScheme {
    upwind,  ///< first-order one-sided update of u_t -+ c u_x = 0
    box,     ///< second-order box (cell-centred Crank-Nicolson) update
};

/// Uniform grid on [x_left, x_right] with nx cells and a fixed time step.
struct GridSpec {
    double x_left = -1.0;
    double x_right = 1.0;
    std::size_t nx = 1000;
    double cfl = 0.9;
    double dt = 0.0;
    double t_final = 1.0;
    BoundaryScheme boundary = BoundaryScheme::box;

    [[nodiscard]] double h() const { return (x_right - x_left) / static_cast<double>(nx); }
    [[nodiscard]] double x(std::size_t j) const {
        return j == nx ? x_right : x_left + h() * static_cast<double>(j);
    }
    [[nodiscard]] std::size_t steps() const {
        return static_cast<std::size_t>(std::llround(std::ceil(t_final / dt - 1e-9)));
    }
};

/// Largest wave speed sqrt(alpha/beta) over the grid window.
inline double max_wave_speed(const CoefficientProfile& p, double a, double b, std::size_t samples = 20000) {
    auto c = [&p](double x) { return p.wave_speed(x); };
    return std::max(p.far_speed(), numerics::sup_abs(c, a, b, samples, p.kinks));
}

/// Grid whose ends sit `margin` outside the hull of omega_in and the data
/// support, with dt = cfl h / max speed.
inline GridSpec make_grid(const CoefficientProfile& p, const InitialData& d, std::size_t nx, double cfl,
                          double t_final, double margin, BoundaryScheme boundary = BoundaryScheme::box) {
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw Error("cfl must lie in (0, 1]");
    }
    if (!(margin > 0.0)) {
        throw Error("grid margin must be positive so the ends lie in the constant region");
    }
    if (nx < 4) {
        throw Error("grid needs at least 4 cells");
    }
    const Interval hull = working_interval(p, d);
    GridSpec g;
    g.x_left = hull.lo - margin;
    g.x_right = hull.hi + margin;
    g.nx = nx;
    g.cfl = cfl;
    g.t_final = t_final;
    g.boundary = boundary;
    g.dt = cfl * g.h() / max_wave_speed(p, g.x_left, g.x_right);
    return g;
}

/// Two consecutive time levels of the discrete displacement.
struct SimState {
    double t = 0.0;
    std::size_t step = 0;
    std::vector<double> u_prev;
    std::vector<double> u_curr;
};

/// Explicit conservative leapfrog for beta u_tt = (alpha u_x)_x with
/// characteristic outflow conditions at both ends.
class LeapfrogSolver {
public:
    LeapfrogSolver(const CoefficientProfile& profile, GridSpec grid) : grid_(grid) {
        const Interval hull = profile.omega_in;
        if (!(grid_.x_left < hull.lo && grid_.x_right > hull.hi)) {
            throw Error("grid ends must lie in the constant-coefficient region");
        }
        const std::size_t n = grid_.nx;
        const double h = grid_.h();
        const double cmax = max_wave_speed(profile, grid_.x_left, grid_.x_right);
        if (!(grid_.dt > 0.0) || grid_.dt > grid_.cfl * h / cmax * (1.0 + 1e-12) || grid_.cfl > 1.0) {
            std::ostringstream msg;
            msg << "CFL violation: dt=" << grid_.dt << " exceeds cfl*h/c_max=" << grid_.cfl * h / cmax;
            throw Error(msg.str());
        }
        beta_.resize(n + 1);
        alpha_half_.resize(n);
        for (std::size_t j = 0; j <= n; ++j) beta_[j] = profile.beta(grid_.x(j));
        for (std::size_t j = 0; j < n; ++j) alpha_half_[j] = profile.alpha(grid_.x(j) + 0.5 * h);
        nu_ = profile.far_speed() * grid_.dt / h;
        r2_ = grid_.dt * grid_.dt / (h * h);
        next_.resize(n + 1);
    }

    [[nodiscard]] const GridSpec& grid() const { return grid_; }

    /// Advances the state by one step in place.
    void advance(SimState& s) {
        const std::size_t n = grid_.nx;
        if (s.u_curr.size() != n + 1 || s.u_prev.size() != n + 1) {
            throw Error("state size does not match the grid");
        }
        const auto& u = s.u_curr;
        const auto& up = s.u_prev;
        for (std::size_t j = 1; j < n; ++j) {
            const double flux = alpha_half_[j] * (u[j + 1] - u[j]) - alpha_half_[j - 1] * (u[j] - u[j - 1]);
            next_[j] = 2.0 * u[j] - up[j] + r2_ / beta_[j] * flux;
        }
        if (grid_.boundary == BoundaryScheme::upwind) {
            next_[0] = u[0] + nu_ * (u[1] - u[0]);
            next_[n] = u[n] - nu_ * (u[n] - u[n - 1]);
        } else {
            next_[0] = ((1.0 - nu_) * u[0] + (1.0 + nu_) * u[1] - (1.0 - nu_) * next_[1]) / (1.0 + nu_);
            next_[n] = ((1.0 - nu_) * u[n] + (1.0 + nu_) * u[n - 1] - (1.0 - nu_) * next_[n - 1]) / (1.0 + nu_);
        }
        for (std::size_t j = 0; j <= n; ++j) {
            if (!std::isfinite(next_[j])) {
                std::ostringstream msg;
                msg << "non-finite value at x=" << grid_.x(j) << " after t=" << s.t;
                throw Error(msg.str());
            }
        }
        std::swap(s.u_prev, s.u_curr);
        std::swap(s.u_curr, next_);
        s.t += grid_.dt;
        ++s.step;
    }

    /// Pure form of advance.
    [[nodiscard]] SimState step(const SimState& s) {
        SimState out = s;
        advance(out);
        return out;
    }

private:
    GridSpec grid_;
    std::vector<double> beta_;
    std::vector<double> alpha_half_;
    std::vector<double> next_;
    double nu_ = 0.0;
    double r2_ = 0.0;
};

/// Second-order Taylor level u0 + sign dt u1 + dt^2/2 (alpha u0')'/beta
/// from the analytic derivatives of data and profile.
inline std::vector<double> taylor_level(const CoefficientProfile& p, const InitialData& d, const GridSpec& g,
                                        double sign) {
    std::vector<double> u(g.nx + 1);
    const double dt = g.dt;
    for (std::size_t j = 0; j <= g.nx; ++j) {
        const double x = g.x(j);
        const double lap = (p.alpha_deriv(x) * d.u0_deriv(x) + p.alpha(x) * d.u0_second_deriv(x)) / p.beta(x);
        u[j] = d.u0(x) + sign * dt * d.u1(x) + 0.5 * dt * dt * lap;
    }
    return u;
}

inline std::vector<double> sample(const RealFn& f, const GridSpec& g) {
    std::vector<double> u(g.nx + 1);
    for (std::size_t j = 0; j <= g.nx; ++j) u[j] = f(g.x(j));
    return u;
}

/// State at t = dt: u_prev = u0, u_curr from the Taylor start.
inline SimState initial_state(const CoefficientProfile& p, const InitialData& d, const GridSpec& g) {
    SimState s;
    s.t = g.dt;
    s.step = 1;
    s.u_prev = sample(d.u0, g);
    s.u_curr = taylor_level(p, d, g, 1.0);
    return s;
}

/// Exact constant-coefficient solution
/// u = (u0(x+ct) + u0(x-ct))/2 + (1/2c) int_{x-ct}^{x+ct} u1.
inline double dalembert_exact(const InitialData& d, double alpha0, double beta0, double x, double t,
                              double quad_tol = 1e-12) {
    const double c = std::sqrt(alpha0 / beta0);
    double u = 0.5 * (d.u0(x + c * t) + d.u0(x - c * t));
    const double a = std::max(x - c * t, d.omega0.lo);
    const double b = std::min(x + c * t, d.omega0.hi);
    if (b > a && !d.zero) {
        u += numerics::integrate_piecewise(d.u1, a, b, d.kinks, quad_tol) / (2.0 * c);
    }
    return u;
}

}  // namespace wavedecay

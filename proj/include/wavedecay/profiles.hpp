#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace wavedecay {

using RealFn = std::function<double(double)>;

/// Coefficients of beta(x) u_tt - (alpha(x) u_x)_x = 0. Both are Lipschitz,
/// bounded below, and constant outside `omega_in`.
struct CoefficientProfile {
    std::string name;
    RealFn alpha;
    RealFn beta;
    RealFn alpha_deriv;
    RealFn beta_deriv;
    Interval omega_in;
    double alpha0 = 1.0;
    double beta0 = 1.0;
    double alpha_min = 1.0;
    double beta_min = 1.0;
    /// Points where the derivatives jump (one-sided convention: right limit).
    std::vector<double> kinks;

    [[nodiscard]] double wave_speed(double x) const { return std::sqrt(alpha(x) / beta(x)); }
    [[nodiscard]] double far_speed() const { return std::sqrt(alpha0 / beta0); }
    [[nodiscard]] double far_impedance() const { return std::sqrt(alpha0 * beta0); }
};

/// Compactly supported initial displacement and velocity.
struct InitialData {
    std::string name;
    RealFn u0;
    RealFn u0_deriv;
    RealFn u0_second_deriv;
    RealFn u1;
    Interval omega0;
    std::vector<double> kinks;
    bool zero = false;
};

/// Parameters of the smooth cos^4 bump used for initial data.
struct BumpSpec {
    double center = 0.5;
    double width = 0.5;
    double height = 1.0;

    [[nodiscard]] Interval support() const { return {center - 0.5 * width, center + 0.5 * width}; }
};

namespace profiles {

namespace detail {

// Shape on [0,1] with value 0 at both ends and peak 1 at the middle.
struct Shape {
    RealFn value;
    RealFn deriv;
    std::vector<double> kinks;  // in unit coordinates
};

inline Shape cosine_shape() {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return {[](double s) { return 0.5 * (1.0 - std::cos(two_pi * s)); },
            [](double s) { return std::numbers::pi * std::sin(two_pi * s); },
            {0.0, 1.0}};
}

inline Shape tent_shape() {
    return {[](double s) { return 1.0 - std::abs(2.0 * s - 1.0); },
            [](double s) { return s < 0.5 ? 2.0 : -2.0; },
            {0.0, 0.5, 1.0}};
}

inline CoefficientProfile from_shape(std::string name, const Shape& shape, double alpha0,
                                     double beta0, double alpha_amp, double beta_amp,
                                     Interval omega) {
    if (!(alpha0 > 0.0) || !(beta0 > 0.0)) {
        throw Error("far-field coefficients must be positive");
    }
    if (!(omega.hi > omega.lo)) {
        throw Error("coefficient interval must have positive length");
    }
    if (alpha_amp <= -1.0 || beta_amp <= -1.0) {
        throw Error("ramp amplitude must exceed -1 to keep coefficients positive");
    }
    const double lo = omega.lo;
    const double len = omega.length();
    auto in = [omega](double x) { return x > omega.lo && x < omega.hi; };
    auto unit = [lo, len](double x) { return (x - lo) / len; };
    CoefficientProfile p;
    p.name = std::move(name);
    p.omega_in = omega;
    p.alpha0 = alpha0;
    p.beta0 = beta0;
    p.alpha = [=](double x) { return in(x) ? alpha0 * (1.0 + alpha_amp * shape.value(unit(x))) : alpha0; };
    p.beta = [=](double x) { return in(x) ? beta0 * (1.0 + beta_amp * shape.value(unit(x))) : beta0; };
    p.alpha_deriv = [=](double x) {
        return in(x) ? alpha0 * alpha_amp * shape.deriv(unit(x)) / len : 0.0;
    };
    p.beta_deriv = [=](double x) {
        return in(x) ? beta0 * beta_amp * shape.deriv(unit(x)) / len : 0.0;
    };
    // Shapes take values in [0, 1].
    p.alpha_min = alpha0 * std::min(1.0, 1.0 + alpha_amp);
    p.beta_min = beta0 * std::min(1.0, 1.0 + beta_amp);
    for (double s : shape.kinks) {
        p.kinks.push_back(lo + s * len);
    }
    return p;
}

}  // namespace detail

/// alpha = alpha0, beta = beta0 everywhere; `omega` is the nominal
/// variable-coefficient interval (empty variation).
inline CoefficientProfile constant(double alpha0, double beta0, Interval omega) {
    auto p = detail::from_shape("constant", detail::cosine_shape(), alpha0, beta0, 0.0, 0.0, omega);
    p.alpha = [alpha0](double) { return alpha0; };
    p.beta = [beta0](double) { return beta0; };
    p.alpha_deriv = [](double) { return 0.0; };
    p.beta_deriv = [](double) { return 0.0; };
    p.kinks.clear();
    return p;
}

/// c0 * (1 + amp * (1 - cos(2 pi s)) / 2) on omega, s the unit coordinate.
/// C^1 with a peak of c0 * (1 + amp) at the midpoint.
inline CoefficientProfile cosine_ramp(double alpha0, double beta0, double alpha_amp,
                                      double beta_amp, Interval omega) {
    return detail::from_shape("cosine_ramp", detail::cosine_shape(), alpha0, beta0, alpha_amp,
                              beta_amp, omega);
}

/// Piecewise-linear tent: c0 * (1 + amp * (1 - |2 s - 1|)). Lipschitz, not C^1.
inline CoefficientProfile linear_ramp(double alpha0, double beta0, double alpha_amp,
                                      double beta_amp, Interval omega) {
    return detail::from_shape("linear_ramp", detail::tent_shape(), alpha0, beta0, alpha_amp,
                              beta_amp, omega);
}

}  // namespace profiles

namespace initial_data {

/// height * cos^4(pi (x - center) / width) on |x - center| < width / 2.
inline double bump(const BumpSpec& b, double x) {
    const double z = (x - b.center) / b.width;
    if (std::abs(z) >= 0.5) return 0.0;
    const double c = std::cos(std::numbers::pi * z);
    return b.height * c * c * c * c;
}

inline double bump_deriv(const BumpSpec& b, double x) {
    const double z = (x - b.center) / b.width;
    if (std::abs(z) >= 0.5) return 0.0;
    const double k = std::numbers::pi / b.width;
    const double c = std::cos(std::numbers::pi * z);
    const double s = std::sin(std::numbers::pi * z);
    return -4.0 * b.height * k * c * c * c * s;
}

inline double bump_second_deriv(const BumpSpec& b, double x) {
    const double z = (x - b.center) / b.width;
    if (std::abs(z) >= 0.5) return 0.0;
    const double k = std::numbers::pi / b.width;
    const double c = std::cos(std::numbers::pi * z);
    const double s = std::sin(std::numbers::pi * z);
    return 4.0 * b.height * k * k * c * c * (3.0 * s * s - c * c);
}

/// Displacement bump u0 and/or velocity bump u1; either may be absent.
inline InitialData bumps(std::optional<BumpSpec> u0, std::optional<BumpSpec> u1) {
    for (const auto& b : {u0, u1}) {
        if (b && !(b->width > 0.0)) {
            throw Error("bump width must be positive");
        }
    }
    InitialData d;
    std::ostringstream name;
    name << "bumps";
    if (u0) {
        d.u0 = [b = *u0](double x) { return bump(b, x); };
        d.u0_deriv = [b = *u0](double x) { return bump_deriv(b, x); };
        d.u0_second_deriv = [b = *u0](double x) { return bump_second_deriv(b, x); };
        name << " u0(" << u0->center << "," << u0->width << "," << u0->height << ")";
    } else {
        d.u0 = d.u0_deriv = d.u0_second_deriv = [](double) { return 0.0; };
    }
    if (u1) {
        d.u1 = [b = *u1](double x) { return bump(b, x); };
        name << " u1(" << u1->center << "," << u1->width << "," << u1->height << ")";
    } else {
        d.u1 = [](double) { return 0.0; };
    }
    d.name = name.str();
    d.zero = (!u0 || u0->height == 0.0) && (!u1 || u1->height == 0.0);
    if (u0 && u1) {
        d.omega0 = Interval::hull(u0->support(), u1->support());
    } else if (u0 || u1) {
        d.omega0 = u0 ? u0->support() : u1->support();
    } else {
        d.omega0 = {0.0, 1.0};
    }
    for (const auto& b : {u0, u1}) {
        if (b) {
            d.kinks.push_back(b->support().lo);
            d.kinks.push_back(b->support().hi);
        }
    }
    return d;
}

inline InitialData zero(Interval omega0) {
    auto d = bumps(std::nullopt, std::nullopt);
    d.omega0 = omega0;
    d.name = "zero";
    return d;
}

}  // namespace initial_data

/// Outcome of a sampled invariant check.
struct CheckResult {
    bool ok = true;
    std::string detail;
};

/// Positivity, far-field constancy and derivative consistency of a profile,
/// sampled on `samples` points over a window three times the width of omega_in.
inline CheckResult validate_profile(const CoefficientProfile& p, std::size_t samples = 10000,
                                    double fd_tol = 1e-5) {
    const double len = p.omega_in.length();
    const double a = p.omega_in.lo - len;
    const double b = p.omega_in.hi + len;
    const double h = (b - a) / static_cast<double>(samples - 1);
    const double eps = 1e-6 * len;
    std::ostringstream why;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = a + h * static_cast<double>(i);
        const double al = p.alpha(x);
        const double be = p.beta(x);
        if (!(al >= p.alpha_min && be >= p.beta_min && al > 0.0 && be > 0.0)) {
            why << "coefficient below its lower bound at x=" << x;
            return {false, why.str()};
        }
        if (!p.omega_in.contains(x) &&
            (std::abs(al - p.alpha0) > 1e-14 * p.alpha0 || std::abs(be - p.beta0) > 1e-14 * p.beta0)) {
            why << "coefficient not constant outside omega_in at x=" << x;
            return {false, why.str()};
        }
        bool near_kink = std::any_of(p.kinks.begin(), p.kinks.end(),
                                     [&](double k) { return std::abs(x - k) < 2.0 * eps; });
        if (!near_kink) {
            const double fa = (p.alpha(x + eps) - p.alpha(x - eps)) / (2.0 * eps);
            const double fb = (p.beta(x + eps) - p.beta(x - eps)) / (2.0 * eps);
            const double sa = std::max(1.0, std::abs(p.alpha_deriv(x)));
            const double sb = std::max(1.0, std::abs(p.beta_deriv(x)));
            if (std::abs(fa - p.alpha_deriv(x)) > fd_tol * sa ||
                std::abs(fb - p.beta_deriv(x)) > fd_tol * sb) {
                why << "supplied derivative disagrees with finite differences at x=" << x;
                return {false, why.str()};
            }
        }
    }
    return {true, "ok"};
}

/// Initial data vanish outside omega0 (sampled).
inline CheckResult validate_data(const InitialData& d, std::size_t samples = 10000) {
    const double len = std::max(d.omega0.length(), 1e-12);
    const double a = d.omega0.lo - len;
    const double b = d.omega0.hi + len;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(samples - 1);
        if (!d.omega0.contains(x) && (d.u0(x) != 0.0 || d.u1(x) != 0.0)) {
            std::ostringstream why;
            why << "initial data nonzero outside omega0 at x=" << x;
            return {false, why.str()};
        }
    }
    return {true, "ok"};
}

/// Hull of omega_in and omega0: the interval on which local energies and
/// the travel-time coordinate are defined.
inline Interval working_interval(const CoefficientProfile& p, const InitialData& d) {
    return Interval::hull(p.omega_in, d.omega0);
}

/// Travel-time coordinate y(x) = (1/t0) int_{lo}^{x} sqrt(beta/alpha),
/// normalised so that the working interval maps onto (0, 1), together
/// with the derived density rho(y) = 1/sqrt(alpha beta) and drift
/// gamma(y) = rho'(y)/rho(y).
class Transform {
public:
    Transform(CoefficientProfile profile, Interval working, std::size_t resolution,
              double quad_tol = 1e-10)
        : profile_(std::move(profile)), working_(working), tol_(quad_tol) {
        if (resolution < 16) {
            throw Error("transform resolution must be at least 16");
        }
        if (!(working_.hi > working_.lo)) {
            throw Error("working interval must have positive length");
        }
        for (double k : profile_.kinks) {
            if (working_.contains(k)) kinks_.push_back(k);
        }
        const std::size_t n = resolution;
        hx_ = working_.length() / static_cast<double>(n);
        cumulative_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = x_node(i);
            const double b = x_node(i + 1);
            const double piece = slowness_integral(a, b, tol_ / static_cast<double>(n));
            if (!(piece > 0.0)) {
                throw Error("travel-time map is not increasing; alpha or beta is not positive");
            }
            cumulative_[i + 1] = cumulative_[i] + piece;
        }
        t0_ = cumulative_.back();
        rho0_ = 1.0 / profile_.far_impedance();

        y_of_x_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) y_of_x_[i] = cumulative_[i] / t0_;
        y_of_x_.back() = 1.0;
        x_of_y_.resize(n + 1);
        rho_of_y_.resize(n + 1);
        gamma_of_y_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double y = static_cast<double>(i) / static_cast<double>(n);
            x_of_y_[i] = x_at(y);
            rho_of_y_[i] = rho_at(y);
            gamma_of_y_[i] = gamma_at(y);
        }
    }

    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double rho0() const { return rho0_; }
    [[nodiscard]] const Interval& working() const { return working_; }
    [[nodiscard]] const CoefficientProfile& profile() const { return profile_; }
    [[nodiscard]] std::size_t resolution() const { return y_of_x_.size() - 1; }

    /// Samples of y on the uniform x grid over the working interval.
    [[nodiscard]] const std::vector<double>& y_of_x() const { return y_of_x_; }
    /// Samples of x, rho, gamma on the uniform y grid over [0, 1].
    [[nodiscard]] const std::vector<double>& x_of_y() const { return x_of_y_; }
    [[nodiscard]] const std::vector<double>& rho_of_y() const { return rho_of_y_; }
    [[nodiscard]] const std::vector<double>& gamma_of_y() const { return gamma_of_y_; }

    [[nodiscard]] double x_node(std::size_t i) const {
        return i + 1 == cumulative_.size() ? working_.hi : working_.lo + hx_ * static_cast<double>(i);
    }

    /// dy/dx = sqrt(beta/alpha) / t0.
    [[nodiscard]] double dy_dx(double x) const {
        return std::sqrt(profile_.beta(x) / profile_.alpha(x)) / t0_;
    }

    [[nodiscard]] double y_at(double x) const {
        if (x <= working_.lo) {
            return (x - working_.lo) / (t0_ * profile_.far_speed());
        }
        if (x >= working_.hi) {
            return 1.0 + (x - working_.hi) / (t0_ * profile_.far_speed());
        }
        auto i = static_cast<std::size_t>((x - working_.lo) / hx_);
        i = std::min(i, cumulative_.size() - 2);
        const double a = x_node(i);
        return (cumulative_[i] + slowness_integral(a, x, 1e-3 * tol_)) / t0_;
    }

    /// Inverse of y_at: table bracket, then safeguarded Newton to 1e-12.
    [[nodiscard]] double x_at(double y) const {
        if (y <= 0.0) {
            return working_.lo + y * t0_ * profile_.far_speed();
        }
        if (y >= 1.0) {
            return working_.hi + (y - 1.0) * t0_ * profile_.far_speed();
        }
        const double target = y * t0_;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, cumulative_.size() - 1) - 1;
        double lo = x_node(i);
        double hi = x_node(i + 1);
        double x = lo + (hi - lo) * (target - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
        for (int it_n = 0; it_n < 100; ++it_n) {
            const double g = y_at(x) - y;
            if (g > 0.0) hi = x; else lo = x;
            const double step = g / dy_dx(x);
            double next = x - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - x) <= 1e-12 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15) {
                return next;
            }
            x = next;
        }
        throw Error("inversion of the travel-time map failed to converge");
    }

    /// rho(y) = 1 / sqrt(alpha(x(y)) beta(x(y))).
    [[nodiscard]] double rho_at(double y) const {
        const double x = x_at(y);
        return 1.0 / std::sqrt(profile_.alpha(x) * profile_.beta(x));
    }

    /// gamma in terms of x: -(t0/2) sqrt(alpha/beta) (alpha'/alpha + beta'/beta).
    [[nodiscard]] double gamma_at_x(double x) const {
        const double al = profile_.alpha(x);
        const double be = profile_.beta(x);
        return -0.5 * t0_ * std::sqrt(al / be) * (profile_.alpha_deriv(x) / al + profile_.beta_deriv(x) / be);
    }

    /// gamma(y) = rho'(y)/rho(y), by the chain rule through x(y). Zero outside (0,1).
    [[nodiscard]] double gamma_at(double y) const {
        if (y <= 0.0 || y >= 1.0) return 0.0;
        return gamma_at_x(x_at(y));
    }

    /// Kinks of the profile mapped into y.
    [[nodiscard]] std::vector<double> kinks_in_y() const {
        std::vector<double> out;
        for (double k : kinks_) out.push_back(y_at(k));
        return out;
    }
    [[nodiscard]] const std::vector<double>& kinks() const { return kinks_; }

private:
    double slowness_integral(double a, double b, double tol) const {
        auto f = [this](double x) { return std::sqrt(profile_.beta(x) / profile_.alpha(x)); };
        return numerics::integrate_piecewise(f, a, b, kinks_, tol);
    }

    CoefficientProfile profile_;
    Interval working_;
    double tol_;
    double hx_ = 0.0;
    double t0_ = 0.0;
    double rho0_ = 0.0;
    std::vector<double> kinks_;
    std::vector<double> cumulative_;
    std::vector<double> y_of_x_;
    std::vector<double> x_of_y_;
    std::vector<double> rho_of_y_;
    std::vector<double> gamma_of_y_;
};

/// Builds the travel-time tables over `working` (defaults to omega_in).
inline Transform build_transform(const CoefficientProfile& profile, std::size_t resolution,
                                 std::optional<Interval> working = std::nullopt,
                                 double quad_tol = 1e-10) {
    return Transform(profile, working.value_or(profile.omega_in), resolution, quad_tol);
}

/// Half the sup-norm of gamma over (0,1), sampled in y.
inline double drift_bound(const Transform& tr, std::size_t samples = 100000) {
    auto g = [&tr](double y) { return tr.gamma_at(y); };
    // Stay strictly inside (0,1) so one-sided values at the ends are kept.
    const double eps = 1e-13;
    return 0.5 * numerics::sup_abs(g, eps, 1.0 - eps, samples, tr.kinks_in_y());
}

/// The same bound from the x-space expression
/// (t0/4) sup |alpha'/sqrt(alpha beta) + sqrt(alpha/beta^3) beta'|.
inline double drift_bound_x(const CoefficientProfile& p, double t0, Interval working,
                            std::size_t samples = 100000) {
    auto f = [&p](double x) {
        const double al = p.alpha(x);
        const double be = p.beta(x);
        return p.alpha_deriv(x) / std::sqrt(al * be) + std::sqrt(al / (be * be * be)) * p.beta_deriv(x);
    };
    const double eps = 1e-13 * std::max(1.0, working.length());
    return 0.25 * t0 * numerics::sup_abs(f, working.lo + eps, working.hi - eps, samples, p.kinks);
}

/// Limiting constant (1/(2 sqrt(alpha0 beta0))) int beta u1.
inline double limit_constant(const CoefficientProfile& p, const InitialData& d,
                             double quad_tol = 1e-10) {
    if (d.zero) return 0.0;
    std::vector<double> breaks = p.kinks;
    breaks.insert(breaks.end(), d.kinks.begin(), d.kinks.end());
    auto f = [&](double x) { return p.beta(x) * d.u1(x); };
    const double integral = numerics::integrate_piecewise(f, d.omega0.lo, d.omega0.hi, breaks, quad_tol);
    return integral / (2.0 * p.far_impedance());
}

/// sup|alpha|^{3/2} sup|beta|^{1/2} || ((alpha beta)^{-1/2})' ||^2_{L2} over omega_in.
inline double variation_constant(const CoefficientProfile& p, std::size_t samples = 100000,
                                 double quad_tol = 1e-10) {
    const Interval w = p.omega_in;
    auto al = [&p](double x) { return p.alpha(x); };
    auto be = [&p](double x) { return p.beta(x); };
    const double sup_a = numerics::sup_abs(al, w.lo, w.hi, samples, p.kinks);
    const double sup_b = numerics::sup_abs(be, w.lo, w.hi, samples, p.kinks);
    auto dsq = [&p](double x) {
        const double a = p.alpha(x);
        const double b = p.beta(x);
        const double d = -0.5 * std::pow(a * b, -1.5) * (p.alpha_deriv(x) * b + a * p.beta_deriv(x));
        return d * d;
    };
    const double l2sq = numerics::integrate_piecewise(dsq, w.lo, w.hi, p.kinks, quad_tol);
    return std::pow(sup_a, 1.5) * std::sqrt(sup_b) * l2sq;
}

/// Whether alpha is constant (relative 1e-12) on the sampled neighbourhood of omega_in.
inline bool alpha_is_constant(const CoefficientProfile& p, std::size_t samples = 100000) {
    auto dev = [&p](double x) { return p.alpha(x) - p.alpha0; };
    const double len = p.omega_in.length();
    return numerics::sup_abs(dev, p.omega_in.lo - 0.1 * len, p.omega_in.hi + 0.1 * len, samples, p.kinks) <=
           1e-12 * p.alpha0;
}

/// Algebraic-decay smallness parameter
/// sup|beta|^{1/2} sup|(beta^{-1/2})'| |omega_in|, defined only for constant alpha.
inline std::optional<double> algebraic_decay_parameter(const CoefficientProfile& p,
                                                       std::size_t samples = 100000) {
    if (!alpha_is_constant(p, samples)) {
        return std::nullopt;
    }
    const Interval w = p.omega_in;
    auto be = [&p](double x) { return p.beta(x); };
    auto d = [&p](double x) { return -0.5 * std::pow(p.beta(x), -1.5) * p.beta_deriv(x); };
    const double sup_b = numerics::sup_abs(be, w.lo, w.hi, samples, p.kinks);
    const double sup_d = numerics::sup_abs(d, w.lo, w.hi, samples, p.kinks);
    return std::sqrt(sup_b) * sup_d * w.length();
}

}  // namespace wavedecay

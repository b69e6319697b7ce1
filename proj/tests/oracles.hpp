#pragma once
// Reference computations for the tests, written independently of the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return s * h / 3.0;
}

/// Cosine-ramp coefficient c0 (1 + amp (1 - cos 2 pi s)/2) on (lo, hi).
inline double ramp(double c0, double amp, double lo, double hi, double x) {
    if (x <= lo || x >= hi) return c0;
    const double s = (x - lo) / (hi - lo);
    return c0 * (1.0 + amp * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * s)));
}

inline double ramp_deriv(double c0, double amp, double lo, double hi, double x) {
    if (x <= lo || x >= hi) return 0.0;
    const double len = hi - lo;
    const double s = (x - lo) / len;
    return c0 * amp * std::numbers::pi * std::sin(2.0 * std::numbers::pi * s) / len;
}

/// h cos^4(pi (x - c)/w) on |x - c| < w/2.
inline double bump(double c, double w, double h, double x) {
    const double z = (x - c) / w;
    if (std::abs(z) >= 0.5) return 0.0;
    const double k = std::cos(std::numbers::pi * z);
    return h * k * k * k * k;
}

/// Antiderivative of cos^4(pi z) in z, for the bump integral.
inline double bump_integral(double c, double w, double h, double a, double b) {
    auto prim = [&](double x) {
        const double z = std::clamp((x - c) / w, -0.5, 0.5);
        const double t = std::numbers::pi * z;
        // int cos^4 = 3t/8 + sin(2t)/4 + sin(4t)/32, divided by pi for dz.
        return w * h * (3.0 * t / 8.0 + std::sin(2.0 * t) / 4.0 + std::sin(4.0 * t) / 32.0) / std::numbers::pi;
    };
    return prim(b) - prim(a);
}

/// Classical RK4 for the weight system
///   p1' = l p1 + d (p1 - p2),  p2' = -l p2 - d (p1 - p2),  p1(0) = p2(0) = 1,
/// returning the values at y after `steps` uniform steps.
inline std::pair<double, double> weights_rk4(double d, double l, double y, std::size_t steps) {
    auto f = [&](double a, double b) {
        return std::pair<double, double>{l * a + d * (a - b), -l * b - d * (a - b)};
    };
    const double h = y / static_cast<double>(steps);
    double p = 1.0;
    double q = 1.0;
    for (std::size_t i = 0; i < steps; ++i) {
        auto [k1p, k1q] = f(p, q);
        auto [k2p, k2q] = f(p + 0.5 * h * k1p, q + 0.5 * h * k1q);
        auto [k3p, k3q] = f(p + 0.5 * h * k2p, q + 0.5 * h * k2q);
        auto [k4p, k4q] = f(p + h * k3p, q + h * k3q);
        p += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0;
        q += h * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0;
    }
    return {p, q};
}

/// Root of tanh(s) (d + l) - s, s = sqrt(d^2 + l^2), by plain bisection in
/// long double on [lo, hi] (sign change required).
inline long double critical_rate_bisect(long double d, long double lo, long double hi) {
    auto g = [d](long double l) {
        const long double s = std::sqrt(d * d + l * l);
        return std::tanh(s) * (d + l) - s;
    };
    long double glo = g(lo);
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        const long double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5L * (lo + hi);
}

}  // namespace oracle

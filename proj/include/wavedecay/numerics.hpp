#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace wavedecay {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Open interval (lo, hi) of the real line.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double length() const { return hi - lo; }
    [[nodiscard]] bool contains(double x) const { return x > lo && x < hi; }
    [[nodiscard]] bool contains_closed(double x) const { return x >= lo && x <= hi; }
    [[nodiscard]] static Interval hull(const Interval& a, const Interval& b) {
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
};

namespace numerics {

namespace detail {

template <typename F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance tol.
///
/// The interval is first split into a few panels so that narrow features
/// are not missed by the initial five-point estimate.
template <std::invocable<double> F>
[[nodiscard]] double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10,
                                      int max_depth = 48) {
    if (!(b > a)) {
        return b == a ? 0.0 : -adaptive_simpson(f, b, a, tol, max_depth);
    }
    constexpr int panels = 8;
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + p * w;
        const double pb = (p == panels - 1) ? b : pa + w;
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa);
        const double fb = f(pb);
        const double fm = f(pm);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_step(f, pa, fa, pb, fb, pm, fm, whole, tol / panels, max_depth);
    }
    return total;
}

/// Adaptive Simpson over [a, b], restarted at every breakpoint inside (a, b).
template <std::invocable<double> F>
[[nodiscard]] double integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                                         double tol = 1e-10) {
    if (!(b > a)) {
        return 0.0;
    }
    std::vector<double> nodes{a};
    for (double x : breaks) {
        if (x > a && x < b) {
            nodes.push_back(x);
        }
    }
    nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    double total = 0.0;
    const double piece_tol = tol / static_cast<double>(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        total += adaptive_simpson(f, nodes[i], nodes[i + 1], piece_tol);
    }
    return total;
}

/// Maximum of |f| on [a, b]: uniform sampling with `samples` points, both
/// one-sided limits at every breakpoint, then a golden-section polish of
/// the best sample within its neighbouring cells.
template <std::invocable<double> F>
[[nodiscard]] double sup_abs(F&& f, double a, double b, std::size_t samples,
                             std::span<const double> breaks = {}) {
    if (samples < 2) {
        samples = 2;
    }
    const double h = (b - a) / static_cast<double>(samples - 1);
    double best = 0.0;
    double best_x = a;
    auto probe = [&](double x) {
        const double v = std::abs(f(x));
        if (v > best) {
            best = v;
            best_x = x;
        }
    };
    for (std::size_t i = 0; i < samples; ++i) {
        probe(i + 1 == samples ? b : a + h * static_cast<double>(i));
    }
    const double nudge = 1e-11 * std::max(1.0, std::abs(b - a));
    for (double x : breaks) {
        if (x >= a && x <= b) {
            probe(x);
            if (x - nudge >= a) probe(x - nudge);
            if (x + nudge <= b) probe(x + nudge);
        }
    }
    // Polish only on a bracket free of breakpoints, where |f| is smooth.
    double lo = std::max(a, best_x - h);
    double hi = std::min(b, best_x + h);
    for (double x : breaks) {
        if (x > lo && x < best_x) lo = x;
        if (x < hi && x > best_x) hi = x;
    }
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = std::abs(f(x1));
    double f2 = std::abs(f(x2));
    for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = std::abs(f(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = std::abs(f(x2));
        }
    }
    return std::max({best, f1, f2});
}

/// Bisection on a sign-changing bracket; g(lo) and g(hi) must differ in sign.
/// Iterates geometrically while the bracket spans more than a factor two
/// (positive brackets only), then arithmetically until hi - lo <= abs_tol
/// or the bracket no longer shrinks in floating point.
template <std::invocable<double> G>
[[nodiscard]] double bisect(G&& g, double lo, double hi, double abs_tol, double rel_tol = 0.0,
                            int max_iter = 2000) {
    double glo = g(lo);
    for (int it = 0; it < max_iter; ++it) {
        if (hi - lo <= abs_tol || hi - lo <= rel_tol * std::abs(hi)) {
            break;
        }
        const double mid = (lo > 0.0 && hi > 2.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Composite trapezoid rule on uniform samples.
[[nodiscard]] inline double trapezoid(std::span<const double> values, double h) {
    if (values.size() < 2) {
        return 0.0;
    }
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        s += values[i];
    }
    return s * h;
}

/// `n` points spaced logarithmically from lo to hi inclusive.
[[nodiscard]] inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Tagged rate value: a finite number or the +infinity sentinel. Never
/// carries an IEEE infinity.
struct Rate {
    bool infinite = false;
    double value = 0.0;

    [[nodiscard]] static Rate finite(double v) { return {false, v}; }
    [[nodiscard]] static Rate unbounded() { return {true, 0.0}; }

    [[nodiscard]] bool operator<(double x) const { return !infinite && value < x; }
    /// Numeric view; the sentinel maps to the largest double.
    [[nodiscard]] double as_double() const {
        return infinite ? std::numeric_limits<double>::max() : value;
    }
    friend bool operator==(const Rate&, const Rate&) = default;
};

}  // namespace numerics
}  // namespace wavedecay

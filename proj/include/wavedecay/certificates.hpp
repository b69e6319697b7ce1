#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "numerics.hpp"
#include "profiles.hpp"

namespace wavedecay {

using numerics::Rate;

namespace weights {

/// artanh(sqrt(1+l^2)/(1+l)) for l > 0, evaluated through the exact
/// complement 1 - z = 2 l / ((1+l)(1+l+sqrt(1+l^2))) so that it stays
/// accurate when z is within rounding of 1.
[[nodiscard]] inline double artanh_ratio(double l) {
    const double r = std::sqrt(1.0 + l * l);
    const double one_minus_z = 2.0 * l / ((1.0 + l) * (1.0 + l + r));
    const double z = r / (1.0 + l);
    if (!(one_minus_z > 0.0 && z > 0.0)) {
        throw Error("artanh argument left (0,1)");
    }
    return 0.5 * std::log((1.0 + z) / one_minus_z);
}

/// Scaled root function g(l) = d sqrt(1+l^2) - artanh(sqrt(1+l^2)/(1+l)),
/// l = lambda / d. Negative below the critical ratio, positive above.
[[nodiscard]] inline double root_function(double drift, double ratio) {
    return drift * std::sqrt(1.0 + ratio * ratio) - artanh_ratio(ratio);
}

/// Margin of the admissibility inequality tanh(s) < s/(d + lambda),
/// s = sqrt(d^2 + lambda^2): returns s/(d+lambda) - tanh(s), computed from
/// the complements 1 - tanh(s) and 1 - s/(d+lambda). Positive iff the
/// weights stay positive on [0,1].
[[nodiscard]] inline double admissibility_margin(double drift, double lambda) {
    const double s = std::hypot(drift, lambda);
    const double sum = drift + lambda;
    const double one_minus_tanh = 2.0 / (std::exp(2.0 * s) + 1.0);
    const double one_minus_ratio = 2.0 * drift * lambda / (sum * (sum + s));
    return one_minus_tanh - one_minus_ratio;
}

/// Supremum of admissible weight rates: the unique positive root of
/// tanh(sqrt(d^2+l^2)) = sqrt(d^2+l^2)/(d+l). Returns the unbounded
/// sentinel for d = 0, where every rate is admissible.
[[nodiscard]] inline Rate critical_rate(double drift) {
    if (drift < 0.0 || !std::isfinite(drift)) {
        throw Error("drift bound must be finite and nonnegative");
    }
    if (drift == 0.0) {
        return Rate::unbounded();
    }
    auto g = [drift](double l) { return root_function(drift, l); };
    double lo = 1.0;
    double hi = 1.0;
    if (g(1.0) < 0.0) {
        int n = 0;
        while (g(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++n > 200) throw Error("critical rate: bracketing failed");
        }
    } else {
        int n = 0;
        while (g(lo) >= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (++n > 200 || lo == 0.0) throw Error("critical rate: bracketing failed");
        }
    }
    // Tighter than 1e-12 absolute for ratios of order one; relative control
    // keeps tiny roots (large drift) meaningful.
    const double ratio = numerics::bisect(g, lo, hi, 1e-12 * std::min(1.0, lo), 4e-16);
    // Polish on the unscaled equation: keep the candidate with the smallest residual.
    double best = ratio;
    double best_res = std::abs(admissibility_margin(drift, drift * ratio));
    for (double c : {std::nextafter(ratio, 0.0), std::nextafter(ratio, 2.0 * ratio)}) {
        const double r = std::abs(admissibility_margin(drift, drift * c));
        if (r < best_res) {
            best = c;
            best_res = r;
        }
    }
    return Rate::finite(drift * best);
}

/// Explicit lower bound sqrt(2) d e^{-2d} sqrt(1 - 4 d e^{-4d}) for the critical rate.
[[nodiscard]] inline double explicit_rate(double drift) {
    if (drift < 0.0) {
        throw Error("drift bound must be nonnegative");
    }
    const double radicand = 1.0 - 4.0 * drift * std::exp(-4.0 * drift);
    if (!(radicand > 0.0)) {
        throw Error("explicit rate radicand is not positive");
    }
    return std::sqrt(2.0) * drift * std::exp(-2.0 * drift) * std::sqrt(radicand);
}

/// Upper end of the admissible q range for the coth inequality at a:
/// 1 + (e^{4a} + 4a - e^{2a} sqrt(e^{4a} + 8a)) / (8 a^2), rewritten as
/// 1 + 2 / (e^{4a} + 4a + e^{2a} sqrt(e^{4a} + 8a)) to avoid cancellation.
[[nodiscard]] inline double coth_inequality_bound(double a) {
    const double e2 = std::exp(2.0 * a);
    const double e4 = e2 * e2;
    return 1.0 + 2.0 / (e4 + 4.0 * a + e2 * std::sqrt(e4 + 8.0 * a));
}

struct CothCheck {
    bool in_range = false;  ///< 1 < q < bound(a)
    bool holds = false;     ///< q / tanh(a q) > 1 + sqrt(q^2 - 1), evaluated when in range
};

/// Tests q/tanh(aq) > 1 + sqrt(q^2-1) inside its admissible range.
[[nodiscard]] inline CothCheck coth_inequality(double a, double q) {
    if (!(a > 0.0) || !(q > 1.0)) {
        throw Error("coth inequality requires a > 0 and q > 1");
    }
    CothCheck c;
    c.in_range = q < coth_inequality_bound(a);
    if (c.in_range) {
        const double qm1 = q - 1.0;
        c.holds = q / std::tanh(a * q) > 1.0 + std::sqrt(qm1 * (q + 1.0));
    }
    return c;
}

}  // namespace weights

/// Closed-form weights solving
///   w1' - d (w1 - w2) =  l w1,
///  -w2' - d (w1 - w2) =  l w2,   w1(0) = w2(0) = 1
/// on [0,1], with d the drift bound and l the decay parameter.
struct WeightPair {
    double lambda = 0.0;
    double drift = 0.0;

    [[nodiscard]] double phi1(double y) const { return eval(y, lambda - drift); }
    [[nodiscard]] double phi2(double y) const { return eval(y, -(lambda + drift)); }
    [[nodiscard]] double dphi1(double y) const { return deval(y, lambda - drift); }
    [[nodiscard]] double dphi2(double y) const { return deval(y, -(lambda + drift)); }

private:
    [[nodiscard]] double s() const { return std::hypot(lambda, drift); }
    // sinh(s y)/s, continuous at s = 0.
    [[nodiscard]] static double sinhc(double s, double y) {
        return s * y < 1e-8 ? y * (1.0 + (s * y) * (s * y) / 6.0) : std::sinh(s * y) / s;
    }
    [[nodiscard]] double eval(double y, double c) const {
        const double sv = s();
        return std::exp(drift * y) * (std::cosh(sv * y) + c * sinhc(sv, y));
    }
    [[nodiscard]] double deval(double y, double c) const {
        const double sv = s();
        const double e = std::exp(drift * y);
        return drift * eval(y, c) + e * (sv * sv * sinhc(sv, y) + c * std::cosh(sv * y));
    }
};

/// Validated weights: requires 0 <= lambda < critical_rate(drift).
[[nodiscard]] inline WeightPair build_weights(double drift, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error("weight rate must be finite and nonnegative");
    }
    const Rate crit = weights::critical_rate(drift);
    if (!crit.infinite && !(lambda < crit.value)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weight rate " << lambda << " is not below the critical rate " << crit.value
            << "; the second weight would not stay positive";
        throw Error(msg.str());
    }
    return WeightPair{lambda, drift};
}

/// Numerical knobs for certificate evaluation.
struct CertificateOptions {
    std::size_t transform_resolution = 4096;
    std::size_t sup_samples = 100000;
    double quad_tol = 1e-10;
    std::optional<double> weight_rate;  ///< override of the explicit rate, must stay below critical
};

/// All decay-rate scalars for a profile and initial data.
///
/// Rates follow the amplitude convention: norms decay like e^{-Lambda t},
/// energies like e^{-2 Lambda t}.
struct RateCertificate {
    double t0 = 0.0;
    double gamma0 = 0.0;
    double rho0 = 0.0;
    Rate lambda_star;
    double lambda0 = 0.0;
    double Lambda1 = 0.0;
    double b0 = 0.0;
    double b0_t0 = 0.0;
    bool improved_rate_applicable = false;
    std::optional<Rate> Lambda2;
    std::optional<double> eta;
    std::optional<double> algebraic_rate;
    double u_infty = 0.0;
    /// Rate used for the weighted energy (lambda0 unless overridden).
    double weight_rate = 0.0;
    /// Constant coefficients: the solution settles in finite time.
    bool finite_time = false;

    [[nodiscard]] WeightPair weights() const { return build_weights(gamma0, weight_rate); }

    friend bool operator==(const RateCertificate&, const RateCertificate&) = default;
};

/// Computes the certificate; the travel-time coordinate is taken over the
/// hull of omega_in and the data support.
[[nodiscard]] inline RateCertificate certify(const CoefficientProfile& profile, const InitialData& data,
                                             const CertificateOptions& opt = {}) {
    const Interval working = working_interval(profile, data);
    const Transform tr(profile, working, opt.transform_resolution, opt.quad_tol);
    RateCertificate c;
    c.t0 = tr.t0();
    c.rho0 = tr.rho0();
    c.gamma0 = drift_bound(tr, opt.sup_samples);
    c.lambda_star = weights::critical_rate(c.gamma0);
    c.lambda0 = weights::explicit_rate(c.gamma0);
    c.Lambda1 = c.lambda0 / (2.0 * c.t0);
    c.b0 = variation_constant(profile, opt.sup_samples, opt.quad_tol);
    c.b0_t0 = c.b0 * c.t0;
    c.improved_rate_applicable = c.b0_t0 < 1.0;
    if (c.improved_rate_applicable) {
        c.Lambda2 = c.b0_t0 > 0.0 ? Rate::finite(std::abs(std::log(c.b0_t0)) / (2.0 * c.t0))
                                  : Rate::unbounded();
    }
    c.eta = algebraic_decay_parameter(profile, opt.sup_samples);
    if (c.eta && *c.eta < 1.0) {
        c.algebraic_rate = 0.5 * (1.0 - *c.eta);
    }
    c.u_infty = limit_constant(profile, data, opt.quad_tol);
    c.finite_time = c.gamma0 == 0.0;
    c.weight_rate = opt.weight_rate.value_or(c.lambda0);
    (void)build_weights(c.gamma0, c.weight_rate);
    return c;
}

namespace io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_rate(const Rate& r) { return r.infinite ? "inf" : format_double(r.value); }

}  // namespace io

/// Flat key-value serialisation, one scalar per line, 17 significant digits.
/// Absent optional values are written as "none".
inline void write_certificate(std::ostream& os, const RateCertificate& c) {
    using io::format_double;
    using io::format_rate;
    os << "t0 = " << format_double(c.t0) << '\n';
    os << "gamma0 = " << format_double(c.gamma0) << '\n';
    os << "lambda_star = " << format_rate(c.lambda_star) << '\n';
    os << "lambda0 = " << format_double(c.lambda0) << '\n';
    os << "Lambda1 = " << format_double(c.Lambda1) << '\n';
    os << "b0 = " << format_double(c.b0) << '\n';
    os << "b0_t0 = " << format_double(c.b0_t0) << '\n';
    os << "thm2_applicable = " << (c.improved_rate_applicable ? "true" : "false") << '\n';
    os << "Lambda2 = " << (c.Lambda2 ? format_rate(*c.Lambda2) : "none") << '\n';
    os << "eta = " << (c.eta ? format_double(*c.eta) : "none") << '\n';
    os << "charao_rate = " << (c.algebraic_rate ? format_double(*c.algebraic_rate) : "none") << '\n';
    os << "u_infty = " << format_double(c.u_infty) << '\n';
}

}  // namespace wavedecay

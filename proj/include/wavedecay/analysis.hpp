#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "certificates.hpp"
#include "numerics.hpp"
#include "profiles.hpp"
#include "solver.hpp"

namespace wavedecay {

/// Three consecutive levels around time t; the time derivative is the
/// centred difference (next - prev) / (2 dt).
struct TimeSlice {
    double t = 0.0;
    std::span<const double> prev;
    std::span<const double> curr;
    std::span<const double> next;
};

/// Per-time diagnostics on the analysis interval.
struct TraceRecord {
    double t = 0.0;
    double e_loc = 0.0;
    double e_weighted = 0.0;
    double l2_ut = 0.0;
    double l2_ux = 0.0;
    double h1_dist = 0.0;
    double balance_residual = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Node weights reproducing the integral over [a, b] of the piecewise-linear
/// interpolant of nodal values, plus interpolation weights for u(a), u(b).
class IntervalQuadrature {
public:
    IntervalQuadrature(const GridSpec& g, Interval omega) : omega_(omega) {
        const double h = g.h();
        if (!(omega.lo > g.x_left && omega.hi < g.x_right)) {
            throw Error("analysis interval must lie strictly inside the grid");
        }
        first_ = static_cast<std::size_t>(std::floor((omega.lo - g.x_left) / h));
        last_ = std::min(g.nx, static_cast<std::size_t>(std::ceil((omega.hi - g.x_left) / h)));
        weights_.assign(last_ - first_ + 1, 0.0);
        for (std::size_t j = first_; j < last_; ++j) {
            const double xa = g.x(j);
            const double p = std::max(xa, omega.lo);
            const double q = std::min(xa + h, omega.hi);
            if (q <= p) continue;
            const double theta = (0.5 * (p + q) - xa) / h;
            weights_[j - first_] += (q - p) * (1.0 - theta);
            weights_[j + 1 - first_] += (q - p) * theta;
        }
        auto locate = [&](double x, std::size_t& j, double& theta) {
            j = std::min(static_cast<std::size_t>(std::floor((x - g.x_left) / h)), g.nx - 1);
            theta = (x - g.x(j)) / h;
        };
        locate(omega.lo, left_j_, left_theta_);
        locate(omega.hi, right_j_, right_theta_);
    }

    [[nodiscard]] std::size_t first() const { return first_; }
    [[nodiscard]] std::size_t last() const { return last_; }
    [[nodiscard]] const Interval& omega() const { return omega_; }

    /// sum_j w_j f(j) over the covered nodes.
    template <typename F>
    [[nodiscard]] double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t j = first_; j <= last_; ++j) s += weights_[j - first_] * f(j);
        return s;
    }

    [[nodiscard]] double value_left(std::span<const double> u) const {
        return (1.0 - left_theta_) * u[left_j_] + left_theta_ * u[left_j_ + 1];
    }
    [[nodiscard]] double value_right(std::span<const double> u) const {
        return (1.0 - right_theta_) * u[right_j_] + right_theta_ * u[right_j_ + 1];
    }

private:
    Interval omega_;
    std::size_t first_ = 0;
    std::size_t last_ = 0;
    std::vector<double> weights_;
    std::size_t left_j_ = 0;
    std::size_t right_j_ = 0;
    double left_theta_ = 0.0;
    double right_theta_ = 0.0;
};

/// Everything the energy functionals need that does not change in time.
class EnergyContext {
public:
    EnergyContext(const CoefficientProfile& p, const GridSpec& g, const Transform& tr, Interval omega,
                  std::optional<WeightPair> weights, double u_infty, double beta_u1_integral)
        : grid_(g), quad_(g, omega), t0_(tr.t0()), u_infty_(u_infty), beta_u1_(beta_u1_integral),
          impedance_(p.far_impedance()), weights_(weights) {
        const std::size_t n = g.nx;
        alpha_.resize(n + 1);
        beta_.resize(n + 1);
        speed_.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            const double x = g.x(j);
            alpha_[j] = p.alpha(x);
            beta_[j] = p.beta(x);
            speed_[j] = std::sqrt(alpha_[j] / beta_[j]);
        }
        if (weights_) {
            phi1_.assign(n + 1, 0.0);
            phi2_.assign(n + 1, 0.0);
            for (std::size_t j = quad_.first(); j <= quad_.last(); ++j) {
                const double y = std::clamp(tr.y_at(g.x(j)), 0.0, 1.0);
                phi1_[j] = weights_->phi1(y);
                phi2_[j] = weights_->phi2(y);
            }
        }
    }

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] const IntervalQuadrature& quadrature() const { return quad_; }
    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double u_infty() const { return u_infty_; }
    [[nodiscard]] const std::optional<WeightPair>& weights() const { return weights_; }

    [[nodiscard]] double ut(const TimeSlice& s, std::size_t j) const {
        return (s.next[j] - s.prev[j]) / (2.0 * grid_.dt);
    }
    [[nodiscard]] double ux(std::span<const double> u, std::size_t j) const {
        const double h = grid_.h();
        if (j == 0) return (u[1] - u[0]) / h;
        if (j == grid_.nx) return (u[j] - u[j - 1]) / h;
        return (u[j + 1] - u[j - 1]) / (2.0 * h);
    }

    /// (t0/2) int (beta u_t^2 + alpha u_x^2) dx: the local energy in
    /// travel-time units.
    [[nodiscard]] double local_energy(const TimeSlice& s) const {
        return 0.5 * t0_ * quad_.integrate([&](std::size_t j) {
            const double a = ut(s, j);
            const double b = ux(s.curr, j);
            return beta_[j] * a * a + alpha_[j] * b * b;
        });
    }

    /// (t0/2) int [phi1 (u_t + c u_x)^2 + phi2 (u_t - c u_x)^2] beta dx.
    [[nodiscard]] double weighted_energy(const TimeSlice& s) const {
        if (!weights_) return 0.0;
        return 0.5 * t0_ * quad_.integrate([&](std::size_t j) {
            const double a = ut(s, j);
            const double b = speed_[j] * ux(s.curr, j);
            return (phi1_[j] * (a + b) * (a + b) + phi2_[j] * (a - b) * (a - b)) * beta_[j];
        });
    }

    [[nodiscard]] double l2_ut(const TimeSlice& s) const {
        return std::sqrt(quad_.integrate([&](std::size_t j) { return ut(s, j) * ut(s, j); }));
    }
    [[nodiscard]] double l2_ux(std::span<const double> u) const {
        return std::sqrt(quad_.integrate([&](std::size_t j) { return ux(u, j) * ux(u, j); }));
    }

    /// sqrt(||u - c||^2 + ||u_x||^2) over the analysis interval.
    [[nodiscard]] double h1_distance(std::span<const double> u, double c) const {
        return std::sqrt(quad_.integrate([&](std::size_t j) {
            const double d = u[j] - c;
            const double g = ux(u, j);
            return d * d + g * g;
        }));
    }

    /// |int beta u_t - int beta u1 + sqrt(alpha0 beta0) (u(a,t) + u(b,t))|.
    [[nodiscard]] double balance_residual(const TimeSlice& s) const {
        const double mass = quad_.integrate([&](std::size_t j) { return beta_[j] * ut(s, j); });
        return std::abs(mass - beta_u1_ + impedance_ * (quad_.value_left(s.curr) + quad_.value_right(s.curr)));
    }

    [[nodiscard]] TraceRecord record(const TimeSlice& s) const {
        TraceRecord r;
        r.t = s.t;
        r.e_loc = local_energy(s);
        r.e_weighted = weighted_energy(s);
        r.l2_ut = l2_ut(s);
        r.l2_ux = l2_ux(s.curr);
        r.h1_dist = h1_distance(s.curr, u_infty_);
        r.balance_residual = balance_residual(s);
        return r;
    }

private:
    GridSpec grid_;
    IntervalQuadrature quad_;
    double t0_;
    double u_infty_;
    double beta_u1_;
    double impedance_;
    std::optional<WeightPair> weights_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    std::vector<double> speed_;
    std::vector<double> phi1_;
    std::vector<double> phi2_;
};

/// Exponential fit of an energy trace, reported as an amplitude rate.
struct FitResult {
    double rate = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double residual = 0.0;
    std::size_t points = 0;
    bool floor_hit = false;
};

struct FitOptions {
    double window_lo = 0.2;  ///< fraction of the final time
    double window_hi = 0.8;
    double floor = 1e-12;    ///< relative to the first record
    std::size_t min_points = 10;
};

/// Least-squares slope of log e_loc against t over the window, keeping only
/// records above floor * e_loc(0). Energies decay at twice the amplitude
/// rate, so the reported rate is -slope / 2.
template <typename Energy = double (*)(const TraceRecord&)>
[[nodiscard]] FitResult fit_rate(std::span<const TraceRecord> trace, const FitOptions& opt = {},
                                 Energy energy = [](const TraceRecord& r) { return r.e_loc; }) {
    if (trace.size() < 2) {
        throw Error("trace too short to fit");
    }
    if (!(opt.window_lo < opt.window_hi)) {
        throw Error("fit window must satisfy lo < hi");
    }
    const double t_end = trace.back().t;
    FitResult fit;
    fit.t_a = opt.window_lo * t_end;
    fit.t_b = opt.window_hi * t_end;
    const double cutoff = opt.floor * energy(trace.front());
    std::vector<double> ts;
    std::vector<double> ls;
    for (const auto& r : trace) {
        const double e = energy(r);
        if (r.t >= fit.t_a && r.t <= fit.t_b && e > cutoff && e > 0.0) {
            ts.push_back(r.t);
            ls.push_back(std::log(e));
        }
    }
    fit.points = ts.size();
    if (ts.size() < opt.min_points) {
        fit.floor_hit = true;
        return fit;
    }
    const double n = static_cast<double>(ts.size());
    double mt = 0.0;
    double ml = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        ml += ls[i];
    }
    mt /= n;
    ml /= n;
    double stt = 0.0;
    double stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        stl += (ts[i] - mt) * (ls[i] - ml);
    }
    const double slope = stl / stt;
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double d = ls[i] - (ml + slope * (ts[i] - mt));
        ss += d * d;
    }
    fit.rate = -0.5 * slope;
    fit.residual = std::sqrt(ss / n);
    return fit;
}

/// Largest increase of e_loc between consecutive records, relative to
/// e_loc(0), divided by the number of steps between them.
[[nodiscard]] inline double max_energy_increase_per_step(std::span<const TraceRecord> trace, double dt) {
    double worst = 0.0;
    if (trace.empty() || trace.front().e_loc <= 0.0) return 0.0;
    const double scale = trace.front().e_loc;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double steps = std::max(1.0, std::round((trace[i].t - trace[i - 1].t) / dt));
        worst = std::max(worst, (trace[i].e_loc - trace[i - 1].e_loc) / scale / steps);
    }
    return worst;
}

/// Trace with the metadata needed to compare against a certificate.
struct EnergyTrace {
    std::vector<TraceRecord> records;
    GridSpec grid;
    std::string profile_hash;
    RateCertificate certificate;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CompareOptions {
    FitOptions fit;
    double rate_rel_tol = 0.05;
    double rate_h_factor = 5.0;
    double envelope_h2_factor = 50.0;
};

/// Observed decay against the certified bounds.
struct ComparisonReport {
    FitResult fit;
    std::vector<Verdict> verdicts;

    [[nodiscard]] bool all_pass() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
};

namespace detail {
inline std::string num(double v) { return io::format_double(v); }
}  // namespace detail

/// Verdicts: fitted rate against Lambda1 and (if applicable) Lambda2,
/// pointwise weighted-energy envelope, H1 distance endpoint against a
/// fitted e^{-Lambda1 t} envelope, and the algebraic rate for context.
[[nodiscard]] inline ComparisonReport compare(const EnergyTrace& trace, const RateCertificate& cert,
                                              const CompareOptions& opt = {}) {
    if (!(trace.certificate == cert)) {
        throw Error("trace metadata does not match the certificate");
    }
    if (trace.records.size() < 2) {
        throw Error("trace too short to compare");
    }
    if (!cert.lambda_star.infinite && !(cert.weight_rate < cert.lambda_star.value)) {
        throw Error("certificate weight rate is not admissible");
    }
    const auto& rec = trace.records;
    const double h = trace.grid.h();
    ComparisonReport rep;
    rep.fit = fit_rate(std::span<const TraceRecord>(rec), opt.fit);
    const bool vanished = rep.fit.floor_hit;

    auto rate_verdict = [&](const std::string& name, Rate bound) {
        Verdict v{name, false, {}};
        if (vanished) {
            v.pass = true;
            v.detail = "energy below floor inside the fit window (finite-time regime)";
            return v;
        }
        if (bound.infinite) {
            v.pass = false;
            v.detail = "unbounded rate certified but energy did not vanish";
            return v;
        }
        const double tol = std::max(opt.rate_rel_tol * bound.value, opt.rate_h_factor * h);
        v.pass = rep.fit.rate >= bound.value - tol;
        v.detail = "fitted=" + detail::num(rep.fit.rate) + " bound=" + detail::num(bound.value) +
                   " tol=" + detail::num(tol);
        return v;
    };
    rep.verdicts.push_back(rate_verdict("rate_vs_Lambda1", Rate::finite(cert.Lambda1)));
    if (cert.improved_rate_applicable && cert.Lambda2) {
        rep.verdicts.push_back(rate_verdict("rate_vs_Lambda2", *cert.Lambda2));
    } else {
        rep.verdicts.push_back({"rate_vs_Lambda2", true, "not applicable (b0*t0 >= 1)"});
    }

    {
        Verdict v{"weighted_envelope", true, {}};
        const double e0 = rec.front().e_weighted;
        const double slack = 1.0 + opt.envelope_h2_factor * h * h;
        double worst = 0.0;
        for (const auto& r : rec) {
            const double bound = e0 * std::exp(-cert.weight_rate / cert.t0 * r.t) * slack;
            if (r.e_weighted > bound) v.pass = false;
            if (bound > 0.0) worst = std::max(worst, r.e_weighted / bound);
        }
        v.detail = "max ratio to envelope=" + detail::num(worst);
        rep.verdicts.push_back(v);
    }

    {
        Verdict v{"h1_distance_endpoint", true, {}};
        double prefactor = 0.0;
        const double t_half = 0.5 * rec.back().t;
        for (const auto& r : rec) {
            if (r.t <= t_half) prefactor = std::max(prefactor, r.h1_dist * std::exp(cert.Lambda1 * r.t));
        }
        const double envelope = prefactor * std::exp(-cert.Lambda1 * rec.back().t);
        const double floor = 10.0 * h * h;
        v.pass = rec.back().h1_dist <= envelope * (1.0 + 1e-9) + floor;
        v.detail = "h1_dist(T)=" + detail::num(rec.back().h1_dist) + " envelope=" + detail::num(envelope) +
                   " floor=" + detail::num(floor);
        rep.verdicts.push_back(v);
    }

    {
        Verdict v{"algebraic_rate_context", true, {}};
        if (cert.algebraic_rate) {
            v.detail = "(1-eta)/2=" + detail::num(*cert.algebraic_rate);
        } else if (cert.eta) {
            v.detail = "eta=" + detail::num(*cert.eta) + " >= 1, no algebraic rate";
        } else {
            v.detail = "alpha not constant, not applicable";
        }
        rep.verdicts.push_back(v);
    }
    return rep;
}

inline constexpr const char* trace_csv_header = "t,e_loc,e_weighted,l2_ut,l2_ux,h1_dist,balance_residual";

inline void write_trace_csv(std::ostream& os, std::span<const TraceRecord> trace) {
    using io::format_double;
    os << trace_csv_header << '\n';
    for (const auto& r : trace) {
        os << format_double(r.t) << ',' << format_double(r.e_loc) << ',' << format_double(r.e_weighted) << ','
           << format_double(r.l2_ut) << ',' << format_double(r.l2_ux) << ',' << format_double(r.h1_dist) << ','
           << format_double(r.balance_residual) << '\n';
    }
}

/// Reads a trace CSV; lines starting with '#' are comments.
inline std::vector<TraceRecord> read_trace_csv(std::istream& is) {
    std::vector<TraceRecord> out;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != trace_csv_header) {
                throw Error("trace line " + std::to_string(lineno) + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        TraceRecord r;
        double* fields[] = {&r.t, &r.e_loc, &r.e_weighted, &r.l2_ut, &r.l2_ux, &r.h1_dist, &r.balance_residual};
        std::string cell;
        std::size_t k = 0;
        while (std::getline(ls, cell, ',')) {
            if (k >= 7) throw Error("trace line " + std::to_string(lineno) + ": too many fields");
            try {
                std::size_t used = 0;
                *fields[k] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error("trace line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            ++k;
        }
        if (k != 7) throw Error("trace line " + std::to_string(lineno) + ": expected 7 fields");
        if (!out.empty() && !(r.t > out.back().t)) {
            throw Error("trace line " + std::to_string(lineno) + ": timestamps must increase");
        }
        out.push_back(r);
    }
    if (!header_seen) throw Error("trace has no header");
    return out;
}

/// Two-column (x, u) snapshot.
inline void write_snapshot(std::ostream& os, const GridSpec& g, std::span<const double> u) {
    for (std::size_t j = 0; j <= g.nx; ++j) {
        os << io::format_double(g.x(j)) << ' ' << io::format_double(u[j]) << '\n';
    }
}

inline void write_report(std::ostream& os, const ComparisonReport& rep) {
    os << "# rates are amplitude rates: norms decay like exp(-rate t), energies like exp(-2 rate t)\n";
    os << "fit.rate = " << (rep.fit.floor_hit ? std::string("none") : io::format_double(rep.fit.rate)) << '\n';
    os << "fit.t_a = " << io::format_double(rep.fit.t_a) << '\n';
    os << "fit.t_b = " << io::format_double(rep.fit.t_b) << '\n';
    os << "fit.residual = " << io::format_double(rep.fit.residual) << '\n';
    os << "fit.points = " << rep.fit.points << '\n';
    os << "fit.floor_hit = " << (rep.fit.floor_hit ? "true" : "false") << '\n';
    for (const auto& v : rep.verdicts) {
        os << (v.pass ? "PASS " : "FAIL ") << v.name << " : " << v.detail << '\n';
    }
}

}  // namespace wavedecay

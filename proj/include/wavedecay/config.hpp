#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "certificates.hpp"
#include "profiles.hpp"
#include "solver.hpp"

namespace wavedecay {

inline constexpr const char* toolkit_version = "0.1.0";

/// Configuration errors carry the offending line number (0 when the
/// problem is not tied to a single line).
class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : Error(line ? "config line " + std::to_string(line) + ": " + what : "config: " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Flat `dotted.key = value` text; '#' starts a comment.
class FlatConfig {
public:
    static FlatConfig parse(const std::string& text) {
        FlatConfig cfg;
        std::istringstream is(text);
        std::string raw;
        std::size_t lineno = 0;
        while (std::getline(is, raw)) {
            ++lineno;
            const auto hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(lineno, "expected 'key = value'");
            }
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw ConfigError(lineno, "empty key or value");
            }
            if (cfg.entries_.count(key)) {
                throw ConfigError(lineno, "duplicate key '" + key + "'");
            }
            cfg.entries_[key] = {value, lineno};
        }
        return cfg;
    }

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    [[nodiscard]] double get_double(const std::string& key, double fallback) {
        used_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second.value, &used);
            if (used != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(it->second.line, "'" + key + "' is not a number: " + it->second.value);
        }
    }

    [[nodiscard]] std::optional<double> get_optional_double(const std::string& key) {
        if (!has(key)) {
            used_.insert(key);
            return std::nullopt;
        }
        return get_double(key, 0.0);
    }

    [[nodiscard]] std::size_t get_size(const std::string& key, std::size_t fallback) {
        const double v = get_double(key, static_cast<double>(fallback));
        if (v < 0.0 || v != std::floor(v)) {
            throw ConfigError(line_of(key), "'" + key + "' must be a nonnegative integer");
        }
        return static_cast<std::size_t>(v);
    }

    [[nodiscard]] std::size_t line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    /// Rejects keys that were never read.
    void check_all_used() const {
        for (const auto& [key, e] : entries_) {
            if (!used_.count(key)) throw ConfigError(e.line, "unknown key '" + key + "'");
        }
    }

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

/// FNV-1a 64-bit digest, printed as 16 hex digits.
inline std::string digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

struct ProfileSpec {
    std::string kind = "cosine_ramp";
    double alpha0 = 1.0;
    double beta0 = 1.0;
    double alpha_amplitude = 0.0;
    double beta_amplitude = 1.0;
    Interval interval{0.0, 1.0};
};

struct DataSpec {
    std::optional<BumpSpec> u0;
    std::optional<BumpSpec> u1;
};

struct GridConfig {
    std::size_t nx = 2000;
    double cfl = 0.9;
    double t_final = 6.0;
    double margin = 0.5;
    std::size_t record_every = 5;
    BoundaryScheme boundary = BoundaryScheme::box;
};

struct AnalysisConfig {
    double fit_lo = 0.2;
    double fit_hi = 0.8;
    double floor = 1e-12;
    double rate_rel_tol = 0.05;
    double rate_h_factor = 5.0;
    double envelope_h2_factor = 50.0;
};

struct NumericsConfig {
    std::size_t sup_samples = 100000;
    std::size_t transform_resolution = 4096;
    double quad_tol = 1e-10;
};

struct OutputConfig {
    std::string certificate = "certificate.txt";
    std::string trace = "trace.csv";
    std::string snapshot = "snapshot.txt";
    std::string report = "report.txt";
    std::string sweep = "sweep.csv";
};

struct SweepConfig {
    double gamma0_min = 0.05;
    double gamma0_max = 10.0;
    std::size_t n = 50;
};

/// Everything a subcommand needs, parsed from a flat config.
struct RunConfig {
    ProfileSpec profile;
    DataSpec data;
    GridConfig grid;
    AnalysisConfig analysis;
    NumericsConfig numerics;
    OutputConfig output;
    SweepConfig sweep;
    std::optional<double> weight_rate;
    std::string hash;

    [[nodiscard]] CoefficientProfile build_profile() const {
        const auto& p = profile;
        if (p.kind == "constant") return profiles::constant(p.alpha0, p.beta0, p.interval);
        if (p.kind == "cosine_ramp")
            return profiles::cosine_ramp(p.alpha0, p.beta0, p.alpha_amplitude, p.beta_amplitude, p.interval);
        if (p.kind == "linear_ramp")
            return profiles::linear_ramp(p.alpha0, p.beta0, p.alpha_amplitude, p.beta_amplitude, p.interval);
        throw ConfigError(0, "unknown profile.kind '" + p.kind + "'");
    }

    [[nodiscard]] InitialData build_data() const { return initial_data::bumps(data.u0, data.u1); }

    [[nodiscard]] GridSpec build_grid(const CoefficientProfile& p, const InitialData& d) const {
        return make_grid(p, d, grid.nx, grid.cfl, grid.t_final, grid.margin, grid.boundary);
    }

    [[nodiscard]] CertificateOptions certificate_options() const {
        CertificateOptions o;
        o.transform_resolution = numerics.transform_resolution;
        o.sup_samples = numerics.sup_samples;
        o.quad_tol = numerics.quad_tol;
        o.weight_rate = weight_rate;
        return o;
    }
};

namespace detail {

inline std::optional<BumpSpec> read_bump(FlatConfig& c, const std::string& prefix) {
    const std::string kind = c.get_string(prefix + ".kind", "none");
    if (kind == "none") {
        if (c.has(prefix + ".center") || c.has(prefix + ".width") || c.has(prefix + ".height")) {
            throw ConfigError(c.line_of(prefix + ".kind"), prefix + " parameters given without " + prefix + ".kind = bump");
        }
        return std::nullopt;
    }
    if (kind != "bump") {
        throw ConfigError(c.line_of(prefix + ".kind"), "unknown " + prefix + ".kind '" + kind + "'");
    }
    BumpSpec b;
    b.center = c.get_double(prefix + ".center", b.center);
    b.width = c.get_double(prefix + ".width", b.width);
    b.height = c.get_double(prefix + ".height", b.height);
    if (!(b.width > 0.0)) throw ConfigError(c.line_of(prefix + ".width"), prefix + ".width must be positive");
    return b;
}

}  // namespace detail

/// Parses and range-checks a configuration text.
inline RunConfig parse_config(const std::string& text) {
    FlatConfig c = FlatConfig::parse(text);
    RunConfig rc;
    rc.hash = digest(text);

    auto& p = rc.profile;
    p.kind = c.get_string("profile.kind", p.kind);
    if (p.kind != "constant" && p.kind != "cosine_ramp" && p.kind != "linear_ramp") {
        throw ConfigError(c.line_of("profile.kind"), "unknown profile.kind '" + p.kind + "'");
    }
    p.alpha0 = c.get_double("profile.alpha0", p.alpha0);
    p.beta0 = c.get_double("profile.beta0", p.beta0);
    p.alpha_amplitude = c.get_double("profile.alpha_amplitude", p.kind == "constant" ? 0.0 : p.alpha_amplitude);
    p.beta_amplitude = c.get_double("profile.beta_amplitude", p.kind == "constant" ? 0.0 : p.beta_amplitude);
    p.interval.lo = c.get_double("profile.lo", p.interval.lo);
    p.interval.hi = c.get_double("profile.hi", p.interval.hi);
    if (!(p.alpha0 > 0.0)) throw ConfigError(c.line_of("profile.alpha0"), "profile.alpha0 must be positive");
    if (!(p.beta0 > 0.0)) throw ConfigError(c.line_of("profile.beta0"), "profile.beta0 must be positive");
    if (!(p.alpha_amplitude > -1.0)) throw ConfigError(c.line_of("profile.alpha_amplitude"), "amplitude must exceed -1");
    if (!(p.beta_amplitude > -1.0)) throw ConfigError(c.line_of("profile.beta_amplitude"), "amplitude must exceed -1");
    if (!(p.interval.hi > p.interval.lo)) throw ConfigError(c.line_of("profile.hi"), "profile.hi must exceed profile.lo");

    rc.data.u0 = detail::read_bump(c, "data.u0");
    rc.data.u1 = detail::read_bump(c, "data.u1");

    auto& g = rc.grid;
    g.nx = c.get_size("grid.nx", g.nx);
    g.cfl = c.get_double("grid.cfl", g.cfl);
    g.t_final = c.get_double("grid.t_final", g.t_final);
    g.margin = c.get_double("grid.margin", g.margin);
    g.record_every = c.get_size("grid.record_every", g.record_every);
    const std::string bnd = c.get_string("grid.boundary", "box");
    if (bnd == "box") g.boundary = BoundaryScheme::box;
    else if (bnd == "upwind") g.boundary = BoundaryScheme::upwind;
    else throw ConfigError(c.line_of("grid.boundary"), "grid.boundary must be 'box' or 'upwind'");
    if (g.nx < 16) throw ConfigError(c.line_of("grid.nx"), "grid.nx must be at least 16");
    if (!(g.cfl > 0.0 && g.cfl <= 1.0)) throw ConfigError(c.line_of("grid.cfl"), "grid.cfl must lie in (0, 1]");
    if (!(g.t_final > 0.0)) throw ConfigError(c.line_of("grid.t_final"), "grid.t_final must be positive");
    if (!(g.margin > 0.0)) throw ConfigError(c.line_of("grid.margin"), "grid.margin must be positive");
    if (g.record_every == 0) throw ConfigError(c.line_of("grid.record_every"), "grid.record_every must be positive");

    auto& a = rc.analysis;
    a.fit_lo = c.get_double("analysis.fit_lo", a.fit_lo);
    a.fit_hi = c.get_double("analysis.fit_hi", a.fit_hi);
    a.floor = c.get_double("analysis.floor", a.floor);
    a.rate_rel_tol = c.get_double("analysis.rate_rel_tol", a.rate_rel_tol);
    a.rate_h_factor = c.get_double("analysis.rate_h_factor", a.rate_h_factor);
    a.envelope_h2_factor = c.get_double("analysis.envelope_h2_factor", a.envelope_h2_factor);
    if (!(a.fit_lo >= 0.0 && a.fit_lo < a.fit_hi && a.fit_hi <= 1.0)) {
        throw ConfigError(c.line_of("analysis.fit_lo"), "fit window fractions must satisfy 0 <= lo < hi <= 1");
    }
    if (!(a.floor > 0.0 && a.floor < 1.0)) throw ConfigError(c.line_of("analysis.floor"), "analysis.floor must lie in (0, 1)");

    auto& n = rc.numerics;
    n.sup_samples = c.get_size("numerics.sup_samples", n.sup_samples);
    n.transform_resolution = c.get_size("numerics.transform_resolution", n.transform_resolution);
    n.quad_tol = c.get_double("numerics.quad_tol", n.quad_tol);
    if (n.sup_samples < 100) throw ConfigError(c.line_of("numerics.sup_samples"), "numerics.sup_samples must be at least 100");
    if (n.transform_resolution < 16) {
        throw ConfigError(c.line_of("numerics.transform_resolution"), "numerics.transform_resolution must be at least 16");
    }
    if (!(n.quad_tol > 0.0)) throw ConfigError(c.line_of("numerics.quad_tol"), "numerics.quad_tol must be positive");

    rc.weight_rate = c.get_optional_double("certificate.lambda");
    if (rc.weight_rate && !(*rc.weight_rate >= 0.0)) {
        throw ConfigError(c.line_of("certificate.lambda"), "certificate.lambda must be nonnegative");
    }

    auto& o = rc.output;
    o.certificate = c.get_string("output.certificate", o.certificate);
    o.trace = c.get_string("output.trace", o.trace);
    o.snapshot = c.get_string("output.snapshot", o.snapshot);
    o.report = c.get_string("output.report", o.report);
    o.sweep = c.get_string("output.sweep", o.sweep);

    auto& s = rc.sweep;
    s.gamma0_min = c.get_double("sweep.gamma0_min", s.gamma0_min);
    s.gamma0_max = c.get_double("sweep.gamma0_max", s.gamma0_max);
    s.n = c.get_size("sweep.n", s.n);
    if (!(s.gamma0_min > 0.0 && s.gamma0_min < s.gamma0_max) || s.n < 2) {
        throw ConfigError(c.line_of("sweep.gamma0_min"), "sweep needs 0 < gamma0_min < gamma0_max and n >= 2");
    }

    c.check_all_used();
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace wavedecay

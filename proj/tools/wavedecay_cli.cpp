// Command-line front-end: rates, simulate, verify, sweep, fit.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <wavedecay/wavedecay.hpp>

namespace fs = std::filesystem;
using namespace wavedecay;

namespace {

enum Exit : int { ok = 0, failed = 1, bad_config = 2, compute_error = 3 };

std::string provenance(const std::string& hash) {
    return std::string("# wavedecay ") + toolkit_version + " config=" + hash + "\n";
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    return os;
}

CompareOptions compare_options(const RunConfig& cfg) {
    CompareOptions c;
    c.fit = FitOptions{cfg.analysis.fit_lo, cfg.analysis.fit_hi, cfg.analysis.floor, 10};
    c.rate_rel_tol = cfg.analysis.rate_rel_tol;
    c.rate_h_factor = cfg.analysis.rate_h_factor;
    c.envelope_h2_factor = cfg.analysis.envelope_h2_factor;
    return c;
}

void write_verdicts(std::ostream& os, const std::vector<Verdict>& verdicts) {
    for (const auto& v : verdicts) {
        os << (v.pass ? "PASS " : "FAIL ") << v.name << " : " << v.detail << "\n";
    }
}

int cmd_rates(const RunConfig& cfg, const fs::path& out) {
    const RateCertificate cert = certify(cfg.build_profile(), cfg.build_data(), cfg.certificate_options());
    auto os = open_output(out, cfg.output.certificate);
    os << provenance(cfg.hash);
    write_certificate(os, cert);
    return ok;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out) {
    const CoefficientProfile profile = cfg.build_profile();
    const InitialData data = cfg.build_data();
    const RateCertificate cert = certify(profile, data, cfg.certificate_options());
    const GridSpec grid = cfg.build_grid(profile, data);
    RunOptions ro;
    ro.weights = cert.weights();
    ro.transform_resolution = cfg.numerics.transform_resolution;
    RunResult res = run(profile, data, grid, cfg.grid.record_every, ro);

    auto trace = open_output(out, cfg.output.trace);
    trace << provenance(cfg.hash);
    write_trace_csv(trace, res.records);

    auto snap = open_output(out, cfg.output.snapshot);
    snap << provenance(cfg.hash);
    write_snapshot(snap, grid, res.final_state.u_curr);

    EnergyTrace et{res.records, grid, cfg.hash, cert};
    const ComparisonReport rep = compare(et, cert, compare_options(cfg));
    auto report = open_output(out, cfg.output.report);
    report << provenance(cfg.hash);
    report << "monotone = " << (res.monotone ? "true" : "false") << "\n";
    report << "max_increase_per_step = " << io::format_double(res.max_increase_per_step) << "\n";
    write_report(report, rep);
    return ok;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out, std::size_t jobs) {
    VerifyOptions vo;
    vo.jobs = jobs;
    const VerifyReport rep = verify(cfg, vo);
    auto os = open_output(out, cfg.output.report);
    os << provenance(cfg.hash);
    write_verdicts(os, rep.verdicts);
    write_verdicts(std::cout, rep.verdicts);
    return rep.all_pass() ? ok : failed;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out, std::size_t jobs) {
    const auto rows = rate_sweep(cfg.sweep.gamma0_min, cfg.sweep.gamma0_max, cfg.sweep.n, jobs);
    auto os = open_output(out, cfg.output.sweep);
    os << provenance(cfg.hash);
    os << "gamma0,lambda_star,lambda0\n";
    for (const auto& r : rows) {
        os << io::format_double(r.gamma0) << ',' << io::format_double(r.lambda_star) << ','
           << io::format_double(r.lambda0) << '\n';
    }
    const auto verdicts = sweep_verdicts(rows);
    write_verdicts(std::cout, verdicts);
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; }) ? ok : failed;
}

int cmd_fit(const RunConfig& cfg, const std::string& trace_path, const fs::path& out) {
    std::ifstream in(trace_path);
    if (!in) throw Error("cannot open trace '" + trace_path + "'");
    const auto records = read_trace_csv(in);
    const FitResult fit =
        fit_rate(std::span<const TraceRecord>(records), FitOptions{cfg.analysis.fit_lo, cfg.analysis.fit_hi,
                                                                   cfg.analysis.floor, 10});
    std::ostringstream os;
    os << provenance(cfg.hash);
    os << "# rates are amplitude rates: energies decay like exp(-2 rate t)\n";
    os << "rate = " << (fit.floor_hit ? std::string("none") : io::format_double(fit.rate)) << "\n";
    os << "t_a = " << io::format_double(fit.t_a) << "\n";
    os << "t_b = " << io::format_double(fit.t_b) << "\n";
    os << "residual = " << io::format_double(fit.residual) << "\n";
    os << "points = " << fit.points << "\n";
    os << "floor_hit = " << (fit.floor_hit ? "true" : "false") << "\n";
    std::cout << os.str();
    if (!out.empty()) {
        auto file = open_output(out, "fit.txt");
        file << os.str();
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decay-rate certificates and simulations for the 1D wave equation with local coefficients"};
    app.set_version_flag("--version", toolkit_version);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::size_t jobs = 1;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "flat dotted-key config file");
        if (config_required) opt->required();
        sub->add_option("--out", out_dir, "output directory");
    };

    auto* rates = app.add_subcommand("rates", "write the rate certificate");
    add_common(rates, true);
    auto* simulate = app.add_subcommand("simulate", "write trace CSV, final snapshot and report");
    add_common(simulate, true);
    auto* verify_cmd = app.add_subcommand("verify", "run the property suite; exit 1 on any FAIL");
    add_common(verify_cmd, true);
    verify_cmd->add_option("--jobs", jobs, "concurrent independent runs")->check(CLI::PositiveNumber);
    auto* sweep = app.add_subcommand("sweep", "tabulate lambda_star and lambda0 against gamma0");
    add_common(sweep, false);
    sweep->add_option("--jobs", jobs, "concurrent rows")->check(CLI::PositiveNumber);
    std::optional<double> g_min;
    std::optional<double> g_max;
    std::optional<std::size_t> g_n;
    sweep->add_option("--gamma0-min", g_min);
    sweep->add_option("--gamma0-max", g_max);
    sweep->add_option("--n", g_n);
    auto* fit = app.add_subcommand("fit", "fit an amplitude decay rate to a trace CSV");
    add_common(fit, false);
    std::string trace_path;
    fit->add_option("trace", trace_path, "trace CSV")->required();

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = config_path.empty() ? parse_config("") : load_config(config_path);
        if (g_min) cfg.sweep.gamma0_min = *g_min;
        if (g_max) cfg.sweep.gamma0_max = *g_max;
        if (g_n) cfg.sweep.n = *g_n;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_config;
    }

    try {
        const fs::path out = out_dir;
        if (*rates) return cmd_rates(cfg, out);
        if (*simulate) return cmd_simulate(cfg, out);
        if (*verify_cmd) return cmd_verify(cfg, out, jobs);
        if (*sweep) return cmd_sweep(cfg, out, jobs);
        if (*fit) return cmd_fit(cfg, trace_path, fit->count("--out") ? out : fs::path{});
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return compute_error;
    }
    return ok;
}

// Command-line front end: reproducible trace simulation, frequency sweeps,
// trace analysis, parameter fitting and the oracle cross-check suite.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 domain/model, 4 non-convergence.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qicap/analysis.hpp"
#include "qicap/capacitance.hpp"
#include "qicap/errors.hpp"
#include "qicap/io.hpp"
#include "qicap/sweep.hpp"
#include "qicap/verify.hpp"

namespace {

using namespace qicap;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNoConvergence = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

io::Config load_or_default(const std::string& path) {
    if (path.empty()) return io::default_config();
    return io::load_config(path);
}

void emit_model_warnings(const capacitance::ModelParams& p) {
    for (const auto& w : p.couplings.warnings()) std::cerr << "warning: " << w << "\n";
    for (const auto& w : p.circuit.warnings()) std::cerr << "warning: " << w << "\n";
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
    io::Config cfg = load_or_default(config_path);
    emit_model_warnings(cfg.model);

    sweep::SweepSpec spec = cfg.sweep;
    spec.frequencies = {cfg.model.omega};  // single-frequency figure
    const auto traces = sweep::simulate_trace(spec, cfg.model);
    io::write_trace_csv(traces, out_path);

    const Trace& t = traces.front();
    bool all_zero = true;
    for (size_t i = 0; i < t.size(); ++i)
        if ((t.gaps.empty() || !t.gaps[i]) && t.values[i] != 0.0) all_zero = false;
    if (all_zero)
        std::cerr << "warning: trace is identically zero (delta_uev = "
                  << fmt(cfg.model.delta.uev) << ")\n";

    // oscillation count over the interference window eps0 in (0, A)
    int sign_changes = 0;
    double last = 0.0;
    double decay_sum_x = 0, decay_sum_y = 0, decay_sum_xx = 0, decay_sum_xy = 0;
    int decay_n = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (!t.gaps.empty() && t.gaps[i]) continue;
        const Energy eps = sweep::eval_detuning(t.meta.axis, t.axis[i], t.meta.params,
                                                t.meta.branch);
        const double red = eps.uev / t.meta.params.amplitude.uev;
        if (red > 0.0 && red < 1.0) {
            const double v = t.values[i];
            const double s = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
            if (s != 0.0) {
                if (last != 0.0 && s != last) ++sign_changes;
                last = s;
            }
        } else if (red >= 1.05 && red <= 1.5 && t.values[i] != 0.0) {
            const double y = std::log(std::abs(t.values[i]));
            decay_sum_x += red;
            decay_sum_y += y;
            decay_sum_xx += red * red;
            decay_sum_xy += red * y;
            ++decay_n;
        }
    }
    const Voltage dv = capacitance::voltage_period(cfg.model.omega,
                                                   cfg.model.couplings.alpha_minus());
    std::cout << "trace_file = " << out_path << "\n";
    std::cout << "omega_ghz = " << fmt(units::ghz_from_omega(cfg.model.omega)) << "\n";
    std::cout << "delta_v_tg_volts = " << fmt(dv.volts) << "\n";
    std::cout << "oscillation_sign_changes = " << sign_changes << "\n";
    if (decay_n >= 2) {
        const double denom = decay_n * decay_sum_xx - decay_sum_x * decay_sum_x;
        const double slope = (decay_n * decay_sum_xy - decay_sum_x * decay_sum_y) / denom;
        std::cout << "decay_slope_log_per_reduced = " << fmt(slope) << "\n";
    }
    return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
    io::Config cfg = load_or_default(config_path);
    emit_model_warnings(cfg.model);
    const auto traces = sweep::simulate_trace(cfg.sweep, cfg.model);
    io::write_trace_csv(traces, out_path);
    std::cout << "trace_file = " << out_path << "\n";
    std::cout << "n_traces = " << traces.size() << "\n";
    for (const auto& t : traces)
        std::cout << "omega_ghz = " << fmt(units::ghz_from_omega(t.meta.omega)) << "\n";
    return kExitOk;
}

// ---- analyze --------------------------------------------------------------

int cmd_analyze(const std::string& mode, const std::string& in_path,
                const std::string& out_path, const std::string& config_path) {
    io::Config cfg = load_or_default(config_path);
    const auto traces = io::read_trace_csv(in_path);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");

    if (mode == "fourier") {
        out << "omega_ghz,peak_cycles_per_axis_unit,period_axis_units,magnitude,dc_flag\n";
        std::vector<double> omegas, periods;
        for (const auto& t : traces) {
            const auto pk = analysis::fourier_peak(t);
            out << fmt(units::ghz_from_omega(t.meta.omega)) << ',' << fmt(pk.position)
                << ',' << fmt(1.0 / pk.position) << ',' << fmt(pk.magnitude) << ','
                << (pk.dc_dominated ? 1 : 0) << "\n";
            if (pk.dc_dominated)
                std::cerr << "warning: DC-dominated spectrum at "
                          << fmt(units::ghz_from_omega(t.meta.omega)) << " GHz\n";
            omegas.push_back(t.meta.omega.rad_per_ns);
            periods.push_back(1.0 / pk.position);
        }
        if (traces.size() >= 2 && traces.front().meta.axis == SweepAxis::gate_voltage) {
            // period = slope * omega through the origin
            double sxy = 0, sxx = 0, sy = 0;
            for (size_t i = 0; i < omegas.size(); ++i) {
                sxy += omegas[i] * periods[i];
                sxx += omegas[i] * omegas[i];
                sy += periods[i];
            }
            const double slope = sxy / sxx;
            double ss_res = 0, ss_tot = 0;
            const double mean = sy / periods.size();
            for (size_t i = 0; i < omegas.size(); ++i) {
                ss_res += std::pow(periods[i] - slope * omegas[i], 2);
                ss_tot += std::pow(periods[i] - mean, 2);
            }
            const double r2 = 1.0 - ss_res / ss_tot;
            const double alpha = 3.14159265358979323846 * units::hbar() * 1e-6 /
                                 (2.0 * std::sqrt(2.0) * slope);
            std::cout << "period_vs_omega_slope_v_ns = " << fmt(slope) << "\n";
            std::cout << "r_squared = " << fmt(r2) << "\n";
            std::cout << "alpha_minus_estimate = " << fmt(alpha) << "\n";
        }
        std::cout << "report_file = " << out_path << "\n";
        return kExitOk;
    }

    if (mode == "envelope") {
        analysis::EnvelopeOptions opt;
        opt.fit_timescales = true;
        opt.reference = cfg.model;
        out << "omega_ghz,axis_value,upper,lower\n";
        for (const auto& t : traces) {
            const auto env = analysis::envelope(t, opt);
            for (size_t i = 0; i < env.axis.size(); ++i)
                out << fmt(units::ghz_from_omega(t.meta.omega)) << ',' << fmt(env.axis[i])
                    << ',' << fmt(env.upper[i]) << ',' << fmt(env.lower[i]) << "\n";
            std::cout << "omega_ghz = " << fmt(units::ghz_from_omega(t.meta.omega)) << "\n";
            if (env.t2_ns)
                std::cout << "t2_ps_estimate = " << fmt(*env.t2_ns * 1e3) << "\n";
            if (env.tr_ns)
                std::cout << "tr_ps_estimate = " << fmt(*env.tr_ns * 1e3) << "\n";
        }
        std::cout << "report_file = " << out_path << "\n";
        return kExitOk;
    }

    if (mode == "p2p") {
        const auto pts = analysis::peak_to_peak_vs_frequency(traces);
        out << "omega_ghz,p2p_amplitude\n";
        double best_f = 0.0, best_a = -1.0;
        bool rose = false, fell = false;
        double prev = -1.0;
        for (const auto& p : pts) {
            out << fmt(units::ghz_from_omega(p.omega)) << ',' << fmt(p.amplitude) << "\n";
            if (p.amplitude > best_a) {
                best_a = p.amplitude;
                best_f = units::ghz_from_omega(p.omega);
            }
            if (prev >= 0.0) {
                if (p.amplitude > prev) rose = true;
                if (p.amplitude < prev) fell = true;
            }
            prev = p.amplitude;
        }
        std::cout << "p2p_max_freq_ghz = " << fmt(best_f) << "\n";
        std::cout << "p2p_nonmonotone = " << ((rose && fell) ? 1 : 0) << "\n";
        std::cout << "report_file = " << out_path << "\n";
        return kExitOk;
    }

    throw InvalidInput("analyze: unknown mode '" + mode +
                       "' (expected fourier, envelope or p2p)");
}

// ---- fit ------------------------------------------------------------------

int cmd_fit(const std::string& in_path, const std::string& config_path,
            const std::string& out_path, std::uint64_t seed, bool seed_given) {
    io::Config cfg = load_or_default(config_path);
    const auto traces = io::read_measured_csv(in_path);

    analysis::FitOptions opt;
    opt.init = cfg.model;
    opt.bounds = cfg.fit.bounds;
    opt.seed = seed_given ? seed : cfg.fit.seed;
    const auto res = analysis::fit_parameters(traces, cfg.fit.mask, opt);

    std::ostringstream rep;
    rep << "converged = " << (res.converged ? 1 : 0) << "\n";
    rep << "seed = " << opt.seed << "\n";
    rep << "residual_norm = " << fmt(res.residual_norm) << "\n";
    rep << "iterations = " << res.iterations << "\n";
    rep << "objective_evaluations = " << res.objective_evaluations << "\n";
    rep << "t1_ns = " << fmt(res.params.t1_ns) << "\n";
    rep << "sigma_t1_ns = " << fmt(res.sigma_t1_ns) << "\n";
    rep << "t2_ps = " << fmt(res.params.t2_ns * 1e3) << "\n";
    rep << "sigma_t2_ps = " << fmt(res.sigma_t2_ns * 1e3) << "\n";
    rep << "tr_ps = " << fmt(res.params.tr_ns * 1e3) << "\n";
    rep << "sigma_tr_ps = " << fmt(res.sigma_tr_ns * 1e3) << "\n";
    rep << "alpha_minus = " << fmt(res.params.couplings.alpha_minus()) << "\n";
    rep << "sigma_alpha_minus = " << fmt(res.sigma_alpha_minus) << "\n";
    int wi = 0;
    for (const auto& w : res.warnings) rep << "warning_" << wi++ << " = " << w << "\n";

    std::cout << rep.str();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot open '" + out_path + "' for writing");
        out << rep.str();
    }
    return res.converged ? kExitOk : kExitNoConvergence;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify() {
    const auto checks = verify::run_verification();
    bool all = true;
    for (const auto& c : checks) {
        std::cout << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL")
                  << "  measured=" << fmt(c.measured) << " tolerance=" << fmt(c.tolerance)
                  << "  (" << c.note << ")\n";
        all = all && c.pass;
    }
    std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return all ? kExitOk : kExitDomain;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-interference capacitor model: simulate, analyze and fit "
                 "LZSM parametric-capacitance traces"};
    app.require_subcommand(1);

    std::string config_path, out_path, in_path, mode;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* sim = app.add_subcommand("simulate", "single-frequency C_pm trace (CSV + summary)");
    sim->add_option("--config", config_path, "config file (key = value)");
    sim->add_option("--out", out_path, "output trace CSV")->required();

    auto* swp = app.add_subcommand("sweep", "multi-frequency trace set");
    swp->add_option("--config", config_path, "config file");
    swp->add_option("--out", out_path, "output trace CSV")->required();

    auto* ana = app.add_subcommand("analyze", "derive quantities from a trace CSV");
    ana->add_option("--mode", mode, "fourier | envelope | p2p")->required();
    ana->add_option("--in", in_path, "input trace CSV")->required();
    ana->add_option("--out", out_path, "output report CSV")->required();
    ana->add_option("--config", config_path, "config file (reference parameters)");

    auto* fit = app.add_subcommand("fit", "least-squares parameter recovery");
    fit->add_option("--in", in_path, "measured CSV (v_tg_volts,phase_norm[,omega_ghz])")
        ->required();
    fit->add_option("--config", config_path, "config file");
    fit->add_option("--out", out_path, "report file (key = value)");
    fit->add_option("--seed", seed, "noise seed recorded in the report")
        ->each([&](const std::string&) { seed_given = true; });

    auto* ver = app.add_subcommand("verify", "run every oracle cross-check");
    (void)ver;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_path);
        if (swp->parsed()) return cmd_sweep(config_path, out_path);
        if (ana->parsed()) return cmd_analyze(mode, in_path, out_path, config_path);
        if (fit->parsed()) return cmd_fit(in_path, config_path, out_path, seed, seed_given);
        if (ver->parsed()) return cmd_verify();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {  // DomainError, InsufficientData, NumericRange
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

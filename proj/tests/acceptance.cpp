// Acceptance suite: one line per criterion, tolerances pinned in code.
// Exit code equals the number of failed criteria.
//
// Criterion 5(a) — the 5% pointwise equivalence of the Airy-form rate and
// the tau->infinity Lorentzian-comb rate — is not attainable: the Airy form
// carries the inter-passage dephasing factor exp(-t1/T2) that the comb form
// lacks, and no (T2, A/hbar omega >= 10) choice brings the two within 5%
// on the required window (best case ~74%, measured here ~87% at the
// reference point).  The check runs exactly as specified and reports its measured
// deviation; it is expected to print FAIL.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qicap/analysis.hpp"
#include "qicap/capacitance.hpp"
#include "qicap/dynamics.hpp"
#include "qicap/io.hpp"
#include "qicap/sweep.hpp"
#include "qicap/verify.hpp"

using namespace qicap;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void report(int criterion, const std::string& label, bool pass,
            const std::string& detail) {
    std::printf("criterion %d [%s]: %s  (%s)\n", criterion, label.c_str(),
                pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

capacitance::ModelParams acceptance_params() {
    capacitance::ModelParams p;  // reference timescales, A = eps_hat = 1.35 meV
    p.delta = Energy{5.0};       // free parameter; keeps gamma Ai^2 < 1 (unsaturated)
    return p;
}

// fringe lobes of |C| bounded by sign changes: (position, peak) pairs
std::vector<std::pair<double, double>> lobes(const std::vector<double>& axis,
                                             const std::vector<double>& v) {
    std::vector<std::pair<double, double>> out;
    double best = 0.0, pos = axis[0];
    double last_sign = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const double s = v[i] > 0 ? 1.0 : (v[i] < 0 ? -1.0 : 0.0);
        if (s != 0.0 && last_sign != 0.0 && s != last_sign) {
            out.push_back({pos, best});
            best = 0.0;
        }
        if (s != 0.0) last_sign = s;
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            pos = axis[i];
        }
    }
    out.push_back({pos, best});
    return out;
}

void criterion1() {
    Timer timer;
    const auto p = acceptance_params();

    // (a) sign changes over eps0/A in [0, 1]
    const int n = 6001;
    std::vector<double> axis(n), vals(n);
    for (int i = 0; i < n; ++i) {
        axis[i] = static_cast<double>(i) / (n - 1);
        vals[i] = capacitance::parametric_capacitance(Energy{axis[i] * 1350.0}, p);
    }
    int changes = 0;
    double last = 0.0;
    for (double v : vals) {
        const double s = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
        if (s != 0.0 && last != 0.0 && s != last) ++changes;
        if (s != 0.0) last = s;
    }
    const bool pass_a = changes >= 10;

    // (b) the five fringe lobes below the principal one decay toward eps0=0
    const auto lb = lobes(axis, vals);
    size_t istar = 0;
    for (size_t i = 0; i < lb.size(); ++i)
        if (lb[i].second > lb[istar].second) istar = i;
    bool pass_b = istar >= 5;
    for (size_t i = istar - 5; pass_b && i < istar; ++i)
        pass_b = lb[i].second < lb[i + 1].second;

    // (c) monotone decay of |C| on eps0/A in [1.05, 1.5]
    bool pass_c = true;
    double prev = std::abs(capacitance::parametric_capacitance(Energy{1.05 * 1350.0}, p));
    for (int i = 1; i <= 1000; ++i) {
        const double red = 1.05 + 0.45 * i / 1000.0;
        const double c =
            std::abs(capacitance::parametric_capacitance(Energy{red * 1350.0}, p));
        if (!(c < prev)) {
            pass_c = false;
            break;
        }
        prev = c;
    }

    const double secs = timer.seconds();
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "sign changes %d >= 10: %s; last-5 fringe decay: %s; tail monotone: "
                  "%s; %.2f s < 1 s",
                  changes, pass_a ? "yes" : "NO", pass_b ? "yes" : "NO",
                  pass_c ? "yes" : "NO", secs);
    report(1, "Fig 1d trace properties", pass_a && pass_b && pass_c && secs < 1.0,
           detail);
}

void criterion2() {
    Timer timer;
    // The delta-V law is probed in the coherent, fast-reservoir, large-
    // amplitude regime where the constant-period reduction is exact; only
    // alpha- = 0.06 and the six frequencies are prescribed.
    capacitance::ModelParams p;
    p.delta = Energy{5.0};
    p.amplitude = Energy{27000.0};
    p.eps_hat = p.amplitude;
    p.t2_ns = 2.0;
    p.tr_ns = 0.001;

    sweep::SweepSpec spec;
    spec.axis = SweepAxis::gate_voltage;
    // eps0/A in [0.01, 0.09] mapped through eps = -2 e alpha- (V - V0)
    spec.start = 0.475 - 0.09 * 27000.0 * 1e-6 / 0.12;
    spec.stop = 0.475 - 0.01 * 27000.0 * 1e-6 / 0.12;
    spec.n_points = 6001;
    spec.frequencies.clear();
    for (double f : {4.72, 6.9, 8.0, 11.0, 15.0, 21.0})
        spec.frequencies.push_back(units::omega_from_ghz(f));

    const auto traces = sweep::simulate_trace(spec, p);
    std::vector<double> omegas, periods;
    for (const auto& t : traces) {
        const auto pk = analysis::fourier_peak(t);
        omegas.push_back(t.meta.omega.rad_per_ns);
        periods.push_back(1.0 / pk.position);
    }
    double sxy = 0, sxx = 0, mean = 0;
    for (size_t i = 0; i < omegas.size(); ++i) {
        sxy += omegas[i] * periods[i];
        sxx += omegas[i] * omegas[i];
        mean += periods[i] / periods.size();
    }
    const double slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < omegas.size(); ++i) {
        ss_res += std::pow(periods[i] - slope * omegas[i], 2);
        ss_tot += std::pow(periods[i] - mean, 2);
    }
    const double r2 = 1.0 - ss_res / ss_tot;
    const double alpha = kPi * units::hbar() * 1e-6 / (2.0 * std::sqrt(2.0) * slope);
    const double alpha_err = std::abs(alpha / 0.06 - 1.0);

    const double secs = timer.seconds();
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "R^2 = %.6f > 0.999; alpha- = %.5f (err %.2f%% <= 5%%); %.2f s < 10 s",
                  r2, alpha, 100.0 * alpha_err, secs);
    report(2, "dVtg proportional to omega, slope inverts to alpha-",
           r2 > 0.999 && alpha_err <= 0.05 && secs < 10.0, detail);
}

void criterion3() {
    Timer timer;
    const auto p = acceptance_params();

    sweep::SweepSpec spec;
    spec.start = 0.1;
    spec.stop = 0.95;
    spec.n_points = 1500;
    spec.frequencies.clear();
    for (int i = 0; i < 25; ++i) {
        const double f = 2.0 * std::pow(25.0 / 2.0, i / 24.0);
        spec.frequencies.push_back(units::omega_from_ghz(f));
    }
    const auto traces = sweep::simulate_trace(spec, p);
    const auto pts = analysis::peak_to_peak_vs_frequency(traces);

    size_t imax = 0;
    bool rose = false, fell = false;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].amplitude > pts[imax].amplitude) imax = i;
        if (i > 0) {
            if (pts[i].amplitude > pts[i - 1].amplitude) rose = true;
            if (pts[i].amplitude < pts[i - 1].amplitude) fell = true;
        }
    }
    const double fmax = units::ghz_from_omega(pts[imax].omega);
    const double secs = timer.seconds();
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "non-monotone: %s; maximum at %.2f GHz in [8, 13]; %.2f s < 30 s",
                  (rose && fell) ? "yes" : "NO", fmax, secs);
    report(3, "peak-to-peak amplitude peaks near 10 GHz",
           rose && fell && fmax >= 8.0 && fmax <= 13.0 && secs < 30.0, detail);
}

struct NoiseGen {
    std::uint64_t s;
    double uniform() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return static_cast<double>((s * 0x2545F4914F6CDD1DULL) >> 11) / 9007199254740992.0;
    }
    double gaussian() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
};

void criterion4() {
    Timer timer;
    const auto truth = acceptance_params();

    sweep::SweepSpec spec;
    spec.start = 0.1;
    spec.stop = 0.95;
    spec.n_points = 501;
    spec.frequencies.clear();
    for (double f : {4.72, 6.9, 8.0, 11.0, 15.0, 21.0})
        spec.frequencies.push_back(units::omega_from_ghz(f));
    const auto clean = sweep::simulate_trace(spec, truth);

    int good = 0;
    double worst_overall = 0.0;
    for (int seed = 1; seed <= 20; ++seed) {
        auto data = clean;
        NoiseGen rng{0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(seed) + 1};
        for (auto& t : data) {
            t = normalize_trace(t);
            for (auto& v : t.values) v += 0.05 * rng.gaussian();
        }
        analysis::FitOptions opt;
        opt.init = truth;
        opt.init.t1_ns = 10.0;  // start away from the generating values
        opt.init.t2_ns = 0.010;
        opt.init.tr_ns = 0.100;
        opt.seed = static_cast<std::uint64_t>(seed);
        const auto res = analysis::fit_parameters(data, analysis::FitMask{}, opt);
        const double e1 = std::abs(res.params.t1_ns / 50.0 - 1.0);
        const double e2 = std::abs(res.params.t2_ns / 0.035 - 1.0);
        const double e3 = std::abs(res.params.tr_ns / 0.030 - 1.0);
        const double worst = std::max({e1, e2, e3});
        worst_overall = std::max(worst_overall, worst);
        if (worst < 0.10) ++good;
    }
    const double secs = timer.seconds();
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "%d/20 runs within 10%% (need >= 18); worst error %.1f%%; %.0f s < 300 s",
                  good, 100.0 * worst_overall, secs);
    report(4, "noisy parameter-recovery round trip", good >= 18 && secs < 300.0, detail);
}

void criterion5() {
    Timer timer;
    const auto checks = verify::run_verification();
    auto find = [&](const std::string& name) -> const verify::CheckResult& {
        for (const auto& c : checks)
            if (c.name == name) return c;
        static verify::CheckResult missing;
        return missing;
    };
    const auto& a = find("airy_vs_bessel_rate");
    const auto& b = find("ode_vs_stationary");
    const auto& c = find("dp11_full_vs_finite_difference");
    const auto& d = find("bessel_normalization");
    const double secs = timer.seconds();

    char detail[512];
    std::snprintf(detail, sizeof detail,
                  "(a) Airy vs Bessel-sum 5%%: measured %.3g [structural exp(-t1/T2) "
                  "gap, unattainable as specified]; (b) ODE vs stationary %.3g <= 1e-8; "
                  "(c) dP11 vs finite differences %.3g <= 1e-6; (d) sum J_n^2 - 1 = "
                  "%.3g <= 1e-10; %.1f s < 60 s",
                  a.measured, b.measured, c.measured, d.measured, secs);
    report(5, "oracle equivalences (verify)",
           a.pass && b.pass && c.pass && d.pass && secs < 60.0, detail);
}

void criterion6() {
    const Voltage got = capacitance::voltage_period(AngularFrequency{kTwoPi * 11.0}, 0.06);
    const double want = kPi * (units::hbar() * kTwoPi * 11.0 * 1e-6) /
                        (2.0 * std::sqrt(2.0) * 0.06);
    const double rel = std::abs(got.volts / want - 1.0);
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "dVtg = %.6e V (~0.84 mV), relative deviation %.3g <= 1e-10",
                  got.volts, rel);
    report(6, "voltage-period spot value", rel <= 1e-10, detail);
}

void criterion7() {
    const auto p = acceptance_params();
    sweep::SweepSpec spec;
    spec.start = 0.05;
    spec.stop = 0.95;
    spec.n_points = 2001;
    const auto direct = sweep::simulate_trace(spec, p).front();
    const auto mirrored = sweep::mirror_branch(direct);

    sweep::SweepSpec spec2 = spec;
    spec2.branch = Branch::dot00_10;
    spec2.start = -0.95;
    spec2.stop = -0.05;
    const auto other = sweep::simulate_trace(spec2, p).front();

    double peak = 0.0;
    for (double v : direct.values) peak = std::max(peak, std::abs(v));
    double worst = 0.0;
    for (size_t i = 0; i < other.size(); ++i)
        worst = std::max(worst, std::abs(mirrored.values[i] - other.values[i]) / peak);
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "max |mirrored - direct| / peak = %.3g <= 1e-12", worst);
    report(7, "branch mirror symmetry", worst <= 1e-12, detail);
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("acceptance: %d of 7 criteria failed\n", g_failures);
    return g_failures;
}

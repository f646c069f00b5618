#include <doctest.h>

#include <cmath>

#include "qicap/analysis.hpp"
#include "qicap/errors.hpp"
#include "qicap/sweep.hpp"

using namespace qicap;
using namespace qicap::analysis;

namespace {

constexpr double kPi = 3.14159265358979323846;

Trace cosine_trace(double period_v, double n_periods, int n, double amp = 1.0,
                   double offset = 0.0) {
    Trace t;
    t.meta.axis = SweepAxis::gate_voltage;
    t.meta.has_params = false;
    const double lo = 0.46, hi = 0.46 + n_periods * period_v;
    for (int i = 0; i < n; ++i) {
        const double v = lo + (hi - lo) * i / (n - 1);
        t.axis.push_back(v);
        t.values.push_back(offset + amp * std::cos(2.0 * kPi * (v - lo) / period_v));
        t.gaps.push_back(false);
    }
    return t;
}

capacitance::ModelParams params(double delta_uev = 5.0) {
    capacitance::ModelParams p;
    p.delta = Energy{delta_uev};
    return p;
}

std::vector<Trace> model_traces(const capacitance::ModelParams& base,
                                const std::vector<double>& freqs_ghz, int n_points) {
    sweep::SweepSpec spec;
    spec.start = 0.1;
    spec.stop = 0.95;
    spec.n_points = n_points;
    spec.frequencies.clear();
    for (double f : freqs_ghz) spec.frequencies.push_back(units::omega_from_ghz(f));
    return sweep::simulate_trace(spec, base);
}

// deterministic Box-Muller on a xorshift* stream; portable across platforms
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

} // namespace

TEST_CASE("fourier peak of a synthetic cosine lands within half a percent") {
    const double period = 8.4e-4;
    const Trace t = cosine_trace(period, 10.0, 2000);
    const auto pk = fourier_peak(t);
    CHECK(pk.position == doctest::Approx(1.0 / period).epsilon(0.005));
    CHECK(!pk.dc_dominated);
    CHECK(pk.uncertainty > 0.0);
}

TEST_CASE("fourier peak position is scale invariant") {
    const Trace t = cosine_trace(8.4e-4, 7.3, 1500);
    Trace big = t;
    for (auto& v : big.values) v *= 5.0;
    CHECK(fourier_peak(big).position == fourier_peak(t).position);
}

TEST_CASE("fourier peak rejects constant and short traces") {
    Trace flat = cosine_trace(8.4e-4, 10.0, 800, 0.0, 1.0);
    CHECK_THROWS_AS(fourier_peak(flat), InsufficientData);
    Trace two = cosine_trace(8.4e-4, 2.0, 800);
    CHECK_THROWS_AS(fourier_peak(two), InsufficientData);
}

TEST_CASE("a large DC pedestal sets the warning flag") {
    const Trace t = cosine_trace(8.4e-4, 10.0, 1200, 0.05, 3.0);
    const auto pk = fourier_peak(t);
    CHECK(pk.dc_dominated);
    CHECK(pk.position == doctest::Approx(1.0 / 8.4e-4).epsilon(0.005));
}

TEST_CASE("non-uniform axes are resampled before the transform") {
    Trace t = cosine_trace(8.4e-4, 8.0, 1600);
    // jitter the interior points by up to 20% of a step
    NoiseGen rng{12345};
    const double step = t.axis[1] - t.axis[0];
    for (size_t i = 1; i + 1 < t.axis.size(); ++i) {
        const double j = 0.2 * step * (rng.uniform() - 0.5);
        t.axis[i] += j;
        t.values[i] = std::cos(2.0 * kPi * (t.axis[i] - 0.46) / 8.4e-4);
    }
    const auto pk = fourier_peak(t);
    CHECK(pk.position == doctest::Approx(1.0 / 8.4e-4).epsilon(0.01));
}

TEST_CASE("envelope of a constant-amplitude cosine is flat") {
    const Trace t = cosine_trace(8.4e-4, 9.0, 3000, 2.5);
    const auto env = envelope(t);
    for (size_t i = t.size() / 8; i < 7 * t.size() / 8; ++i) {
        CHECK(env.upper[i] == doctest::Approx(2.5).epsilon(1e-3));
        CHECK(env.lower[i] == doctest::Approx(-2.5).epsilon(1e-3));
        CHECK(env.upper[i] >= env.lower[i]);
    }
}

TEST_CASE("envelope scales linearly with the trace") {
    const Trace t = cosine_trace(8.4e-4, 6.0, 1200, 1.3);
    Trace big = t;
    for (auto& v : big.values) v *= 7.0;
    const auto e1 = envelope(t);
    const auto e7 = envelope(big);
    for (size_t i = 0; i < t.size(); i += 37)
        CHECK(e7.upper[i] == doctest::Approx(7.0 * e1.upper[i]).epsilon(1e-12));
}

TEST_CASE("envelope needs at least three extrema") {
    Trace ramp;
    ramp.meta.has_params = false;
    for (int i = 0; i < 100; ++i) {
        ramp.axis.push_back(i);
        ramp.values.push_back(0.01 * i);
        ramp.gaps.push_back(false);
    }
    CHECK_THROWS_AS(envelope(ramp), InsufficientData);
}

TEST_CASE("envelope fit recovers T2 and T_R from a model trace") {
    // round trip on model data at the reference timescales
    auto p = params(5.0);
    const auto traces = model_traces(p, {11.0}, 3001);
    EnvelopeOptions opt;
    opt.fit_timescales = true;
    const auto env = envelope(traces.front(), opt);
    REQUIRE(env.t2_ns.has_value());
    REQUIRE(env.tr_ns.has_value());
    CHECK(*env.t2_ns == doctest::Approx(0.035).epsilon(0.15));
    CHECK(*env.tr_ns == doctest::Approx(0.030).epsilon(0.15));

    // same trace with the snapshot stripped and supplied as a reference
    Trace bare = traces.front();
    bare.meta.has_params = false;
    EnvelopeOptions opt2;
    opt2.fit_timescales = true;
    opt2.reference = p;
    const auto env2 = envelope(bare, opt2);
    CHECK(*env2.t2_ns == doctest::Approx(*env.t2_ns).epsilon(1e-9));
}

TEST_CASE("peak-to-peak amplitudes across traces") {
    auto p = params(5.0);
    const auto traces = model_traces(p, {4.72, 11.0}, 801);
    const auto pts = peak_to_peak_vs_frequency(traces);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].omega.rad_per_ns < pts[1].omega.rad_per_ns);
    for (const auto& q : pts) CHECK(q.amplitude > 0.0);

    // axis reversal (branch mirror) leaves the amplitude unchanged
    auto mirrored = traces;
    for (auto& t : mirrored) t = sweep::mirror_branch(t);
    const auto pts2 = peak_to_peak_vs_frequency(mirrored);
    CHECK(pts2[0].amplitude == doctest::Approx(pts[0].amplitude).epsilon(1e-14));
    CHECK(pts2[1].amplitude == doctest::Approx(pts[1].amplitude).epsilon(1e-14));

    // zero-coupling traces give zero amplitude
    const auto zeros = model_traces(params(0.0), {4.72, 11.0}, 801);
    for (const auto& q : peak_to_peak_vs_frequency(zeros)) CHECK(q.amplitude == 0.0);

    CHECK_THROWS_AS(peak_to_peak_vs_frequency({traces.front()}), InvalidInput);
    auto dup = traces;
    dup[1].meta.omega = dup[0].meta.omega;
    CHECK_THROWS_AS(peak_to_peak_vs_frequency(dup), InvalidInput);
}

TEST_CASE("the reduced-axis window survives a lost parameter snapshot") {
    auto p = params(5.0);
    auto traces = model_traces(p, {4.72, 11.0}, 801);
    const auto with = peak_to_peak_vs_frequency(traces);
    for (auto& t : traces) t.meta.has_params = false;
    const auto without = peak_to_peak_vs_frequency(traces);
    for (size_t i = 0; i < with.size(); ++i)
        CHECK(without[i].amplitude == with[i].amplitude);
}

TEST_CASE("peak-to-peak window errors name the offending trace") {
    sweep::SweepSpec spec;
    spec.start = 1.1;   // entirely outside the default oscillatory window
    spec.stop = 1.4;
    spec.n_points = 51;
    spec.frequencies = {units::omega_from_ghz(7.0), units::omega_from_ghz(11.0)};
    const auto traces = sweep::simulate_trace(spec, params());
    CHECK_THROWS_WITH_AS(peak_to_peak_vs_frequency(traces), doctest::Contains("7"),
                         InsufficientData);
}

TEST_CASE("fitting data generated at the initialization point returns it") {
    auto p = params(5.0);
    const auto data = model_traces(p, {6.9, 11.0}, 301);

    FitMask mask;  // t1, t2, tr free
    FitOptions opt;
    opt.init = p;
    const auto res = fit_parameters(data, mask, opt);
    CHECK(res.residual_norm < 1e-20);
    CHECK(res.converged);
    CHECK(res.params.t1_ns == doctest::Approx(p.t1_ns).epsilon(1e-12));
    CHECK(res.params.t2_ns == doctest::Approx(p.t2_ns).epsilon(1e-12));
    CHECK(res.params.tr_ns == doctest::Approx(p.tr_ns).epsilon(1e-12));
}

TEST_CASE("fit recovers timescales from noisy multi-frequency data") {
    auto truth = params(5.0);
    auto data = model_traces(truth, {4.72, 8.0, 11.0, 15.0, 21.0}, 401);
    NoiseGen rng{777};
    for (auto& t : data) {
        t = normalize_trace(t);
        for (auto& v : t.values) v += 0.05 * rng.gaussian();
    }
    FitMask mask;
    FitOptions opt;
    opt.init = truth;
    opt.init.t1_ns = 10.0;   // start well away from the generating values
    opt.init.t2_ns = 0.010;
    opt.init.tr_ns = 0.100;
    const auto res = fit_parameters(data, mask, opt);
    CHECK(res.params.t1_ns == doctest::Approx(50.0).epsilon(0.10));
    CHECK(res.params.t2_ns == doctest::Approx(0.035).epsilon(0.10));
    CHECK(res.params.tr_ns == doctest::Approx(0.030).epsilon(0.10));
    CHECK(res.sigma_t1_ns > 0.0);
    CHECK(res.objective_evaluations > 0);
}

TEST_CASE("T1 alone is recovered from a frequency sweep with T2, TR fixed") {
    auto truth = params(5.0);
    const auto data = model_traces(truth, {2.5, 4.72, 8.0, 11.0, 15.0, 21.0, 25.0}, 301);
    analysis::FitMask mask{true, false, false, false};
    FitOptions opt;
    opt.init = truth;     // T2, TR held at the generating values
    opt.init.t1_ns = 8.0; // T1 started well off
    const auto res = fit_parameters(data, mask, opt);
    CHECK(res.params.t1_ns == doctest::Approx(50.0).epsilon(0.01));
    CHECK(res.params.t2_ns == truth.t2_ns);
    CHECK(res.params.tr_ns == truth.tr_ns);
}

TEST_CASE("degenerate masks are rejected or flagged") {
    auto p = params(5.0);
    const auto data = model_traces(p, {11.0}, 201);

    FitMask empty{false, false, false, false};
    CHECK_THROWS_AS(fit_parameters(data, empty, FitOptions{p}), InvalidInput);
    CHECK_THROWS_AS(fit_parameters({}, FitMask{}, FitOptions{p}), InvalidInput);

    // alpha_minus has no effect on a detuning-axis trace: identifiability
    FitMask alpha_only{false, false, false, true};
    FitOptions opt;
    opt.init = p;
    opt.max_iterations = 50;
    const auto res = fit_parameters(data, alpha_only, opt);
    bool warned = false;
    for (const auto& w : res.warnings)
        warned = warned || w.find("alpha_minus") != std::string::npos;
    CHECK(warned);
}

TEST_CASE("the optimizer never ends above its starting objective") {
    auto truth = params(5.0);
    auto data = model_traces(truth, {11.0}, 301);
    NoiseGen rng{99};
    for (auto& t : data) {
        t = normalize_trace(t);
        for (auto& v : t.values) v += 0.05 * rng.gaussian();
    }
    FitOptions opt;
    opt.init = truth;
    const auto res = fit_parameters(data, FitMask{}, opt);

    // objective at the initialization point (data used as supplied)
    double ssr0 = 0.0;
    {
        const auto& d0 = data.front();
        const auto m = model_trace_normalized(d0, truth);
        for (size_t i = 0; i < d0.size(); ++i) {
            const double r = m[i] - d0.values[i];
            ssr0 += r * r;
        }
    }
    CHECK(res.residual_norm <= ssr0 + 1e-12);
}

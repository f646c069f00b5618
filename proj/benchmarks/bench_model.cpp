#include <benchmark/benchmark.h>

#include "qicap/analysis.hpp"
#include "qicap/capacitance.hpp"
#include "qicap/dynamics.hpp"
#include "qicap/specfun.hpp"
#include "qicap/sweep.hpp"

using namespace qicap;

namespace {

capacitance::ModelParams params() {
    capacitance::ModelParams p;
    p.delta = Energy{5.0};
    return p;
}

void BM_AiryAi(benchmark::State& state) {
    double x = -11.7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(specfun::airy_ai_both(x));
        x = (x < 6.0) ? x + 0.37 : -11.7;
    }
}
BENCHMARK(BM_AiryAi);

void BM_BesselSequence(benchmark::State& state) {
    const double z = 29.675;
    for (auto _ : state)
        benchmark::DoNotOptimize(specfun::bessel_j_sequence(70, z));
}
BENCHMARK(BM_BesselSequence);

void BM_RateAiry(benchmark::State& state) {
    const auto p = params().rate_params();
    double red = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dynamics::lzsm_rate_airy(Energy{red * 1350.0}, p));
        red = (red < 0.95) ? red + 0.01 : 0.1;
    }
}
BENCHMARK(BM_RateAiry);

void BM_RateBesselSum(benchmark::State& state) {
    const auto p = params().rate_params();
    for (auto _ : state)
        benchmark::DoNotOptimize(dynamics::lzsm_rate_bessel_sum(Energy{675.0}, p));
}
BENCHMARK(BM_RateBesselSum);

void BM_ParametricCapacitancePoint(benchmark::State& state) {
    const auto p = params();
    double red = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            capacitance::parametric_capacitance(Energy{red * 1350.0}, p));
        red = (red < 0.95) ? red + 0.01 : 0.1;
    }
}
BENCHMARK(BM_ParametricCapacitancePoint);

void BM_SimulateTrace(benchmark::State& state) {
    sweep::SweepSpec spec;
    spec.start = 0.1;
    spec.stop = 0.95;
    spec.n_points = static_cast<int>(state.range(0));
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(sweep::simulate_trace(spec, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateTrace)->Arg(501)->Arg(2001);

void BM_FourierPeak(benchmark::State& state) {
    sweep::SweepSpec spec;
    spec.axis = SweepAxis::gate_voltage;
    spec.start = 0.4655;
    spec.stop = 0.4745;
    spec.n_points = static_cast<int>(state.range(0));
    const auto traces = sweep::simulate_trace(spec, params());
    for (auto _ : state) benchmark::DoNotOptimize(analysis::fourier_peak(traces.front()));
}
BENCHMARK(BM_FourierPeak)->Arg(1001)->Arg(4001);

void BM_FitObjectiveScale(benchmark::State& state) {
    // one full model evaluation against a 6-frequency data set, the unit of
    // work inside the fit's grid scan and simplex
    sweep::SweepSpec spec;
    spec.start = 0.1;
    spec.stop = 0.95;
    spec.n_points = 501;
    spec.frequencies.clear();
    for (double f : {4.72, 6.9, 8.0, 11.0, 15.0, 21.0})
        spec.frequencies.push_back(units::omega_from_ghz(f));
    const auto data = sweep::simulate_trace(spec, params());
    const auto p = params();
    for (auto _ : state) {
        double ssr = 0.0;
        for (const auto& t : data) {
            const auto m = analysis::model_trace_normalized(t, p);
            for (size_t i = 0; i < t.size(); ++i) {
                const double r = m[i] - t.values[i];
                ssr += r * r;
            }
        }
        benchmark::DoNotOptimize(ssr);
    }
}
BENCHMARK(BM_FitObjectiveScale);

} // namespace

BENCHMARK_MAIN();

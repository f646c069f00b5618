#include "qicap/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qicap/errors.hpp"

namespace qicap::sweep {

void SweepSpec::validate() const {
    if (n_points < 2) throw InvalidInput("sweep: n_points must be >= 2");
    if (!(start < stop)) throw InvalidInput("sweep: start must be < stop");
    if (frequencies.empty()) throw InvalidInput("sweep: frequency list is empty");
    for (const auto& w : frequencies)
        if (!(w.rad_per_ns > 0.0))
            throw InvalidInput("sweep: frequencies must be > 0");
}

Energy eval_detuning(SweepAxis axis, double axis_value,
                     const capacitance::ModelParams& params, Branch branch) {
    Energy eps{};
    switch (axis) {
        case SweepAxis::detuning_reduced:
            eps = Energy{axis_value * params.amplitude.uev};
            break;
        case SweepAxis::detuning_absolute:
            eps = Energy{axis_value};
            break;
        case SweepAxis::gate_voltage:
            eps = units::detuning_from_voltage(Voltage{axis_value},
                                               params.couplings.alpha_minus(),
                                               params.vtg0);
            break;
    }
    // The mirrored cycle is the canonical one reflected about eps = 0.
    if (branch == Branch::dot00_10) eps.uev = -eps.uev;
    return eps;
}

std::vector<Trace> simulate_trace(const SweepSpec& spec,
                                  const capacitance::ModelParams& params) {
    spec.validate();

    auto freqs = spec.frequencies;
    std::sort(freqs.begin(), freqs.end(),
              [](auto a, auto b) { return a.rad_per_ns < b.rad_per_ns; });

    std::vector<Trace> traces;
    traces.reserve(freqs.size());
    const double step = (spec.stop - spec.start) / (spec.n_points - 1);

    for (const auto& w : freqs) {
        capacitance::ModelParams p = params;
        p.omega = w;

        Trace t;
        t.axis.resize(spec.n_points);
        t.values.resize(spec.n_points);
        t.gaps.assign(spec.n_points, false);
        t.meta = TraceMeta{w, spec.branch, spec.axis, p, true};

        for (int i = 0; i < spec.n_points; ++i) {
            const double x = (i == spec.n_points - 1)
                                 ? spec.stop
                                 : spec.start + i * step;
            t.axis[i] = x;
            const Energy eps = eval_detuning(spec.axis, x, p, spec.branch);
            try {
                t.values[i] = capacitance::parametric_capacitance(eps, p);
            } catch (const DomainError&) {
                // model-validity boundary: record a gap, keep going
                t.values[i] = std::numeric_limits<double>::quiet_NaN();
                t.gaps[i] = true;
            }
        }
        traces.push_back(std::move(t));
    }
    return traces;
}

Trace mirror_branch(const Trace& t) {
    if (t.meta.axis == SweepAxis::gate_voltage)
        throw InvalidInput("mirror_branch: defined about eps = 0; trace has a "
                           "gate-voltage axis");
    Trace out = t;
    const size_t n = t.size();
    for (size_t i = 0; i < n; ++i) {
        out.axis[i] = -t.axis[n - 1 - i];
        out.values[i] = t.values[n - 1 - i];
        out.gaps[i] = t.gaps.empty() ? false : t.gaps[n - 1 - i];
    }
    out.meta.branch =
        t.meta.branch == Branch::dot01_11 ? Branch::dot00_10 : Branch::dot01_11;
    return out;
}

} // namespace qicap::sweep

#ifndef QICAP_SWEEP_HPP
#define QICAP_SWEEP_HPP

#include <vector>

#include "qicap/trace.hpp"

// Trace generation over detuning/voltage grids and frequency lists.
// Evaluation is pointwise (no solver state), so grids refine stably and
// identical inputs produce identical bytes.

namespace qicap::sweep {

struct SweepSpec {
    SweepAxis axis = SweepAxis::detuning_reduced;
    double start = -1.2;   // default grid covers the oscillatory region,
    double stop = 1.5;     // the decay tail and the mirrored branch
    int n_points = 2001;
    std::vector<AngularFrequency> frequencies{AngularFrequency{kTwoPi * 11.0}};
    Branch branch = Branch::dot01_11;

    void validate() const;  // throws InvalidInput on a malformed spec
};

/// One trace per frequency, ordered by ascending omega.  Points where the
/// reservoir factor leaves its domain are emitted as gaps (NaN + flag),
/// never silently clamped.
std::vector<Trace> simulate_trace(const SweepSpec& spec,
                                  const capacitance::ModelParams& params);

/// Detuning of a single sweep point, honoring axis and branch conventions.
/// The (00)-(10) branch evaluates the canonical closed form at -eps0.
Energy eval_detuning(SweepAxis axis, double axis_value,
                     const capacitance::ModelParams& params, Branch branch);

/// Mirror a detuning-axis trace about eps = 0: axis negated and reversed,
/// values preserved.  Gate-voltage traces are rejected.
Trace mirror_branch(const Trace& t);

} // namespace qicap::sweep

#endif

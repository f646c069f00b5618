#ifndef QICAP_ANALYSIS_HPP
#define QICAP_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qicap/trace.hpp"

// Extraction of derived quantities from traces, simulated or measured:
// Fourier period peak, oscillation envelope with timescale fits, peak-to-peak
// amplitude versus drive frequency, and least-squares recovery of the
// dynamical parameters.

namespace qicap::analysis {

struct SpectrumPeak {
    double position = 0.0;     // dominant frequency, cycles per axis unit
    double magnitude = 0.0;    // amplitude estimate of that component
    double uncertainty = 0.0;  // half-width of the peak bin
    bool dc_dominated = false; // spectrum carried more weight at DC than at the peak
};

/// Dominant nonzero-frequency peak of the DFT, refined by quadratic
/// interpolation of log-magnitude over the three bins around the maximum.
/// Needs a uniformly spaced axis (non-uniform input is resampled when the
/// spacing wobbles beyond 1e-9 relative) and at least 4 oscillation periods.
SpectrumPeak fourier_peak(const Trace& t);

struct EnvelopeResult {
    std::vector<double> axis;
    std::vector<double> upper;
    std::vector<double> lower;
    std::optional<double> t2_ns;  // present when a timescale fit was requested
    std::optional<double> tr_ns;
};

struct EnvelopeOptions {
    bool fit_timescales = false;
    // Fallback parameter set for traces without a simulation snapshot
    // (measured data); supplies A, eps_hat, omega and the gamma prefactor.
    std::optional<capacitance::ModelParams> reference{};
};

/// Upper/lower envelopes by local-extrema detection and piecewise-linear
/// interpolation.  With fit_timescales, the fringe-peak amplitudes are fit
/// against the closed-form envelope K [1 - exp(-t_R/T_R)] exp(-t1/T2),
/// extended with the known saturation factor when a parameter snapshot is
/// available, yielding (T2, T_R).
EnvelopeResult envelope(const Trace& t, const EnvelopeOptions& opt = {});

struct PeakToPeakPoint {
    AngularFrequency omega{};
    double amplitude = 0.0;  // max - min over the oscillatory window
};

/// Per-trace peak-to-peak amplitude over the reduced-detuning window
/// [window_lo, window_hi] (applied via each trace's metadata; traces without
/// a snapshot use their full extent).
std::vector<PeakToPeakPoint> peak_to_peak_vs_frequency(
    const std::vector<Trace>& traces, double window_lo = 0.1,
    double window_hi = 0.95);

struct FitMask {
    bool t1 = true;
    bool t2 = true;
    bool tr = true;
    bool alpha_minus = false;

    int count() const {
        return (t1 ? 1 : 0) + (t2 ? 1 : 0) + (tr ? 1 : 0) + (alpha_minus ? 1 : 0);
    }
};

struct FitBounds {
    double t1_min_ns = 1.0, t1_max_ns = 1000.0;
    double t2_min_ns = 0.001, t2_max_ns = 1.0;
    double tr_min_ns = 0.001, tr_max_ns = 1.0;
    double alpha_minus_min = 0.01, alpha_minus_max = 0.3;
};

struct FitOptions {
    capacitance::ModelParams init{};  // starting values; fixed parameters too
    FitBounds bounds{};
    int grid_points_per_decade = 4;
    int max_iterations = 2000;
    double objective_tolerance = 1e-10;  // relative objective change
    std::uint64_t seed = 0;              // recorded in reports; fit is deterministic
};

struct FitResult {
    capacitance::ModelParams params{};
    double residual_norm = 0.0;  // sum of squared residuals at the optimum
    double sigma_t1_ns = 0.0;    // curvature-based 1-sigma estimates,
    double sigma_t2_ns = 0.0;    // zero for parameters held fixed
    double sigma_tr_ns = 0.0;
    double sigma_alpha_minus = 0.0;
    bool converged = false;
    int iterations = 0;
    long objective_evaluations = 0;
    std::vector<std::string> warnings;
};

/// Least squares between the normalized closed-form model and the supplied
/// data, over every trace.  Coarse multiplicative grid scan seeded into a
/// Nelder-Mead simplex, all in log-parameter space.  Deterministic given
/// identical inputs.
///
/// Data traces are treated as the normalized observable and compared as
/// supplied (raw traces far from unit peak are normalized once at
/// ingestion).  Re-dividing noisy data by its own noisy maximum inside the
/// objective would couple the noise into the scale and bias T_R upward by
/// tens of percent.
FitResult fit_parameters(const std::vector<Trace>& measured, const FitMask& mask,
                         const FitOptions& opt);

/// Model counterpart of a measured trace under trial parameters: evaluated
/// on the trace's axis, honoring its axis type, branch and frequency, then
/// normalized.  Gap points mirror the data's gaps.  Exposed for report
/// generation alongside fits.
std::vector<double> model_trace_normalized(const Trace& data,
                                           const capacitance::ModelParams& p);

} // namespace qicap::analysis

#endif

#include "qicap/capacitance.hpp"

#include <algorithm>
#include <cmath>

#include "qicap/errors.hpp"
#include "qicap/specfun.hpp"
#include "qicap/trace.hpp"

namespace qicap::capacitance {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GateCouplings GateCouplings::from_difference(double alpha_minus, double alpha_plus) {
    return {alpha_plus - alpha_minus, alpha_plus + alpha_minus};
}

std::vector<std::string> GateCouplings::warnings() const {
    std::vector<std::string> w;
    if (alpha1 <= 0.0 || alpha1 >= 1.0 || alpha2 <= 0.0 || alpha2 >= 1.0)
        w.push_back("gate couplings outside (0, 1): alpha1 = " + std::to_string(alpha1) +
                    ", alpha2 = " + std::to_string(alpha2));
    if (alpha_minus() <= 0.0)
        w.push_back("alpha_minus <= 0; the detuning-voltage mapping degenerates");
    else if (alpha_minus() > 0.5 * alpha_plus())
        w.push_back("alpha_minus is not small against alpha_plus; the capacitance "
                    "formula assumes similar gate couplings");
    return w;
}

std::vector<std::string> CircuitParams::warnings() const {
    std::vector<std::string> w;
    if (c_g1_f <= 0 || c_g2_f <= 0 || c_m_f <= 0 || c_d_f <= 0 || c_p_f <= 0)
        w.push_back("capacitances must be positive");
    else if (c_m_f > 0.2 * std::min(c_g2_f, c_d_f))
        w.push_back("mutual capacitance C_m is not small against C_G2, C_D; "
                    "weak-coupling expressions may be inaccurate");
    return w;
}

double geometric_capacitance(const CircuitParams& c) {
    return c.c_g2_f / (c.c_g2_f + c.c_d_f) * c.c_g2_f;
}

double gamma_factor(Energy eps0, const dynamics::RateParams& rate,
                    const dynamics::RelaxationParams& rel) {
    const double z = dynamics::zeta(rate.amplitude, rate.omega);
    const double t1 = dynamics::first_passage_time(eps0, rate.amplitude, rate.omega);
    return rel.t1_ns * kPi * z * z * rate.delta.uev * rate.delta.uev /
           (kHbarUevNs * kHbarUevNs * rate.omega.rad_per_ns) *
           std::exp(-t1 / rate.t2_ns);
}

namespace {

// e^2 / (hbar omega) expressed in farads when hbar omega is in ueV.
double charge_prefactor_farads(double hw_uev) {
    return kElementaryChargeC * 1e6 / hw_uev;
}

} // namespace

double parametric_capacitance(Energy eps0, const ModelParams& p) {
    const double hw = units::photon_energy_uev(p.omega);
    const double z = dynamics::zeta(p.amplitude, p.omega);
    const double u = z * (eps0.uev - p.amplitude.uev) / hw;
    const auto [ai, aip] = specfun::airy_ai_both(u);
    const double g = gamma_factor(eps0, p.rate_params(), p.relaxation_params());
    const double pr = dynamics::reservoir_prob(eps0, p.reservoir_params(),
                                               p.amplitude, p.omega);
    const double pref = 2.0 * charge_prefactor_farads(hw) *
                        p.couplings.alpha_minus() * p.couplings.alpha_plus() * z;
    const double denom = 1.0 + g * ai * ai;
    return pref * pr * g * aip * ai / (denom * denom);
}

double fringe_envelope(Energy eps0, const ModelParams& p) {
    const double hw = units::photon_energy_uev(p.omega);
    const double z = dynamics::zeta(p.amplitude, p.omega);
    // |Ai' Ai| at fringe maxima tends to 1/(2 pi) and Ai^2 there to
    // 1/(2 pi sqrt|u|); clamp |u| away from the turning point.
    const double u = std::min(z * (eps0.uev - p.amplitude.uev) / hw, -0.25);
    const double g = gamma_factor(eps0, p.rate_params(), p.relaxation_params());
    const double pr = dynamics::reservoir_prob(eps0, p.reservoir_params(),
                                               p.amplitude, p.omega);
    const double pref = 2.0 * charge_prefactor_farads(hw) *
                        p.couplings.alpha_minus() * p.couplings.alpha_plus() * z;
    const double sat = 1.0 + g / (2.0 * kPi * std::sqrt(-u));
    return pref * pr * g / (2.0 * kPi) / (sat * sat);
}

double capacitance_sinusoid(Voltage v_tg, const ModelParams& p) {
    const Energy eps0 =
        units::detuning_from_voltage(v_tg, p.couplings.alpha_minus(), p.vtg0);
    const Voltage dv = voltage_period(p.omega, p.couplings.alpha_minus());
    const double env = fringe_envelope(eps0, p);
    return env * std::cos(2.0 * kPi * (v_tg.volts - p.vtg0.volts) / dv.volts);
}

Voltage voltage_period(AngularFrequency omega, double alpha_minus) {
    if (alpha_minus == 0.0)
        throw InvalidInput("voltage_period: alpha_minus = 0 (division by zero)");
    const double hw_ev = units::photon_energy_uev(omega) * 1e-6;
    return Voltage{kPi * hw_ev / (2.0 * std::sqrt(2.0) * alpha_minus)};
}

double phase_shift(double c_pm_farads, const CircuitParams& c) {
    if (c.c_p_f <= 0.0) throw InvalidInput("phase_shift: C_p must be > 0");
    return -2.0 * c.q_factor * c_pm_farads / c.c_p_f;
}

} // namespace qicap::capacitance

namespace qicap {

std::string to_string(Branch b) {
    return b == Branch::dot01_11 ? "01-11" : "00-10";
}

Branch branch_from_string(const std::string& s) {
    if (s == "01-11") return Branch::dot01_11;
    if (s == "00-10") return Branch::dot00_10;
    throw InvalidInput("unknown branch '" + s + "' (expected 01-11 or 00-10)");
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::detuning_reduced: return "detuning-reduced";
        case SweepAxis::detuning_absolute: return "detuning-absolute";
        case SweepAxis::gate_voltage: return "gate-voltage";
    }
    return "?";
}

SweepAxis axis_from_string(const std::string& s) {
    if (s == "detuning-reduced") return SweepAxis::detuning_reduced;
    if (s == "detuning-absolute") return SweepAxis::detuning_absolute;
    if (s == "gate-voltage") return SweepAxis::gate_voltage;
    throw InvalidInput("unknown sweep axis '" + s + "'");
}

Trace normalize_trace(const Trace& t) {
    if (t.size() == 0) throw DomainError("normalize_trace: empty trace");
    double peak = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (!t.gaps.empty() && t.gaps[i]) continue;
        peak = std::max(peak, std::abs(t.values[i]));
    }
    if (peak == 0.0)
        throw DomainError("normalize_trace: all values are zero or gaps");
    Trace out = t;
    for (size_t i = 0; i < out.values.size(); ++i) {
        if (!out.gaps.empty() && out.gaps[i]) continue;
        out.values[i] /= peak;
    }
    return out;
}

} // namespace qicap

#include "qicap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qicap/errors.hpp"
#include "qicap/specfun.hpp"

namespace qicap::dynamics {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double zeta(Energy amplitude, AngularFrequency omega) {
    if (amplitude.uev <= 0.0)
        throw DomainError("zeta: amplitude must be > 0 (division by zero)");
    return std::cbrt(2.0 * units::photon_energy_uev(omega) / amplitude.uev);
}

double first_passage_time(Energy eps0, Energy amplitude, AngularFrequency omega) {
    if (amplitude.uev <= 0.0)
        throw DomainError("first_passage_time: amplitude must be > 0");
    const double r = std::clamp(eps0.uev / amplitude.uev, -1.0, 1.0);
    return 2.0 * (kPi - std::asin(r)) / omega.rad_per_ns;
}

double lzsm_rate_airy(Energy eps0, const RateParams& p) {
    const double hw = units::photon_energy_uev(p.omega);
    const double z = zeta(p.amplitude, p.omega);
    const double u = z * (eps0.uev - p.amplitude.uev) / hw;
    const double ai = specfun::airy_ai(u);
    const double t1 = first_passage_time(eps0, p.amplitude, p.omega);
    const double pref = kPi * p.delta.uev * p.delta.uev * z * z /
                        (2.0 * kHbarUevNs * kHbarUevNs * p.omega.rad_per_ns);
    return pref * ai * ai * std::exp(-t1 / p.t2_ns);
}

double dlzsm_rate_airy_deps(Energy eps0, const RateParams& p) {
    const double hw = units::photon_energy_uev(p.omega);
    const double z = zeta(p.amplitude, p.omega);
    const double u = z * (eps0.uev - p.amplitude.uev) / hw;
    const auto [ai, aip] = specfun::airy_ai_both(u);
    const double t1 = first_passage_time(eps0, p.amplitude, p.omega);
    const double pref = kPi * p.delta.uev * p.delta.uev * z * z /
                        (2.0 * kHbarUevNs * kHbarUevNs * p.omega.rad_per_ns);
    const double damp = std::exp(-t1 / p.t2_ns);
    // d/deps of Ai^2(u(eps)) plus the t1(eps) dependence of the damping;
    // inside the clamp region dt1/deps = -2 / (omega sqrt(A^2 - eps^2)).
    double dt1 = 0.0;
    const double a = p.amplitude.uev;
    if (std::abs(eps0.uev) < a) {
        dt1 = -2.0 / (p.omega.rad_per_ns * std::sqrt(a * a - eps0.uev * eps0.uev));
    }
    return pref * damp * (2.0 * ai * aip * z / hw - ai * ai * dt1 / p.t2_ns);
}

BesselSumResult lzsm_rate_bessel_sum_detail(Energy eps0, const RateParams& p) {
    const double hw = units::photon_energy_uev(p.omega);
    const double zarg = p.amplitude.uev / hw;
    const int nmax = static_cast<int>(std::ceil(zarg)) + 40;
    const auto j = specfun::bessel_j_sequence(nmax, zarg);

    const double hwhm = kHbarUevNs / p.t2_ns;  // Lorentzian half-width, ueV
    double sum = 0.0;
    for (int n = -nmax; n <= nmax; ++n) {
        const double j2 = j[static_cast<size_t>(std::abs(n))] * j[static_cast<size_t>(std::abs(n))];
        const double d = eps0.uev - n * hw;
        sum += j2 * hwhm / (d * d + hwhm * hwhm);
    }
    const double pref = p.delta.uev * p.delta.uev / (2.0 * kHbarUevNs);
    // Tail: remaining weight sum_{|n|>N} J_n^2 < 2 J_N^2 (super-exponential
    // decay past the turning point), each line bounded by 1/hwhm.
    const double jN = j[static_cast<size_t>(nmax)];
    return {pref * sum, pref * 2.0 * jN * jN / hwhm};
}

double lzsm_rate_bessel_sum(Energy eps0, const RateParams& p) {
    return lzsm_rate_bessel_sum_detail(eps0, p).rate;
}

OccupationState stationary_pg(double w_rate, double gamma1) {
    if (w_rate < 0.0 || gamma1 < 0.0)
        throw InvalidInput("stationary_pg: rates must be >= 0");
    if (w_rate == 0.0 && gamma1 == 0.0)
        throw DomainError("stationary_pg: W = Gamma1 = 0, stationary state undefined");
    const double pg = 1.0 - w_rate / (2.0 * w_rate + gamma1);
    return {pg, 1.0 - pg};
}

double reservoir_prob(Energy eps0, const ReservoirParams& r, Energy amplitude,
                      AngularFrequency omega) {
    const double arg = (r.eps_hat.uev - eps0.uev) / amplitude.uev;
    if (std::abs(arg) > 1.0)
        throw DomainError("reservoir_prob: |(eps_hat - eps0)/A| > 1 at eps0 = " +
                          std::to_string(eps0.uev) + " ueV");
    const double t_res = (kPi - 2.0 * std::asin(arg)) / omega.rad_per_ns;
    return 1.0 - std::exp(-t_res / r.tr_ns);
}

double dreservoir_prob_deps(Energy eps0, const ReservoirParams& r, Energy amplitude,
                            AngularFrequency omega) {
    const double a = amplitude.uev;
    const double arg = (r.eps_hat.uev - eps0.uev) / a;
    if (std::abs(arg) > 1.0)
        throw DomainError("dreservoir_prob_deps: |(eps_hat - eps0)/A| > 1 at eps0 = " +
                          std::to_string(eps0.uev) + " ueV");
    const double t_res = (kPi - 2.0 * std::asin(arg)) / omega.rad_per_ns;
    const double dt = 2.0 / (omega.rad_per_ns * a * std::sqrt(1.0 - arg * arg));
    return std::exp(-t_res / r.tr_ns) * dt / r.tr_ns;
}

double p11(Energy eps0, const RateParams& p, const RelaxationParams& rel,
           const ReservoirParams& r) {
    const double w = lzsm_rate_airy(eps0, p);
    const double pr = reservoir_prob(eps0, r, p.amplitude, p.omega);
    return pr * stationary_pg(w, rel.gamma1()).p_ground;
}

double dp11_deps_full(Energy eps0, const RateParams& p, const RelaxationParams& rel,
                      const ReservoirParams& r) {
    const double w = lzsm_rate_airy(eps0, p);
    const double dw = dlzsm_rate_airy_deps(eps0, p);
    const double g1 = rel.gamma1();
    const double pr = reservoir_prob(eps0, r, p.amplitude, p.omega);
    const double dpr = dreservoir_prob_deps(eps0, r, p.amplitude, p.omega);
    const double denom = 2.0 * w + g1;
    return dpr * (1.0 - w / denom) - pr * g1 * dw / (denom * denom);
}

double dp11_deps_approx(Energy eps0, const RateParams& p, const RelaxationParams& rel,
                        const ReservoirParams& r) {
    const double w = lzsm_rate_airy(eps0, p);
    const double dw = dlzsm_rate_airy_deps(eps0, p);
    const double pr = reservoir_prob(eps0, r, p.amplitude, p.omega);
    const double s = 1.0 + 2.0 * w * rel.t1_ns;
    return -pr * rel.t1_ns * dw / (s * s);
}

} // namespace qicap::dynamics

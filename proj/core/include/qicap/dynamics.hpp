#ifndef QICAP_DYNAMICS_HPP
#define QICAP_DYNAMICS_HPP

#include "qicap/units.hpp"

// LZSM transition rates, stationary occupations and reservoir exchange for
// the driven two-level system.  All rates are in 1/ns, all energies in ueV.
//
// The double-passage rate uses the Airy closed form
//   W = pi Delta^2 zeta^2 / (2 hbar^2 omega) * Ai^2[zeta (eps0 - A)/(hbar
//   omega)] * exp(-t1/T2),
// with zeta = (2 hbar omega / A)^{1/3} and t1 the inter-passage time.  The
// independent photon-sideband form sums Lorentzian lines of half-width
// hbar/T2 at eps0 = n hbar omega weighted by J_n^2(A / hbar omega); the
// integral underlying it is taken with the decaying phase-correlation
// convention exp(-t/T2).

namespace qicap::dynamics {

struct RateParams {
    Energy delta{20.0};          // tunnel coupling Delta
    Energy amplitude{1350.0};    // drive amplitude A
    AngularFrequency omega{kTwoPi * 11.0};
    double t2_ns = 0.035;        // coherence time T2
};

struct OccupationState {
    double p_ground = 1.0;
    double p_excited = 0.0;
};

struct ReservoirParams {
    Energy eps_hat{1350.0};      // (01)-(11) crossing detuning
    double tr_ns = 0.030;        // QD-reservoir relaxation time T_R
};

struct RelaxationParams {
    double t1_ns = 50.0;
    double gamma1() const { return 1.0 / t1_ns; }  // low-temperature limit, Gamma1_hat = 0
};

/// zeta = (2 hbar omega / A)^{1/3}, dimensionless.
double zeta(Energy amplitude, AngularFrequency omega);

/// Time between the two anticrossing passages, t1 = 2[pi - asin(eps0/A)]/omega.
/// The asin argument is clamped to [-1, 1] so the closed forms stay evaluable
/// in the decay region eps0 > A.
double first_passage_time(Energy eps0, Energy amplitude, AngularFrequency omega);

/// Double-passage LZSM rate, Airy closed form (1/ns).
double lzsm_rate_airy(Energy eps0, const RateParams& p);

struct BesselSumResult {
    double rate = 0.0;        // 1/ns
    double tail_bound = 0.0;  // bound on the truncated |n| > N contribution
};

/// Photon-sideband rate: (Delta^2 / 2 hbar) sum_n J_n^2(A/hbar omega) *
/// (hbar/T2) / [(eps0 - n hbar omega)^2 + (hbar/T2)^2].
/// Truncation at |n| <= ceil(A/hbar omega) + 40; the achieved tail bound is
/// reported alongside the value.
BesselSumResult lzsm_rate_bessel_sum_detail(Energy eps0, const RateParams& p);
double lzsm_rate_bessel_sum(Energy eps0, const RateParams& p);

/// Stationary solution of the master equation: P_g = 1 - W / (2W + Gamma1).
OccupationState stationary_pg(double w_rate, double gamma1);

/// Reservoir tunneling probability
/// P_R = 1 - exp{-[pi - 2 asin((eps_hat - eps0)/A)] / (T_R omega)}.
/// Throws DomainError (naming eps0) if the asin argument leaves [-1, 1].
double reservoir_prob(Energy eps0, const ReservoirParams& r, Energy amplitude,
                      AngularFrequency omega);

/// P11 = P_R * (1 - W / (2W + Gamma1)).
double p11(Energy eps0, const RateParams& p, const RelaxationParams& rel,
           const ReservoirParams& r);

/// dP11/deps0 with both terms retained (1/ueV).
double dp11_deps_full(Energy eps0, const RateParams& p, const RelaxationParams& rel,
                      const ReservoirParams& r);

/// dP11/deps0 with the dP_R term dropped:  -P_R T1 dW / (1 + 2 W T1)^2.
/// Valid as eps0 approaches eps_hat.
double dp11_deps_approx(Energy eps0, const RateParams& p, const RelaxationParams& rel,
                        const ReservoirParams& r);

// Closed-form ingredients shared with the capacitance module and the
// derivative checks.
double dreservoir_prob_deps(Energy eps0, const ReservoirParams& r, Energy amplitude,
                            AngularFrequency omega);
double dlzsm_rate_airy_deps(Energy eps0, const RateParams& p);

} // namespace qicap::dynamics

#endif

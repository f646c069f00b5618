#ifndef QICAP_ORACLE_HPP
#define QICAP_ORACLE_HPP

#include <functional>
#include <vector>

#include "qicap/dynamics.hpp"

// Independent brute-force validators used by the test suite and the CLI
// `verify` subcommand.  Deliberately different numerical machinery from the
// production modules (quadrature instead of closed sums, ODE stepping
// instead of algebra), so agreement is evidence rather than tautology.
// Never on the production path.

namespace qicap::oracle {

struct OdeResult {
    std::vector<double> time_ns;
    std::vector<double> p_ground;
    dynamics::OccupationState final_state{};
};

/// Fixed-step RK4 integration of the two-component rate equation
///   dPg/dt = (W + Gamma1) Pe - W Pg,  dPe/dt = -(W + Gamma1) Pe + W Pg.
/// dt_ns <= 0 picks a step from the relaxation time.  Throws Error if the
/// requested step count exceeds 1e8.
OdeResult integrate_rate_equation(double w_rate, double gamma1, double p_g0,
                                  double t_end_ns, double dt_ns = -1.0);

/// Closed-form solution of the same linear ODE at time t.
double rate_equation_analytic(double w_rate, double gamma1, double p_g0,
                              double t_ns);

struct QuadratureResult {
    double rate = 0.0;       // 1/ns
    double cauchy_residual = 0.0;  // |I(t_max) - I(t_max/2)| convergence gauge
};

/// Direct Simpson quadrature of the sideband integrand
///   (Delta^2 / 2 hbar^2) sum_n J_n^2 cos((eps0 - n hbar omega) t / hbar)
///   exp(-t/T2)
/// over t in [0, t_max].  Converges to lzsm_rate_bessel_sum as t_max grows;
/// requires t_max >= 20 T2.
QuadratureResult numeric_rate_integral(Energy eps0, const dynamics::RateParams& p,
                                       double t_max_ns);

/// Centered difference (f(x+h) - f(x-h)) / 2h, optionally Richardson
/// extrapolated across h and h/2.
double finite_difference(const std::function<double(double)>& fn, double x,
                         double h, bool richardson = false);

} // namespace qicap::oracle

#endif

#ifndef QICAP_SPECFUN_HPP
#define QICAP_SPECFUN_HPP

#include <vector>

// Self-contained evaluation of integer-order Bessel functions of the first
// kind and of the Airy function Ai and its derivative.  Nothing here depends
// on platform math libraries beyond elementary functions; this module is the
// repository's own oracle-grade implementation and is cross-checked against
// independent series oracles in the test suite.
//
// Accuracy targets: |error| < 1e-10 absolute for J_n with z <= 200, |n| <= 400,
// and for Ai, Ai' with |x| <= 50.

namespace qicap::specfun {

struct Airy {
    double ai = 0.0;
    double aip = 0.0;  // Ai'
};

/// Ai(x) and Ai'(x) in one evaluation.
/// Maclaurin series for |x| <= 7, standard asymptotic expansions beyond;
/// the switchover is validated against the series in the overlap region.
/// Underflow to 0 for large positive x is valid (Ai ~ exp(-2/3 x^{3/2})).
Airy airy_ai_both(double x);

double airy_ai(double x);
double airy_ai_prime(double x);

/// J_n(z), integer order.  Negative n and z are folded back with
/// J_{-n}(z) = (-1)^n J_n(z) and J_n(-z) = (-1)^n J_n(z).
double bessel_j(int n, double z);

/// J_0(z) .. J_nmax(z) by Miller's downward recurrence, normalized with
/// J_0 + 2 sum_{k>=1} J_2k = 1.  Requires z >= 0.  This is the workhorse
/// behind the photon-sideband sums, where all orders are needed at once.
std::vector<double> bessel_j_sequence(int nmax, double z);

} // namespace qicap::specfun

#endif

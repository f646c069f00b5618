#include "qicap/specfun.hpp"

#include <cmath>
#include <cstdlib>

#include "qicap/errors.hpp"

namespace qicap::specfun {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kAi0 = 0.35502805388781723926;    // 3^{-2/3} / Gamma(2/3)
constexpr double kAip0 = -0.25881940379280679840;  // -3^{-1/3} / Gamma(1/3)

// Maclaurin evaluation of Ai and Ai' through the two auxiliary series
//   f(x) = sum_k prod_{j<k}(3j+1) x^{3k} / (3k)!,
//   g(x) = sum_k prod_{j<k}(3j+2) x^{3k+1} / (3k+1)!.
// Both series grow to ~exp(2/3 |x|^{3/2}) before the result cancels down,
// so the accumulation runs in long double to keep the absolute error at
// |x| = 7 below 1e-13.
Airy airy_series(double x) {
    if (x == 0.0) return {kAi0, kAip0};
    const long double xl = x;
    const long double x3 = xl * xl * xl;
    long double tf = 1.0L, tg = xl;    // current f, g terms
    long double f = tf, g = tg;
    long double fp = 0.0L, gp = 1.0L;  // f' = sum 3k/x * tf, g' term k=0 is 1
    for (int k = 0; k < 120; ++k) {
        const long double k3 = 3.0L * k;
        tf *= x3 / ((k3 + 2.0L) * (k3 + 3.0L));
        tg *= x3 / ((k3 + 3.0L) * (k3 + 4.0L));
        f += tf;
        g += tg;
        fp += tf * (k3 + 3.0L) / xl;   // d/dx of the k+1 term of f
        gp += tg * (k3 + 4.0L) / xl;   // d/dx of the k+1 term of g
        if (std::abs(static_cast<double>(tf)) < 1e-18 * std::abs(static_cast<double>(f)) &&
            std::abs(static_cast<double>(tg)) < 1e-18 * std::abs(static_cast<double>(g)))
            break;
    }
    const long double c1 = 0.355028053887817239260L;  // Ai(0)
    const long double c2 = 0.258819403792806798405L;  // -Ai'(0)
    return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp)};
}

// Asymptotic coefficients c_k = Gamma(3k+1/2) / (54^k k! Gamma(k+1/2)),
// via c_k = c_{k-1} (6k-5)(6k-1) / (72k), and d_k = -c_k (6k+1)/(6k-1).
// Truncation at the smallest term; both expansions are well inside their
// optimal-truncation regime for |x| >= 7.
constexpr int kMaxAsym = 24;

Airy airy_asymptotic_pos(double x) {
    const double xi = 2.0 / 3.0 * x * std::sqrt(x);
    double c = 1.0, sa = 1.0, sd = 1.0;
    double sign = 1.0, prev = 1.0;
    for (int k = 1; k <= kMaxAsym; ++k) {
        c *= (6.0 * k - 5.0) * (6.0 * k - 1.0) / (72.0 * k);
        const double term = c / std::pow(xi, k);
        if (term > prev) break;  // past optimal truncation
        prev = term;
        sign = -sign;
        sa += sign * term;
        sd += sign * term * (-(6.0 * k + 1.0) / (6.0 * k - 1.0));
        if (term < 1e-17) break;
    }
    const double x14 = std::pow(x, 0.25);
    const double e = std::exp(-xi);
    return {e / (2.0 * kSqrtPi * x14) * sa, -x14 * e / (2.0 * kSqrtPi) * sd};
}

Airy airy_asymptotic_neg(double x) {
    const double t = -x;
    const double xi = 2.0 / 3.0 * t * std::sqrt(t);
    // Even/odd splits of the c_k and d_k tails.
    double ce = 1.0, co = 0.0, de = 1.0, dn = 0.0;
    double c = 1.0, prev = 1.0;
    for (int k = 1; k <= kMaxAsym; ++k) {
        c *= (6.0 * k - 5.0) * (6.0 * k - 1.0) / (72.0 * k);
        const double term = c / std::pow(xi, k);
        if (term > prev) break;
        prev = term;
        const double d = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * term;
        // (-1)^k applied within each parity class: k = 2m carries (-1)^m,
        // k = 2m+1 carries (-1)^m as well (DLMF 9.7.9-9.7.10).
        const int m = k / 2;
        const double ps = (m % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            ce += ps * term;
            de += ps * d;
        } else {
            co += ps * term;
            dn += ps * d;
        }
        if (term < 1e-17) break;
    }
    const double t14 = std::pow(t, 0.25);
    const double s = std::sin(xi + 0.25 * M_PI);
    const double cs = std::cos(xi + 0.25 * M_PI);
    const double ai = (s * ce - cs * co) / (kSqrtPi * t14);
    const double aip = -t14 / kSqrtPi * (cs * de + s * dn);
    return {ai, aip};
}

} // namespace

Airy airy_ai_both(double x) {
    if (!std::isfinite(x)) throw InvalidInput("airy_ai: non-finite argument");
    if (std::abs(x) <= 7.0) return airy_series(x);
    if (x > 0.0) {
        if (x > 106.0) return {0.0, 0.0};  // exp(-xi) underflows; Ai < 1e-300
        return airy_asymptotic_pos(x);
    }
    return airy_asymptotic_neg(x);
}

double airy_ai(double x) { return airy_ai_both(x).ai; }
double airy_ai_prime(double x) { return airy_ai_both(x).aip; }

namespace {

// Power series J_n(z) = (z/2)^n / n! sum_k (-z^2/4)^k / (k! (n+k)!),
// used for small z where the leading factor is exact and convergence is
// a handful of terms.
double bessel_series(int n, double z) {
    if (z == 0.0) return n == 0 ? 1.0 : 0.0;
    const double logpref = n * std::log(z / 2.0) - std::lgamma(n + 1.0);
    if (logpref < -745.0) return 0.0;  // below double underflow
    const double pref = std::exp(logpref);
    const double q = -0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= q / (static_cast<double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return pref * sum;
}

} // namespace

std::vector<double> bessel_j_sequence(int nmax, double z) {
    if (nmax < 0) throw InvalidInput("bessel_j_sequence: nmax must be >= 0");
    if (z < 0.0) throw InvalidInput("bessel_j_sequence: z must be >= 0");
    if (z > 5000.0)
        throw NumericRangeError("bessel_j_sequence: z beyond supported range (5000)");

    std::vector<double> out(static_cast<size_t>(nmax) + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (z < 0.5) {
        for (int n = 0; n <= nmax; ++n) out[n] = bessel_series(n, z);
        return out;
    }

    // Start the downward recurrence far enough above both the requested
    // order and the turning point n ~ z that J_start is negligible at
    // double precision after normalization.
    const double top = std::max(static_cast<double>(nmax), z);
    int start = static_cast<int>(top) + 80 + static_cast<int>(2.0 * std::cbrt(top));
    if (start % 2 != 0) ++start;

    double fkp1 = 0.0;        // J_{k+1} (unnormalized)
    double fk = 1e-30;        // J_k
    double norm = 0.0;        // accumulates J_0 + 2 sum J_{2m}
    for (int k = start; k >= 1; --k) {
        const double fkm1 = (2.0 * k / z) * fk - fkp1;
        fkp1 = fk;
        fk = fkm1;
        if (k - 1 <= nmax) out[k - 1] = fk;
        if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? fk : 2.0 * fk;
        if (std::abs(fk) > 1e250) {  // rescale to dodge overflow
            fk *= 1e-250;
            fkp1 *= 1e-250;
            norm *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    for (auto& v : out) v /= norm;
    return out;
}

double bessel_j(int n, double z) {
    // fold sign conventions: J_{-n}(z) = (-1)^n J_n(z), J_n(-z) = (-1)^n J_n(z)
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2 != 0) sign = -sign;
    }
    if (z < 0.0) {
        z = -z;
        if (n % 2 != 0) sign = -sign;
    }
    if (!std::isfinite(z)) throw InvalidInput("bessel_j: non-finite argument");
    if (z < 0.5) return sign * bessel_series(n, z);
    return sign * bessel_j_sequence(n, z)[static_cast<size_t>(n)];
}

} // namespace qicap::specfun

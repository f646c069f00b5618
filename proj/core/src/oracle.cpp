#include "qicap/oracle.hpp"

#include <cmath>

#include "qicap/errors.hpp"
#include "qicap/specfun.hpp"

namespace qicap::oracle {

namespace {

struct State {
    double pg, pe;
};

State rhs(double w, double g1, State s) {
    const double flow = (w + g1) * s.pe - w * s.pg;
    return {flow, -flow};
}

} // namespace

OdeResult integrate_rate_equation(double w_rate, double gamma1, double p_g0,
                                  double t_end_ns, double dt_ns) {
    if (w_rate < 0.0 || gamma1 < 0.0)
        throw InvalidInput("integrate_rate_equation: rates must be >= 0");
    if (p_g0 < 0.0 || p_g0 > 1.0)
        throw InvalidInput("integrate_rate_equation: p_g0 must lie in [0, 1]");
    if (t_end_ns <= 0.0)
        throw InvalidInput("integrate_rate_equation: t_end must be > 0");

    if (dt_ns <= 0.0) {
        // RK4 global error ~ (dt/tau)^4; tau/200 keeps trajectories inside
        // the 1e-10 agreement bound against the analytic solution
        const double total = 2.0 * w_rate + gamma1;
        const double tau = total > 0.0 ? 1.0 / total : t_end_ns;
        dt_ns = std::min(tau / 200.0, t_end_ns / 200.0);
    }
    const double steps_needed = std::ceil(t_end_ns / dt_ns);
    if (steps_needed > 1e8)
        throw Error("integrate_rate_equation: step count exceeds 1e8");
    const long n = static_cast<long>(steps_needed);
    const double h = t_end_ns / n;

    OdeResult out;
    out.time_ns.reserve(n + 1);
    out.p_ground.reserve(n + 1);
    State s{p_g0, 1.0 - p_g0};
    out.time_ns.push_back(0.0);
    out.p_ground.push_back(s.pg);
    for (long i = 0; i < n; ++i) {
        const State k1 = rhs(w_rate, gamma1, s);
        const State k2 = rhs(w_rate, gamma1, {s.pg + 0.5 * h * k1.pg, s.pe + 0.5 * h * k1.pe});
        const State k3 = rhs(w_rate, gamma1, {s.pg + 0.5 * h * k2.pg, s.pe + 0.5 * h * k2.pe});
        const State k4 = rhs(w_rate, gamma1, {s.pg + h * k3.pg, s.pe + h * k3.pe});
        s.pg += h / 6.0 * (k1.pg + 2.0 * k2.pg + 2.0 * k3.pg + k4.pg);
        s.pe += h / 6.0 * (k1.pe + 2.0 * k2.pe + 2.0 * k3.pe + k4.pe);
        out.time_ns.push_back((i + 1) * h);
        out.p_ground.push_back(s.pg);
    }
    out.final_state = {s.pg, s.pe};
    return out;
}

double rate_equation_analytic(double w_rate, double gamma1, double p_g0,
                              double t_ns) {
    const double total = 2.0 * w_rate + gamma1;
    if (total == 0.0) return p_g0;  // frozen dynamics
    const double p_inf = (w_rate + gamma1) / total;
    return p_inf + (p_g0 - p_inf) * std::exp(-total * t_ns);
}

QuadratureResult numeric_rate_integral(Energy eps0, const dynamics::RateParams& p,
                                       double t_max_ns) {
    if (t_max_ns < 20.0 * p.t2_ns)
        throw InvalidInput("numeric_rate_integral: t_max must be >= 20 T2");

    const double hw = units::photon_energy_uev(p.omega);
    const double zarg = p.amplitude.uev / hw;
    const int nmax = static_cast<int>(std::ceil(zarg)) + 40;
    const auto j = specfun::bessel_j_sequence(nmax, zarg);

    // Fastest phase in the integrand sets the resolution.
    double max_freq = 0.0;  // rad/ns
    for (int n = -nmax; n <= nmax; ++n)
        max_freq = std::max(max_freq, std::abs(eps0.uev - n * hw) / kHbarUevNs);
    const double dt_osc = (max_freq > 0.0) ? kTwoPi / max_freq / 96.0 : t_max_ns;
    const double dt_decay = p.t2_ns / 50.0;
    const double dt = std::min(dt_osc, dt_decay);

    auto integrand = [&](double t) {
        double s = 0.0;
        for (int n = -nmax; n <= nmax; ++n) {
            const double j2 =
                j[static_cast<size_t>(std::abs(n))] * j[static_cast<size_t>(std::abs(n))];
            s += j2 * std::cos((eps0.uev - n * hw) * t / kHbarUevNs);
        }
        return s * std::exp(-t / p.t2_ns);
    };

    auto simpson = [&](double upper) {
        long n = static_cast<long>(std::ceil(upper / dt));
        if (n % 2 != 0) ++n;
        const double h = upper / n;
        double acc = integrand(0.0) + integrand(upper);
        for (long i = 1; i < n; ++i)
            acc += integrand(i * h) * ((i % 2 != 0) ? 4.0 : 2.0);
        return acc * h / 3.0;
    };

    const double pref =
        p.delta.uev * p.delta.uev / (2.0 * kHbarUevNs * kHbarUevNs);
    const double full = pref * simpson(t_max_ns);
    const double half = pref * simpson(0.5 * t_max_ns);
    return {full, std::abs(full - half)};
}

double finite_difference(const std::function<double(double)>& fn, double x,
                         double h, bool richardson) {
    if (!(h > 0.0)) throw InvalidInput("finite_difference: h must be > 0");
    auto centered = [&](double step) { return (fn(x + step) - fn(x - step)) / (2.0 * step); };
    const double d_h = centered(h);
    if (!richardson) return d_h;
    const double d_h2 = centered(0.5 * h);
    return (4.0 * d_h2 - d_h) / 3.0;  // cancels the h^2 error term
}

} // namespace qicap::oracle

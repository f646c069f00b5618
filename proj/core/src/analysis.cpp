#include "qicap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include "qicap/errors.hpp"
#include "qicap/specfun.hpp"
#include "qicap/sweep.hpp"

namespace qicap::analysis {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> fill_gaps(const Trace& t) {
    std::vector<double> v = t.values;
    if (t.gaps.empty()) return v;
    // linear interpolation across interior gaps, copy at the edges
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
        if (!t.gaps[i]) continue;
        size_t lo = i;
        while (lo > 0 && t.gaps[lo]) --lo;
        size_t hi = i;
        while (hi + 1 < n && t.gaps[hi]) ++hi;
        const bool has_lo = !t.gaps[lo], has_hi = !t.gaps[hi];
        if (has_lo && has_hi) {
            const double f = (t.axis[i] - t.axis[lo]) / (t.axis[hi] - t.axis[lo]);
            v[i] = v[lo] + f * (v[hi] - v[lo]);
        } else if (has_lo) {
            v[i] = v[lo];
        } else if (has_hi) {
            v[i] = v[hi];
        } else {
            throw InsufficientData("trace consists entirely of gap points");
        }
    }
    return v;
}

} // namespace

SpectrumPeak fourier_peak(const Trace& t) {
    const size_t n = t.size();
    if (n < 8) throw InsufficientData("fourier_peak: trace too short");

    std::vector<double> x = t.axis;
    std::vector<double> v = fill_gaps(t);

    // uniformity check; resample linearly if the spacing wobbles
    const double span = x.back() - x.front();
    if (!(span > 0.0)) throw InvalidInput("fourier_peak: axis must increase");
    const double dx = span / static_cast<double>(n - 1);
    double worst = 0.0;
    for (size_t i = 1; i < n; ++i)
        worst = std::max(worst, std::abs((x[i] - x[i - 1]) - dx));
    if (worst > 1e-9 * dx) {
        std::vector<double> xu(n), vu(n);
        size_t j = 0;
        for (size_t i = 0; i < n; ++i) {
            const double xi = x.front() + static_cast<double>(i) * dx;
            while (j + 2 < n && x[j + 1] < xi) ++j;
            const double f = (xi - x[j]) / (x[j + 1] - x[j]);
            xu[i] = xi;
            vu[i] = v[j] + std::clamp(f, 0.0, 1.0) * (v[j + 1] - v[j]);
        }
        x.swap(xu);
        v.swap(vu);
    }

    double mean = 0.0;
    for (double y : v) mean += y;
    mean /= static_cast<double>(n);
    const double dc_mag = std::abs(mean) * static_cast<double>(n);

    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = v[i] - mean;

    // oscillation count: a full period crosses the mean twice
    int sign_changes = 0;
    double last_sign = 0.0;
    for (double y : d) {
        const double s = (y > 0.0) ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
        if (s != 0.0) {
            if (last_sign != 0.0 && s != last_sign) ++sign_changes;
            last_sign = s;
        }
    }
    if (sign_changes < 8)
        throw InsufficientData(
            "fourier_peak: fewer than 4 oscillation periods in-window (" +
            std::to_string(sign_changes / 2) + " found)");

    // direct DFT magnitudes for k = 1 .. n/2 via phasor recurrence
    const size_t kmax = n / 2;
    std::vector<double> mag(kmax + 1, 0.0);
    for (size_t k = 1; k <= kmax; ++k) {
        const double th = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        const std::complex<double> w(std::cos(th), std::sin(th));
        std::complex<double> ph(1.0, 0.0), acc(0.0, 0.0);
        for (size_t j = 0; j < n; ++j) {
            acc += d[j] * ph;
            ph *= w;
        }
        mag[k] = std::abs(acc);
    }

    size_t kpk = 1;
    for (size_t k = 2; k <= kmax; ++k)
        if (mag[k] > mag[kpk]) kpk = k;

    double delta = 0.0;
    if (kpk > 1 && kpk < kmax && mag[kpk - 1] > 0.0 && mag[kpk + 1] > 0.0) {
        const double la = std::log(mag[kpk - 1]);
        const double lb = std::log(mag[kpk]);
        const double lc = std::log(mag[kpk + 1]);
        const double den = la - 2.0 * lb + lc;
        if (std::abs(den) > 1e-300) delta = std::clamp(0.5 * (la - lc) / den, -0.5, 0.5);
    }

    const double bin = 1.0 / (static_cast<double>(n) * dx);
    SpectrumPeak out;
    out.position = (static_cast<double>(kpk) + delta) * bin;
    out.magnitude = 2.0 * mag[kpk] / static_cast<double>(n);
    out.uncertainty = 0.5 * bin;
    out.dc_dominated = dc_mag > mag[kpk];
    return out;
}

// ---------------------------------------------------------------------------
// Nelder-Mead in log-parameter space, shared by the envelope and trace fits.
// ---------------------------------------------------------------------------

namespace {

struct NmOutcome {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

NmOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                      const std::vector<double>& x0, double step, int max_iter,
                      double rel_tol) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> xs(n + 1, x0);
    for (size_t i = 0; i < n; ++i) xs[i + 1][i] += step;
    std::vector<double> fs(n + 1);
    for (size_t i = 0; i <= n; ++i) fs[i] = fn(xs[i]);

    auto order = [&]() {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> x2;
        std::vector<double> f2;
        for (size_t i : idx) {
            x2.push_back(xs[i]);
            f2.push_back(fs[i]);
        }
        xs.swap(x2);
        fs.swap(f2);
    };

    int it = 0;
    bool conv = false;
    for (; it < max_iter; ++it) {
        order();
        // absolute floor handles exact fits, where the objective is 0 and a
        // purely relative criterion could never trigger
        if (std::abs(fs[n] - fs[0]) <= rel_tol * std::abs(fs[0]) + 1e-24) {
            conv = true;
            break;
        }
        std::vector<double> c(n, 0.0);  // centroid of all but worst
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) c[k] += xs[i][k] / static_cast<double>(n);

        auto blend = [&](const std::vector<double>& base, double coef) {
            std::vector<double> p(n);
            for (size_t k = 0; k < n; ++k) p[k] = c[k] + coef * (base[k] - c[k]);
            return p;
        };

        const auto xr = blend(xs[n], -1.0);  // reflection
        const double fr = fn(xr);
        if (fr < fs[0]) {
            const auto xe = blend(xs[n], -2.0);  // expansion
            const double fe = fn(xe);
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
        } else {
            const bool outside = fr < fs[n];
            const auto xc = blend(xs[n], outside ? -0.5 : 0.5);
            const double fc = fn(xc);
            if (fc < std::min(fr, fs[n])) {
                xs[n] = xc;
                fs[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {  // shrink toward best
                    for (size_t k = 0; k < n; ++k)
                        xs[i][k] = xs[0][k] + 0.5 * (xs[i][k] - xs[0][k]);
                    fs[i] = fn(xs[i]);
                }
            }
        }
    }
    order();
    return {xs[0], fs[0], it, conv};
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    const double decades = std::log10(hi / lo);
    const int npts = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
    std::vector<double> g(npts);
    for (int i = 0; i < npts; ++i)
        g[i] = std::log(lo) + (std::log(hi) - std::log(lo)) * i / (npts - 1);
    return g;
}

// Solve the small symmetric system via Gauss-Jordan; returns false if singular.
bool invert_small(std::vector<std::vector<double>>& a) {
    const size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double d = a[col][col];
        for (size_t k = 0; k < n; ++k) {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    a = inv;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Envelope
// ---------------------------------------------------------------------------

EnvelopeResult envelope(const Trace& t, const EnvelopeOptions& opt) {
    const size_t n = t.size();
    if (n < 5) throw InsufficientData("envelope: trace too short");
    const std::vector<double> v = fill_gaps(t);

    std::vector<size_t> imax, imin;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) imax.push_back(i);
        if (v[i] < v[i - 1] && v[i] <= v[i + 1]) imin.push_back(i);
    }
    if (imax.size() + imin.size() < 3)
        throw InsufficientData("envelope: fewer than 3 extrema");

    auto interp = [&](const std::vector<size_t>& knots) {
        std::vector<double> env(n);
        for (size_t i = 0; i < n; ++i) {
            if (knots.empty()) break;
            if (i <= knots.front()) {
                env[i] = v[knots.front()];
                continue;
            }
            if (i >= knots.back()) {
                env[i] = v[knots.back()];
                continue;
            }
            const auto it = std::upper_bound(knots.begin(), knots.end(), i);
            const size_t hi = *it, lo = *(it - 1);
            const double f = (t.axis[i] - t.axis[lo]) / (t.axis[hi] - t.axis[lo]);
            env[i] = v[lo] + f * (v[hi] - v[lo]);
        }
        return env;
    };

    EnvelopeResult out;
    out.axis = t.axis;
    out.upper = interp(imax);
    out.lower = interp(imin);

    if (!opt.fit_timescales) return out;

    // fringe peaks: local maxima of |C| above a noise floor
    std::vector<double> av(n);
    for (size_t i = 0; i < n; ++i) av[i] = std::abs(v[i]);
    const double top = *std::max_element(av.begin(), av.end());
    std::vector<double> pos, val;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (av[i] > av[i - 1] && av[i] >= av[i + 1] && av[i] > 1e-3 * top) {
            pos.push_back(t.axis[i]);
            val.push_back(av[i]);
        }
    }
    if (pos.size() < 4) throw InsufficientData("envelope: too few fringes for a timescale fit");

    const capacitance::ModelParams* ref = nullptr;
    if (t.meta.has_params) ref = &t.meta.params;
    else if (opt.reference) ref = &*opt.reference;
    if (ref == nullptr)
        throw InvalidInput("envelope: timescale fit needs a parameter snapshot or reference");

    const capacitance::ModelParams& mp = *ref;
    // the trace always knows its own drive frequency; only the device
    // parameters fall back to the reference
    const AngularFrequency w =
        t.meta.omega.rad_per_ns > 0.0 ? t.meta.omega : mp.omega;
    const double hw = units::photon_energy_uev(w);
    const double z = dynamics::zeta(mp.amplitude, w);
    const double gamma_pref = mp.t1_ns * kPi * z * z * mp.delta.uev * mp.delta.uev /
                              (kHbarUevNs * kHbarUevNs * w.rad_per_ns);

    // Per-peak geometry, reused across objective evaluations.
    struct Pk {
        double t1_ns, t_res_ns, aiai_p, ai2;
        double v;
    };
    std::vector<Pk> pk;
    for (size_t i = 0; i < pos.size(); ++i) {
        Energy eps = sweep::eval_detuning(t.meta.axis, pos[i], mp, t.meta.branch);
        const double arg = (mp.eps_hat.uev - eps.uev) / mp.amplitude.uev;
        if (std::abs(arg) > 1.0) continue;
        const double u = z * (eps.uev - mp.amplitude.uev) / hw;
        const auto [ai, aip] = specfun::airy_ai_both(u);
        pk.push_back({dynamics::first_passage_time(eps, mp.amplitude, w),
                      (kPi - 2.0 * std::asin(arg)) / w.rad_per_ns,
                      std::abs(ai * aip), ai * ai, val[i]});
    }
    if (pk.size() < 4) throw InsufficientData("envelope: too few in-domain fringes");

    auto obj = [&](const std::vector<double>& p) {
        const double K = std::exp(p[0]), T2 = std::exp(p[1]), TR = std::exp(p[2]);
        double s = 0.0;
        for (const auto& q : pk) {
            const double g = gamma_pref * std::exp(-q.t1_ns / T2);
            const double pr = 1.0 - std::exp(-q.t_res_ns / TR);
            const double sat = 1.0 + g * q.ai2;
            const double e = K * pr * g * q.aiai_p / (sat * sat);
            if (!(e > 0.0)) return 1e100;
            const double r = std::log(e) - std::log(q.v);
            s += r * r;
        }
        return s;
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> x0(3, 0.0);
    for (double lk : log_grid(top * 1e-3, top * 1e3, 2))
        for (double l2 : log_grid(1e-3, 1.0, 2))
            for (double lr : log_grid(1e-3, 1.0, 2)) {
                const double f = obj({lk, l2, lr});
                if (f < best) {
                    best = f;
                    x0 = {lk, l2, lr};
                }
            }
    auto nm = nelder_mead(obj, x0, 0.4, 3000, 1e-12);
    nm = nelder_mead(obj, nm.x, 0.05, 1500, 1e-12);
    out.t2_ns = std::exp(nm.x[1]);
    out.tr_ns = std::exp(nm.x[2]);
    return out;
}

// ---------------------------------------------------------------------------
// Peak-to-peak amplitude vs drive frequency
// ---------------------------------------------------------------------------

std::vector<PeakToPeakPoint> peak_to_peak_vs_frequency(
    const std::vector<Trace>& traces, double window_lo, double window_hi) {
    if (traces.size() < 2)
        throw InvalidInput("peak_to_peak_vs_frequency: need at least 2 traces");
    std::vector<PeakToPeakPoint> out;
    for (const auto& t : traces) {
        double vmin = std::numeric_limits<double>::infinity();
        double vmax = -vmin;
        for (size_t i = 0; i < t.size(); ++i) {
            if (!t.gaps.empty() && t.gaps[i]) continue;
            if (t.meta.has_params) {
                const Energy eps = sweep::eval_detuning(t.meta.axis, t.axis[i],
                                                        t.meta.params, t.meta.branch);
                const double red = eps.uev / t.meta.params.amplitude.uev;
                if (red < window_lo || red > window_hi) continue;
            } else if (t.meta.axis == SweepAxis::detuning_reduced) {
                // a reduced axis is already eps0/A, so the window applies
                // even without a parameter snapshot
                const double red =
                    t.meta.branch == Branch::dot00_10 ? -t.axis[i] : t.axis[i];
                if (red < window_lo || red > window_hi) continue;
            }
            vmin = std::min(vmin, t.values[i]);
            vmax = std::max(vmax, t.values[i]);
        }
        if (!(vmax >= vmin))
            throw InsufficientData(
                "peak_to_peak_vs_frequency: empty oscillatory window for trace at " +
                std::to_string(units::ghz_from_omega(t.meta.omega)) + " GHz");
        out.push_back({t.meta.omega, vmax - vmin});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.omega.rad_per_ns < b.omega.rad_per_ns;
    });
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i].omega.rad_per_ns == out[i - 1].omega.rad_per_ns)
            throw InvalidInput("peak_to_peak_vs_frequency: duplicate frequencies");
    return out;
}

// ---------------------------------------------------------------------------
// Parameter fit
// ---------------------------------------------------------------------------

namespace {

capacitance::ModelParams apply_free(const capacitance::ModelParams& base,
                                    const FitMask& mask,
                                    const std::vector<double>& logth) {
    capacitance::ModelParams p = base;
    size_t k = 0;
    if (mask.t1) p.t1_ns = std::exp(logth[k++]);
    if (mask.t2) p.t2_ns = std::exp(logth[k++]);
    if (mask.tr) p.tr_ns = std::exp(logth[k++]);
    if (mask.alpha_minus) {
        const double am = std::exp(logth[k++]);
        p.couplings = capacitance::GateCouplings::from_difference(
            am, base.couplings.alpha_plus());
    }
    return p;
}

} // namespace

std::vector<double> model_trace_normalized(const Trace& data,
                                           const capacitance::ModelParams& p) {
    capacitance::ModelParams mp = p;
    if (data.meta.omega.rad_per_ns > 0.0) mp.omega = data.meta.omega;
    std::vector<double> m(data.size(), std::numeric_limits<double>::quiet_NaN());
    double peak = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        if (!data.gaps.empty() && data.gaps[i]) continue;
        const Energy eps =
            sweep::eval_detuning(data.meta.axis, data.axis[i], mp, data.meta.branch);
        try {
            m[i] = capacitance::parametric_capacitance(eps, mp);
            peak = std::max(peak, std::abs(m[i]));
        } catch (const DomainError&) {
            // leave NaN; the residual skips it
        }
    }
    if (peak > 0.0)
        for (auto& y : m)
            if (std::isfinite(y)) y /= peak;
    return m;
}

FitResult fit_parameters(const std::vector<Trace>& measured, const FitMask& mask,
                         const FitOptions& opt) {
    if (measured.empty()) throw InvalidInput("fit_parameters: no traces supplied");
    if (mask.count() == 0) throw InvalidInput("fit_parameters: empty free-parameter mask");

    // Data traces are the normalized observable and are compared as
    // supplied: re-dividing a noisy trace by its own noisy maximum couples
    // the noise into the scale and biases the amplitude-sensitive
    // timescales by tens of percent.  Raw (unnormalized) traces are
    // brought to unit peak once, here.
    std::vector<Trace> data;
    data.reserve(measured.size());
    for (const auto& t : measured) {
        double peak = 0.0;
        for (size_t i = 0; i < t.size(); ++i)
            if ((t.gaps.empty() || !t.gaps[i]) && std::isfinite(t.values[i]))
                peak = std::max(peak, std::abs(t.values[i]));
        if (peak == 0.0)
            throw DomainError("fit_parameters: a data trace is all zeros or gaps");
        // within an order of magnitude of unit peak counts as already
        // normalized; raw capacitance traces live twenty orders away
        data.push_back(peak >= 0.1 && peak <= 10.0 ? t : normalize_trace(t));
    }

    FitResult res;
    long evals = 0;

    struct Bound {
        double lo, hi;
    };
    std::vector<Bound> bounds;
    if (mask.t1) bounds.push_back({opt.bounds.t1_min_ns, opt.bounds.t1_max_ns});
    if (mask.t2) bounds.push_back({opt.bounds.t2_min_ns, opt.bounds.t2_max_ns});
    if (mask.tr) bounds.push_back({opt.bounds.tr_min_ns, opt.bounds.tr_max_ns});
    if (mask.alpha_minus)
        bounds.push_back({opt.bounds.alpha_minus_min, opt.bounds.alpha_minus_max});
    const size_t nfree = bounds.size();

    long n_residuals = 0;
    for (const auto& t : data)
        for (size_t i = 0; i < t.size(); ++i)
            if (t.gaps.empty() || !t.gaps[i]) ++n_residuals;

    auto objective = [&](const std::vector<double>& logth) -> double {
        ++evals;
        for (size_t i = 0; i < nfree; ++i) {
            const double th = std::exp(logth[i]);
            if (th < bounds[i].lo || th > bounds[i].hi) {
                const double ex = std::max(std::log(bounds[i].lo) - logth[i],
                                           logth[i] - std::log(bounds[i].hi));
                return 1e100 * (1.0 + ex);
            }
        }
        const capacitance::ModelParams p = apply_free(opt.init, mask, logth);
        double ssr = 0.0;
        long used = 0;
        for (const auto& t : data) {
            const auto m = model_trace_normalized(t, p);
            for (size_t i = 0; i < t.size(); ++i) {
                if (!t.gaps.empty() && t.gaps[i]) continue;
                if (!std::isfinite(m[i])) continue;
                const double r = m[i] - t.values[i];
                ssr += r * r;
                ++used;
            }
        }
        // a parameter region where most of the model leaves its domain must
        // not masquerade as a good fit
        if (used < n_residuals / 2) return 1e90;
        return ssr;
    };

    // coarse multiplicative grid scan, init point included as a candidate
    std::vector<std::vector<double>> grids;
    for (const auto& b : bounds)
        grids.push_back(log_grid(b.lo, b.hi, opt.grid_points_per_decade));

    std::vector<double> init_log;
    {
        std::vector<double> v;
        if (mask.t1) v.push_back(std::log(opt.init.t1_ns));
        if (mask.t2) v.push_back(std::log(opt.init.t2_ns));
        if (mask.tr) v.push_back(std::log(opt.init.tr_ns));
        if (mask.alpha_minus) v.push_back(std::log(opt.init.couplings.alpha_minus()));
        init_log = v;
    }

    std::vector<double> best_x = init_log;
    double best_f = objective(init_log);

    std::vector<size_t> odo(nfree, 0);
    while (true) {
        std::vector<double> x(nfree);
        for (size_t i = 0; i < nfree; ++i) x[i] = grids[i][odo[i]];
        const double f = objective(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
        size_t d = 0;
        while (d < nfree && ++odo[d] == grids[d].size()) odo[d++] = 0;
        if (d == nfree) break;
    }

    // identifiability probe at the scan minimum
    for (size_t i = 0; i < nfree; ++i) {
        auto x = best_x;
        x[i] += 0.01;
        // threshold floor absorbs last-ulp noise from prefactor cancellation
        if (std::abs(objective(x) - best_f) <= 1e-12 * std::max(best_f, 1e-6)) {
            static const char* names[] = {"t1", "t2", "tr", "alpha_minus"};
            size_t k = 0, tag = 0;
            for (size_t b = 0; b < 4; ++b) {
                const bool on = (b == 0 && mask.t1) || (b == 1 && mask.t2) ||
                                (b == 2 && mask.tr) || (b == 3 && mask.alpha_minus);
                if (on) {
                    if (k == i) tag = b;
                    ++k;
                }
            }
            res.warnings.push_back(std::string("parameter ") + names[tag] +
                                   " has no detectable effect on the objective "
                                   "(identifiability)");
        }
    }

    // Simplex rounds with fresh geometry: a single Nelder-Mead run on this
    // objective tends to stagnate by directional collapse, so restart with
    // alternating simplex sizes until a round stops improving.
    NmOutcome best_nm{best_x, best_f, 0, false};
    int iterations = 0;
    const double steps[] = {0.35, 0.12, 0.04};
    for (int round = 0; round < 9; ++round) {
        auto nm = nelder_mead(objective, best_nm.x, steps[round % 3],
                              opt.max_iterations, opt.objective_tolerance);
        iterations += nm.iterations;
        const double gain = best_nm.f - nm.f;
        if (nm.f < best_nm.f) {
            best_nm = nm;
        } else {
            best_nm.converged = best_nm.converged || nm.converged;
        }
        if (round >= 2 && gain <= opt.objective_tolerance * std::abs(best_nm.f) + 1e-24)
            break;
    }

    res.params = apply_free(opt.init, mask, best_nm.x);
    res.residual_norm = best_nm.f;
    res.converged = best_nm.converged;
    res.iterations = iterations;

    // curvature-based uncertainties: cov = 2 f / (N - k) * H^{-1} in
    // log-parameter space, mapped back multiplicatively
    if (n_residuals > static_cast<long>(nfree) && res.residual_norm > 0.0) {
        const double h = 1e-3;
        std::vector<std::vector<double>> H(nfree, std::vector<double>(nfree, 0.0));
        const double f0 = objective(best_nm.x);
        for (size_t i = 0; i < nfree; ++i) {
            for (size_t j = i; j < nfree; ++j) {
                double v;
                if (i == j) {
                    auto xp = best_nm.x, xm = best_nm.x;
                    xp[i] += h;
                    xm[i] -= h;
                    v = (objective(xp) - 2.0 * f0 + objective(xm)) / (h * h);
                } else {
                    auto xpp = best_nm.x, xpm = best_nm.x, xmp = best_nm.x, xmm = best_nm.x;
                    xpp[i] += h; xpp[j] += h;
                    xpm[i] += h; xpm[j] -= h;
                    xmp[i] -= h; xmp[j] += h;
                    xmm[i] -= h; xmm[j] -= h;
                    v = (objective(xpp) - objective(xpm) - objective(xmp) +
                         objective(xmm)) / (4.0 * h * h);
                }
                H[i][j] = H[j][i] = v;
            }
        }
        if (invert_small(H)) {
            const double s2 = 2.0 * res.residual_norm /
                              static_cast<double>(n_residuals - static_cast<long>(nfree));
            std::vector<double> sig(nfree, 0.0);
            for (size_t i = 0; i < nfree; ++i) {
                const double c = s2 * H[i][i];
                sig[i] = c > 0.0 ? std::sqrt(c) : 0.0;
            }
            size_t k = 0;
            if (mask.t1) res.sigma_t1_ns = res.params.t1_ns * sig[k++];
            if (mask.t2) res.sigma_t2_ns = res.params.t2_ns * sig[k++];
            if (mask.tr) res.sigma_tr_ns = res.params.tr_ns * sig[k++];
            if (mask.alpha_minus)
                res.sigma_alpha_minus = res.params.couplings.alpha_minus() * sig[k++];
        } else {
            res.warnings.push_back("curvature matrix singular; uncertainties omitted");
        }
    }

    res.objective_evaluations = evals;
    return res;
}

} // namespace qicap::analysis

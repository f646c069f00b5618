#include "qicap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qicap/errors.hpp"

namespace qicap::io {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& raw, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw IoError(what + ": cannot parse number '" + raw + "'");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(bool cond, const std::string& key, const std::string& bound) {
    if (!cond) throw IoError("config: " + key + " violates " + bound);
}

} // namespace

Config default_config() { return Config{}; }

Config parse_config(std::istream& in, const std::string& source_name) {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(source_name + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw IoError(source_name + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
        if (kv.count(key))
            throw IoError(source_name + ":" + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
        kv[key] = {val, lineno};
    }

    static const std::map<std::string, int> known = {
        {"delta_uev", 0},   {"alpha1", 0},        {"alpha2", 0},
        {"alpha_minus", 0}, {"alpha_plus", 0},    {"eps_hat_mev", 0},
        {"vtg0_v", 0},      {"cg1_ff", 0},        {"cg2_ff", 0},
        {"cm_ff", 0},       {"cd_ff", 0},         {"q_factor", 0},
        {"cp_ff", 0},       {"a_mev", 0},         {"freq_ghz", 0},
        {"branch", 0},      {"t1_ns", 0},         {"t2_ps", 0},
        {"tr_ps", 0},       {"sweep_axis", 0},    {"sweep_start", 0},
        {"sweep_stop", 0},  {"sweep_points", 0},  {"fit_mask", 0},
        {"seed", 0},        {"t1_min_ns", 0},     {"t1_max_ns", 0},
        {"t2_min_ps", 0},   {"t2_max_ps", 0},     {"tr_min_ps", 0},
        {"tr_max_ps", 0},   {"alpha_minus_min", 0}, {"alpha_minus_max", 0},
    };
    for (const auto& [key, vp] : kv)
        if (!known.count(key))
            throw IoError(source_name + ":" + std::to_string(vp.second) +
                          ": unknown key '" + key + "'");

    Config c;
    auto has = [&](const char* k) { return kv.count(k) != 0; };
    auto num = [&](const char* k) { return parse_double(kv.at(k).first, std::string("config key ") + k); };
    auto str = [&](const char* k) { return kv.at(k).first; };

    // device
    if (has("delta_uev")) c.model.delta = Energy{num("delta_uev")};
    require(c.model.delta.uev >= 0.0, "delta_uev", "delta_uev >= 0");

    double a_mev = has("a_mev") ? num("a_mev") : 1.35;
    require(a_mev > 0.0, "a_mev", "a_mev > 0");
    c.model.amplitude = Energy{a_mev * 1000.0};
    c.model.eps_hat = has("eps_hat_mev") ? Energy{num("eps_hat_mev") * 1000.0}
                                         : c.model.amplitude;
    require(std::abs(c.model.eps_hat.uev) <= c.model.amplitude.uev, "eps_hat_mev",
            "|eps_hat| <= A (drive must reach the crossing)");

    if (has("alpha_minus") || has("alpha_plus")) {
        const double am = has("alpha_minus") ? num("alpha_minus") : 0.06;
        const double ap = has("alpha_plus") ? num("alpha_plus") : 0.46;
        require(am > 0.0 && am < 1.0, "alpha_minus", "alpha_minus in (0, 1)");
        require(ap > am && ap < 1.0, "alpha_plus", "alpha_plus in (alpha_minus, 1)");
        c.model.couplings = capacitance::GateCouplings::from_difference(am, ap);
    } else {
        if (has("alpha1")) c.model.couplings.alpha1 = num("alpha1");
        if (has("alpha2")) c.model.couplings.alpha2 = num("alpha2");
        require(c.model.couplings.alpha1 > 0.0 && c.model.couplings.alpha1 < 1.0,
                "alpha1", "alpha1 in (0, 1)");
        require(c.model.couplings.alpha2 > 0.0 && c.model.couplings.alpha2 < 1.0,
                "alpha2", "alpha2 in (0, 1)");
    }

    if (has("vtg0_v")) c.model.vtg0 = Voltage{num("vtg0_v")};
    if (has("cg1_ff")) c.model.circuit.c_g1_f = num("cg1_ff") * 1e-15;
    if (has("cg2_ff")) c.model.circuit.c_g2_f = num("cg2_ff") * 1e-15;
    if (has("cm_ff")) c.model.circuit.c_m_f = num("cm_ff") * 1e-15;
    if (has("cd_ff")) c.model.circuit.c_d_f = num("cd_ff") * 1e-15;
    if (has("q_factor")) c.model.circuit.q_factor = num("q_factor");
    if (has("cp_ff")) c.model.circuit.c_p_f = num("cp_ff") * 1e-15;
    require(c.model.circuit.c_g1_f > 0 && c.model.circuit.c_g2_f > 0 &&
                c.model.circuit.c_m_f > 0 && c.model.circuit.c_d_f > 0 &&
                c.model.circuit.c_p_f > 0,
            "c*_ff", "capacitances > 0");
    require(c.model.circuit.q_factor > 0, "q_factor", "q_factor > 0");

    // timescales
    if (has("t1_ns")) c.model.t1_ns = num("t1_ns");
    if (has("t2_ps")) c.model.t2_ns = num("t2_ps") * 1e-3;
    if (has("tr_ps")) c.model.tr_ns = num("tr_ps") * 1e-3;
    require(c.model.t1_ns > 0.0, "t1_ns", "t1_ns > 0");
    require(c.model.t2_ns > 0.0, "t2_ps", "t2_ps > 0");
    require(c.model.tr_ns > 0.0, "tr_ps", "tr_ps > 0");

    // drive frequency list
    if (has("freq_ghz")) {
        c.sweep.frequencies.clear();
        std::stringstream ss(str("freq_ghz"));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const double f = parse_double(trim(tok), "config key freq_ghz");
            require(f > 0.0, "freq_ghz", "frequencies > 0");
            c.sweep.frequencies.push_back(units::omega_from_ghz(f));
        }
        require(!c.sweep.frequencies.empty(), "freq_ghz", "non-empty list");
    }
    c.model.omega = c.sweep.frequencies.front();
    if (has("branch")) {
        try {
            c.sweep.branch = branch_from_string(str("branch"));
        } catch (const InvalidInput& e) {
            throw IoError("config: " + std::string(e.what()));
        }
    }

    // sweep grid
    if (has("sweep_axis")) {
        try {
            c.sweep.axis = axis_from_string(str("sweep_axis"));
        } catch (const InvalidInput& e) {
            throw IoError("config: " + std::string(e.what()));
        }
    }
    if (has("sweep_start")) c.sweep.start = num("sweep_start");
    if (has("sweep_stop")) c.sweep.stop = num("sweep_stop");
    if (has("sweep_points")) c.sweep.n_points = static_cast<int>(num("sweep_points"));
    require(c.sweep.n_points >= 2, "sweep_points", "sweep_points >= 2");
    require(c.sweep.start < c.sweep.stop, "sweep_start", "sweep_start < sweep_stop");

    // fit
    if (has("fit_mask")) {
        analysis::FitMask m{false, false, false, false};
        std::stringstream ss(str("fit_mask"));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok == "t1") m.t1 = true;
            else if (tok == "t2") m.t2 = true;
            else if (tok == "tr") m.tr = true;
            else if (tok == "alpha_minus") m.alpha_minus = true;
            else throw IoError("config: fit_mask entry '" + tok +
                               "' (expected t1, t2, tr, alpha_minus)");
        }
        c.fit.mask = m;
    }
    if (has("seed")) c.fit.seed = static_cast<std::uint64_t>(num("seed"));
    if (has("t1_min_ns")) c.fit.bounds.t1_min_ns = num("t1_min_ns");
    if (has("t1_max_ns")) c.fit.bounds.t1_max_ns = num("t1_max_ns");
    if (has("t2_min_ps")) c.fit.bounds.t2_min_ns = num("t2_min_ps") * 1e-3;
    if (has("t2_max_ps")) c.fit.bounds.t2_max_ns = num("t2_max_ps") * 1e-3;
    if (has("tr_min_ps")) c.fit.bounds.tr_min_ns = num("tr_min_ps") * 1e-3;
    if (has("tr_max_ps")) c.fit.bounds.tr_max_ns = num("tr_max_ps") * 1e-3;
    if (has("alpha_minus_min")) c.fit.bounds.alpha_minus_min = num("alpha_minus_min");
    if (has("alpha_minus_max")) c.fit.bounds.alpha_minus_max = num("alpha_minus_max");
    require(c.fit.bounds.t1_min_ns > 0 && c.fit.bounds.t1_min_ns < c.fit.bounds.t1_max_ns,
            "t1_min_ns", "0 < t1_min_ns < t1_max_ns");
    require(c.fit.bounds.t2_min_ns > 0 && c.fit.bounds.t2_min_ns < c.fit.bounds.t2_max_ns,
            "t2_min_ps", "0 < t2_min_ps < t2_max_ps");
    require(c.fit.bounds.tr_min_ns > 0 && c.fit.bounds.tr_min_ns < c.fit.bounds.tr_max_ns,
            "tr_min_ps", "0 < tr_min_ps < tr_max_ps");

    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

// ---------------------------------------------------------------------------
// Trace CSV
// ---------------------------------------------------------------------------

namespace {
const char* kTraceHeader = "axis_name,axis_value,c_pm_farads,c_pm_norm,omega_ghz,branch,gap_flag";
}

void write_trace_csv(const std::vector<Trace>& traces, std::ostream& out) {
    out << kTraceHeader << "\n";
    for (const auto& t : traces) {
        double peak = 0.0;
        for (size_t i = 0; i < t.size(); ++i)
            if ((t.gaps.empty() || !t.gaps[i]) && std::isfinite(t.values[i]))
                peak = std::max(peak, std::abs(t.values[i]));
        const std::string axis_name = to_string(t.meta.axis);
        const std::string branch = to_string(t.meta.branch);
        const std::string omega = fmt(units::ghz_from_omega(t.meta.omega));
        for (size_t i = 0; i < t.size(); ++i) {
            const bool gap = !t.gaps.empty() && t.gaps[i];
            out << axis_name << ',' << fmt(t.axis[i]) << ',';
            if (gap) {
                out << "nan,nan,";
            } else {
                out << fmt(t.values[i]) << ','
                    << fmt(peak > 0.0 ? t.values[i] / peak : 0.0) << ',';
            }
            out << omega << ',' << branch << ',' << (gap ? 1 : 0) << "\n";
        }
    }
}

void write_trace_csv(const std::vector<Trace>& traces, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_trace_csv(traces, out);
}

std::vector<Trace> read_trace_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line))
        throw IoError(source_name + ": empty file");
    if (trim(line) != kTraceHeader)
        throw IoError(source_name + ": unexpected header (want '" +
                      std::string(kTraceHeader) + "')");

    std::vector<Trace> traces;
    Trace cur;
    double cur_omega_ghz = 0.0;
    auto flush = [&]() {
        if (cur.size() > 0) traces.push_back(std::move(cur));
        cur = Trace{};
    };

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 7)
            throw IoError(source_name + ": row " + std::to_string(row) +
                          ": expected 7 columns, got " + std::to_string(f.size()));
        const std::string where = source_name + ": row " + std::to_string(row);
        const SweepAxis axis = axis_from_string(f[0]);
        const double x = parse_double(f[1], where + " axis_value");
        const bool gap = trim(f[6]) == "1";
        const double v = gap ? std::nan("") : parse_double(f[2], where + " c_pm_farads");
        const double omega_ghz = parse_double(f[4], where + " omega_ghz");
        const Branch branch = branch_from_string(trim(f[5]));

        const bool same_id = cur.size() > 0 && cur.meta.axis == axis &&
                             cur.meta.branch == branch && cur_omega_ghz == omega_ghz;
        if (same_id && x <= cur.axis.back())
            throw IoError(where + ": axis not strictly increasing");
        if (!same_id && cur.size() > 0) flush();
        if (cur.size() == 0) {
            cur.meta = TraceMeta{units::omega_from_ghz(omega_ghz), branch, axis, {}, false};
            cur_omega_ghz = omega_ghz;
        }
        cur.axis.push_back(x);
        cur.values.push_back(v);
        cur.gaps.push_back(gap);
    }
    flush();
    if (traces.empty())
        throw IoError(source_name + ": no data rows");
    return traces;
}

std::vector<Trace> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file '" + path + "'");
    return read_trace_csv(in, path);
}

// ---------------------------------------------------------------------------
// Measured CSV
// ---------------------------------------------------------------------------

std::vector<Trace> read_measured_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) throw IoError(source_name + ": empty file");
    line = trim(line);
    bool has_omega = false;
    if (line == "v_tg_volts,phase_norm") {
        has_omega = false;
    } else if (line == "v_tg_volts,phase_norm,omega_ghz") {
        has_omega = true;
    } else {
        throw IoError(source_name + ": unexpected header '" + line + "'");
    }

    struct Row {
        double v, p, w;
    };
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        const std::string where = source_name + ": row " + std::to_string(lineno);
        if (f.size() != (has_omega ? 3u : 2u))
            throw IoError(where + ": wrong column count");
        Row r{};
        r.v = parse_double(f[0], where + " v_tg_volts");
        r.p = parse_double(f[1], where + " phase_norm");
        r.w = has_omega ? parse_double(f[2], where + " omega_ghz") : 0.0;
        if (std::abs(r.p) > 1.5)
            throw IoError(where + ": phase_norm outside the [-1.5, 1.5] sanity band");
        rows.push_back(r);
    }
    if (rows.empty()) throw IoError(source_name + ": no data rows");

    std::vector<Trace> traces;
    size_t start = 0;
    for (size_t i = 1; i <= rows.size(); ++i) {
        if (i < rows.size() && rows[i].w == rows[start].w) continue;
        std::vector<Row> grp(rows.begin() + start, rows.begin() + i);
        bool increasing = true, decreasing = true;
        for (size_t k = 1; k < grp.size(); ++k) {
            if (grp[k].v <= grp[k - 1].v) increasing = false;
            if (grp[k].v >= grp[k - 1].v) decreasing = false;
        }
        if (!increasing && !decreasing)
            throw IoError(source_name + ": v_tg not strictly monotone in the " +
                          fmt(grp.front().w) + " GHz group");
        if (decreasing) std::reverse(grp.begin(), grp.end());
        Trace t;
        // files without an omega column leave the frequency unset (0); the
        // consumer falls back to its configured drive frequency
        t.meta = TraceMeta{units::omega_from_ghz(grp.front().w),
                           Branch::dot01_11, SweepAxis::gate_voltage, {}, false};
        for (const auto& r : grp) {
            t.axis.push_back(r.v);
            t.values.push_back(r.p);
            t.gaps.push_back(false);
        }
        traces.push_back(std::move(t));
        start = i;
    }
    return traces;
}

std::vector<Trace> read_measured_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measured file '" + path + "'");
    return read_measured_csv(in, path);
}

} // namespace qicap::io

#ifndef QICAP_IO_HPP
#define QICAP_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qicap/analysis.hpp"
#include "qicap/sweep.hpp"
#include "qicap/trace.hpp"

// Config parsing, measured-data ingestion and trace serialization.
// Formats are the repository's public data contract:
//
//  * Config: flat `key = value` lines, '#' comments, unit-suffixed key names
//    (t1_ns, a_mev, ...).  Unknown keys are rejected; omitted keys fall back
//    to the documented defaults.  Decimal point only, no locale handling.
//
//  * Trace CSV columns:
//      axis_name,axis_value,c_pm_farads,c_pm_norm,omega_ghz,branch,gap_flag
//    Values are printed with 17 significant digits, so write-then-read is
//    value-identical.  Consecutive rows with the same (omega_ghz, branch)
//    and increasing axis form one trace.
//
//  * Measured CSV columns: v_tg_volts,phase_norm[,omega_ghz].

namespace qicap::io {

struct FitConfig {
    analysis::FitMask mask{};
    analysis::FitBounds bounds{};
    std::uint64_t seed = 0;
};

struct Config {
    capacitance::ModelParams model{};
    sweep::SweepSpec sweep{};
    FitConfig fit{};
};

/// Reference-device defaults: t1 = 50 ns, t2 = 35 ps, tr = 30 ps, alpha- = 0.06,
/// A = eps_hat = 1.35 meV, V_TG0 = 0.475 V, omega/2pi = 11 GHz.
Config default_config();

Config load_config(const std::string& path);
Config parse_config(std::istream& in, const std::string& source_name);

void write_trace_csv(const std::vector<Trace>& traces, const std::string& path);
void write_trace_csv(const std::vector<Trace>& traces, std::ostream& out);

std::vector<Trace> read_trace_csv(const std::string& path);
std::vector<Trace> read_trace_csv(std::istream& in, const std::string& source_name);

/// Measured-data ingestion; one Trace per omega_ghz group (gate-voltage axis,
/// normalized phase values).  Decreasing voltage sweeps are reversed so the
/// axis increases.
std::vector<Trace> read_measured_csv(const std::string& path);
std::vector<Trace> read_measured_csv(std::istream& in, const std::string& source_name);

} // namespace qicap::io

#endif

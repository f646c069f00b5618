#ifndef QICAP_TRACE_HPP
#define QICAP_TRACE_HPP

#include <string>
#include <vector>

#include "qicap/capacitance.hpp"

namespace qicap {

/// Which reservoir-exchange cycle the drive addresses.  The (00)-(10)
/// branch is the (01)-(11) cycle reflected about eps = 0.
enum class Branch { dot01_11, dot00_10 };

std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

enum class SweepAxis { detuning_reduced, detuning_absolute, gate_voltage };

std::string to_string(SweepAxis a);
SweepAxis axis_from_string(const std::string& s);

struct TraceMeta {
    AngularFrequency omega{kTwoPi * 11.0};
    Branch branch = Branch::dot01_11;
    SweepAxis axis = SweepAxis::detuning_reduced;
    capacitance::ModelParams params{};  // exact snapshot used to simulate
    bool has_params = true;             // false for ingested measured data
};

/// Ordered samples of (axis value -> capacitance or normalized signal).
/// Points where the model domain fails carry a gap flag and a NaN value.
struct Trace {
    std::vector<double> axis;    // strictly increasing
    std::vector<double> values;
    std::vector<bool> gaps;      // same length; true marks a domain gap
    TraceMeta meta{};

    size_t size() const { return axis.size(); }
};

/// Divide by max |value| over the trace (gaps ignored); idempotent,
/// sign-preserving.  Throws DomainError on an all-zero or all-gap trace.
Trace normalize_trace(const Trace& t);

} // namespace qicap

#endif

#ifndef QICAP_VERIFY_HPP
#define QICAP_VERIFY_HPP

#include <string>
#include <vector>

// The full invariant suite behind the CLI `verify` subcommand: special-
// function identities, the Airy-vs-Bessel rate comparison, ODE-vs-stationary
// agreement and the finite-difference derivative checks, each with its
// tolerance and the measured deviation.

namespace qicap::verify {

struct CheckResult {
    std::string name;
    double measured = 0.0;   // worst deviation found
    double tolerance = 0.0;
    bool pass = false;
    std::string note;        // human context: grid, parameters, caveats
};

struct VerifyOptions {
    // Test-harness fault injection: offsets the Airy value inside the
    // ODE-consistency check so the reporting path can be exercised.
    double airy_perturbation = 0.0;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opt = {});

} // namespace qicap::verify

#endif

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hashalloc {

// One simulation-versus-closed-form consistency check.
struct CheckResult {
    std::string name;
    double analytic;
    double simulated;
    double std_error;
    double z;  // |analytic - simulated| / std_error
    bool pass;
};

enum class ValidationLevel { quick, full };  // ~1e4 vs ~1e5 paths per check

// Runs the Monte Carlo validation suite: ruin probabilities, wealth moments
// and barrier-dividend values against their closed forms, on the reference
// solo miner and a handful of seeded random models. A check passes when the
// z-score stays within z_tolerance standard errors.
std::vector<CheckResult> run_validation(ValidationLevel level, std::uint64_t seed,
                                        double z_tolerance = 3.0);

}  // namespace hashalloc

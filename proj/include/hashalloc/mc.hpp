#pragma once

#include <cstdint>

#include "hashalloc/model.hpp"

namespace hashalloc {

// Monte Carlo run settings. With antithetic on, paths are simulated in
// mirrored pairs (n_paths is rounded down to an even count) and standard
// errors are taken over pair means.
struct SimConfig {
    SimConfig(std::int64_t n_paths, double horizon, std::uint64_t seed, bool antithetic = false);

    std::int64_t n_paths;
    double horizon;
    std::uint64_t seed;
    bool antithetic;
};

struct McEstimate {
    double mean;
    double std_error;
};

struct MomentsEstimate {
    double mean;
    double variance;
    double mean_std_error;
    double variance_std_error;
};

// Horizon with discount-factor truncation e^{-q H} < 1e-8.
double default_dividend_horizon(double q);

// Horizon 50/phi(0), capped at 1e6 time units.
double default_ruin_horizon(double phi0);

// Expected discounted dividends under a barrier at a, starting from x.
// Simulation is exact: exponential inter-jump times, piecewise-linear drift,
// ruin located analytically between jumps, overshoots above the barrier paid
// (and discounted) at jump epochs, plus the initial lump max(0, x-a).
McEstimate simulate_dividends(const CompoundPoissonModel& model, double x, double a, double q,
                              const SimConfig& config);

// Fraction of paths ruined before the horizon.
McEstimate simulate_ruin(const CompoundPoissonModel& model, double x, const SimConfig& config);

// Sample mean and variance of the unreflected wealth X_t.
MomentsEstimate simulate_moments(const CompoundPoissonModel& model, double x, double t,
                                 const SimConfig& config);

}  // namespace hashalloc

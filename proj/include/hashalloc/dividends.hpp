#pragma once

#include <cstdint>
#include <vector>

#include "hashalloc/model.hpp"
#include "hashalloc/scale.hpp"

namespace hashalloc {

// Outcome of a barrier-dividend valuation: the barrier level, the expected
// discounted dividends from the given initial wealth, and diagnostics.
struct ValueReport {
    Allocation allocation = Allocation({1.0});
    double barrier = 0.0;
    double value = 0.0;
    double phi_q = 0.0;
    double psi_prime0 = 0.0;
    std::vector<int> active_pools;
};

struct OptimizeOptions {
    int k_max = 4;           // largest pool subset the search will open up
    double rel_tol = 1e-6;   // stop growing subsets below this relative gain
    double pair_tol = 1e-6;  // golden-section tolerance on the pair weight
    int pso_particles = 40;
    int pso_iterations = 200;
    double pso_inertia = 0.72;
    double pso_cognitive = 1.49;
    double pso_social = 1.49;
    std::uint64_t seed = 1;
    int depth_cap = ScaleEvaluator::kCertifiedDepth;
};

// kappa(y) = Zbar(y) - Z(y)/phi(q) + psi'(0)/q, extended by
// kappa(y) = y - 1/phi(q) + psi'(0)/q for y <= 0. Requires q > 0.
double kappa(const ScaleEvaluator& evaluator, double y);

// Expected discounted dividends under a barrier at a, starting from x:
//   V(x; a) = -kappa(a-x) + Z(a-x)/Z(a) * kappa(a),  0 <= x <= a,
// with the lump extension V(x; a) = (x - a) + V(a; a) for x > a.
double value_function(const ScaleEvaluator& evaluator, double x, double a);

// Barrier maximizing V: the root of Zbar(a) = -psi'(0)/q, or 0 when the
// target is nonpositive (break-even or unprofitable model).
double optimal_barrier(const ScaleEvaluator& evaluator);

// value_function at the optimal barrier, packaged with diagnostics.
ValueReport optimal_value(const ScaleEvaluator& evaluator, double x);

// Bottom-up search for the hashpower split maximizing the expected discounted
// dividends: all single pools, then golden-section over every pair, then
// particle-swarm refinement on growing subsets seeded by the best smaller
// one. Deterministic for a fixed seed. Pools must include solo at index 0.
ValueReport optimize_allocation(const MinerProfile& miner,
                                const std::vector<PoolTerms>& pools,
                                double q,
                                const OptimizeOptions& options = {});

}  // namespace hashalloc

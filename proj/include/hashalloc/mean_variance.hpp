#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hashalloc/model.hpp"

namespace hashalloc {

// E[X_t] = x - c t + t * mu * E[B].
double expected_wealth(const CompoundPoissonModel& model, double x, double t);

// Var[X_t] = t * mu * E[B^2].
double wealth_variance(const CompoundPoissonModel& model, double t);

// Index maximizing lambda_k (b_k - gamma b_k^2); ties go to the lowest index.
// Independent of any time horizon.
std::size_t mv_best_pool(const std::vector<PoolTerms>& pools, double gamma);

// E[X_T] - gamma Var[X_T].
double mv_objective(const CompoundPoissonModel& model, double x, double T, double gamma);

// One point of the mean-variance efficient frontier. The allocation mixes at
// most two pools; segment holds their indices (equal at a vertex).
struct FrontierPoint {
    double variance_rate;
    double expected_rate;
    Allocation allocation;
    std::pair<std::size_t, std::size_t> segment;
};

// Maximal expected reward rate subject to the variance rate equalling sigma2.
// Pools must be sorted with lambda_k b_k and lambda_k b_k^2 both
// non-increasing; sigma2 must lie between the smallest and largest per-pool
// variance rates. The solution sits on the upper concave envelope of the
// per-pool (variance, mean) points, hence mixes at most two pools.
FrontierPoint efficient_frontier_point(const std::vector<PoolTerms>& pools, double sigma2);

// Frontier sampled on an even sigma2 grid across the feasible interval.
std::vector<FrontierPoint> frontier_curve(const std::vector<PoolTerms>& pools, int n_points);

// CSV columns: sigma2,expected_rate,pool_i,pool_j,w_i,w_j
void write_frontier_csv(std::ostream& out, const std::vector<FrontierPoint>& curve);

}  // namespace hashalloc

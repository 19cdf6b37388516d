#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hashalloc/model.hpp"
#include "hashalloc/rng.hpp"

namespace hashalloc {

// Population-level study settings: a network hashrate split over m miners
// choosing between solo mining and n pools with sampled fees.
struct NetworkConfig {
    int n_miners = 25;
    int n_pools = 10;
    double total_block_rate = 6.0;
    double block_reward = 3.125;
    std::pair<double, double> profit_margin_range{0.04, 0.1};
    std::pair<double, double> ruin_beta_params{1.5, 1.5};
    std::pair<double, double> gamma_range{0.0, 1.0};
    std::pair<double, double> fee_range{0.0, 0.04};
    double avg_margin = 0.17;
    double q = 0.1;
    std::uint64_t seed = 1;
    int k_max = 3;

    void validate() const;
};

NetworkConfig network_config_from_json(const nlohmann::json& j);
nlohmann::json network_config_to_json(const NetworkConfig& config);

enum class Criterion { mv_utility, mv_frontier, dividends };

const char* criterion_name(Criterion c);

struct CriterionResult {
    std::vector<double> pool_shares;  // index 0 = solo, then pools 1..n
    double hhi = 0.0;
    int nakamoto = 0;
    std::vector<std::vector<double>> miner_weights;  // per miner, per pool
};

struct NetworkReport {
    NetworkConfig config;
    std::vector<double> fees;    // pools 1..n
    std::vector<double> deltas;  // calibrated difficulty reductions, pools 1..n
    double calibration_target = 0.0;
    // Per-miner frontier variance level is not pinned down by the allocation
    // criteria themselves; this names the rule used (beta-scaled solo
    // variance, clamped to the feasible interval).
    std::string frontier_sigma2_rule = "beta_scaled_solo_variance";
    std::map<std::string, CriterionResult> criteria;
};

nlohmann::json network_report_to_json(const NetworkReport& report);

// CSV columns: criterion,pool_id,share
void write_shares_csv(std::ostream& out, const NetworkReport& report);

// m miners with Dirichlet(1,...,1)-split hashrate, cost c_l = lambda_l b /
// (1 + eta_l), initial wealth matching a Beta-sampled solo ruin probability,
// and a uniform risk-aversion parameter.
std::vector<MinerProfile> sample_miners(const NetworkConfig& config, PathRng& rng);

// For each fee, the difficulty reduction making the average miner's
// single-pool value equal her solo value (so a zero-fee pool calibrates to
// delta = 1). Errors if no delta in (0, 1] attains the target.
std::vector<double> calibrate_difficulties(const std::vector<double>& fees,
                                           const NetworkConfig& config);

// Allocates every miner under one criterion and aggregates hashpower shares,
// HHI and the Nakamoto coefficient.
CriterionResult allocate_all(const std::vector<MinerProfile>& miners,
                             const std::vector<PoolOffer>& offers,
                             Criterion criterion,
                             const NetworkConfig& config);

// sample_miners -> calibrate_difficulties -> allocate_all for all criteria.
NetworkReport run_study(const NetworkConfig& config);

}  // namespace hashalloc

#include "hashalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hashalloc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

MinerProfile::MinerProfile(double block_rate_, double cost_rate_, double initial_wealth_,
                           std::optional<double> risk_aversion_,
                           std::optional<double> target_ruin_prob_)
    : block_rate(block_rate_),
      cost_rate(cost_rate_),
      initial_wealth(initial_wealth_),
      risk_aversion(risk_aversion_),
      target_ruin_prob(target_ruin_prob_) {
    require(std::isfinite(block_rate) && block_rate > 0.0, "MinerProfile: block_rate must be > 0");
    require(std::isfinite(cost_rate) && cost_rate > 0.0, "MinerProfile: cost_rate must be > 0");
    require(std::isfinite(initial_wealth) && initial_wealth >= 0.0,
            "MinerProfile: initial_wealth must be >= 0");
    if (risk_aversion) {
        require(std::isfinite(*risk_aversion) && *risk_aversion >= 0.0,
                "MinerProfile: risk_aversion must be >= 0");
    }
    if (target_ruin_prob) {
        require(*target_ruin_prob > 0.0 && *target_ruin_prob < 1.0,
                "MinerProfile: target_ruin_prob must lie in (0, 1)");
    }
}

PoolOffer::PoolOffer(double fee_, double difficulty_reduction_)
    : fee(fee_), difficulty_reduction(difficulty_reduction_) {
    require(std::isfinite(fee) && fee >= 0.0 && fee < 1.0, "PoolOffer: fee must lie in [0, 1)");
    require(std::isfinite(difficulty_reduction) && difficulty_reduction > 0.0 &&
                difficulty_reduction <= 1.0,
            "PoolOffer: difficulty_reduction must lie in (0, 1]");
}

PoolTerms::PoolTerms(double share_rate_, double share_reward_)
    : share_rate(share_rate_), share_reward(share_reward_) {
    require(std::isfinite(share_rate) && share_rate > 0.0, "PoolTerms: share_rate must be > 0");
    require(std::isfinite(share_reward) && share_reward > 0.0,
            "PoolTerms: share_reward must be > 0");
}

PoolTerms pool_terms(const PoolOffer& offer, double miner_block_rate, double block_reward) {
    require(miner_block_rate > 0.0, "pool_terms: miner_block_rate must be > 0");
    require(block_reward > 0.0, "pool_terms: block_reward must be > 0");
    return PoolTerms(miner_block_rate / offer.difficulty_reduction,
                     offer.difficulty_reduction * block_reward * (1.0 - offer.fee));
}

void validate_pool_ordering(const std::vector<PoolTerms>& pools) {
    for (std::size_t k = 1; k < pools.size(); ++k) {
        const auto& prev = pools[k - 1];
        const auto& cur = pools[k];
        const bool duplicate =
            prev.share_rate == cur.share_rate && prev.share_reward == cur.share_reward;
        const bool ordered = prev.share_rate < cur.share_rate && prev.share_reward > cur.share_reward;
        if (!ordered && !duplicate) {
            throw std::invalid_argument(
                "pool list must be sorted with share rates strictly ascending and share "
                "rewards strictly descending (offending index " + std::to_string(k) + ")");
        }
    }
}

Allocation::Allocation(std::vector<double> weights) : weights_(std::move(weights)) {
    require(!weights_.empty(), "Allocation: weight vector must be nonempty");
    double sum = 0.0;
    for (double w : weights_) {
        require(std::isfinite(w) && w >= 0.0, "Allocation: weights must be nonnegative");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-12 * std::max<double>(1.0, weights_.size()),
            "Allocation: weights must sum to 1 within 1e-12");
    for (double& w : weights_) w /= sum;
}

Allocation Allocation::normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, "Allocation: weights must be nonnegative");
        sum += w;
    }
    require(sum > 0.0, "Allocation: at least one weight must be positive");
    for (double& w : weights) w /= sum;
    return Allocation(std::move(weights), normalized_tag{});
}

Allocation::Allocation(std::vector<double> weights, normalized_tag) : weights_(std::move(weights)) {}

CompoundPoissonModel::CompoundPoissonModel(double drift, double total_intensity,
                                           std::vector<Atom> atoms)
    : drift_(drift), total_intensity_(total_intensity) {
    require(std::isfinite(drift_) && drift_ > 0.0, "CompoundPoissonModel: drift must be > 0");
    require(std::isfinite(total_intensity_) && total_intensity_ > 0.0,
            "CompoundPoissonModel: total_intensity must be > 0");
    require(!atoms.empty(), "CompoundPoissonModel: at least one atom required");

    double total_p = 0.0;
    for (const auto& a : atoms) {
        require(std::isfinite(a.probability) && a.probability >= 0.0,
                "CompoundPoissonModel: atom probabilities must be >= 0");
        require(std::isfinite(a.jump_size) && a.jump_size > 0.0,
                "CompoundPoissonModel: jump sizes must be > 0");
        total_p += a.probability;
    }
    require(std::abs(total_p - 1.0) <= 1e-12 * std::max<double>(1.0, atoms.size()),
            "CompoundPoissonModel: atom probabilities must sum to 1 within 1e-12");

    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.jump_size < b.jump_size; });
    // Drop dead atoms, merge duplicates.
    for (const auto& a : atoms) {
        if (a.probability == 0.0) continue;
        if (!atoms_.empty() && atoms_.back().jump_size == a.jump_size) {
            atoms_.back().probability += a.probability;
        } else {
            atoms_.push_back(a);
        }
    }
    require(!atoms_.empty(), "CompoundPoissonModel: all atoms have zero probability");
    for (auto& a : atoms_) a.probability /= total_p;

    min_jump_ = atoms_.front().jump_size;
    mean_jump_ = 0.0;
    for (const auto& a : atoms_) mean_jump_ += a.probability * a.jump_size;
}

CompoundPoissonModel build_model(const MinerProfile& miner, const std::vector<PoolTerms>& pools,
                                 const Allocation& allocation) {
    require(pools.size() == allocation.size(),
            "build_model: pools and allocation must have the same length");
    double mu = 0.0;
    for (std::size_t k = 0; k < pools.size(); ++k) {
        mu += pools[k].share_rate * allocation[k];
    }
    require(mu > 0.0, "build_model: at least one pool weight must be positive");

    std::vector<CompoundPoissonModel::Atom> atoms;
    atoms.reserve(pools.size());
    for (std::size_t k = 0; k < pools.size(); ++k) {
        if (allocation[k] > 0.0) {
            atoms.push_back({pools[k].share_rate * allocation[k] / mu, pools[k].share_reward});
        }
    }
    return CompoundPoissonModel(miner.cost_rate, mu, std::move(atoms));
}

}  // namespace hashalloc

#pragma once

#include <optional>
#include <vector>

namespace hashalloc {

// A miner's operating characteristics. block_rate is the rate at which the
// miner finds blocks when mining alone; cost_rate is the operational burn.
struct MinerProfile {
    MinerProfile(double block_rate, double cost_rate, double initial_wealth,
                 std::optional<double> risk_aversion = std::nullopt,
                 std::optional<double> target_ruin_prob = std::nullopt);

    double block_rate;
    double cost_rate;
    double initial_wealth;
    std::optional<double> risk_aversion;
    std::optional<double> target_ruin_prob;
};

// A pool's posted contract: management fee and the factor by which the share
// difficulty sits below block difficulty. Solo mining is (fee=0, delta=1).
struct PoolOffer {
    PoolOffer(double fee, double difficulty_reduction);

    double fee;
    double difficulty_reduction;

    static PoolOffer solo() { return PoolOffer(0.0, 1.0); }
};

// The (share rate, share reward) pair a contract induces for a given miner.
struct PoolTerms {
    PoolTerms(double share_rate, double share_reward);

    double share_rate;
    double share_reward;
};

// Share rate lambda/delta and share reward delta*b*(1-f).
PoolTerms pool_terms(const PoolOffer& offer, double miner_block_rate, double block_reward);

// Pool lists must come sorted with share rates strictly ascending and share
// rewards strictly descending (exact duplicates of a whole entry are
// tolerated so that literally identical pools can coexist).
void validate_pool_ordering(const std::vector<PoolTerms>& pools);

// Point on the unit simplex distributing hashpower over pools; index 0 is
// solo by convention. Immutable after construction.
class Allocation {
public:
    // Requires nonnegative weights summing to 1 within 1e-12; the stored
    // weights are rescaled so they sum to 1 exactly up to rounding.
    explicit Allocation(std::vector<double> weights);

    // Accepts any nonnegative, nonzero vector and normalizes it.
    static Allocation normalized(std::vector<double> weights);

    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t k) const { return weights_[k]; }

private:
    struct normalized_tag {};
    Allocation(std::vector<double> weights, normalized_tag);

    std::vector<double> weights_;
};

// Surplus model: downward drift plus compound-Poisson gains with a finite
// discrete jump distribution. Atoms are sorted by jump size, zero-probability
// atoms dropped, and duplicate jump sizes merged. Immutable.
class CompoundPoissonModel {
public:
    struct Atom {
        double probability;
        double jump_size;
    };

    CompoundPoissonModel(double drift, double total_intensity, std::vector<Atom> atoms);

    double drift() const { return drift_; }
    double total_intensity() const { return total_intensity_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double min_jump() const { return min_jump_; }
    double mean_jump() const { return mean_jump_; }

private:
    double drift_;
    double total_intensity_;
    std::vector<Atom> atoms_;
    double min_jump_;
    double mean_jump_;
};

// Assembles the surplus model induced by spreading hashpower over pools:
// reward intensity lambda_k * w_k from pool k, drift = cost rate. Zero-weight
// pools are excluded; pools with equal rewards merge into one atom.
CompoundPoissonModel build_model(const MinerProfile& miner,
                                 const std::vector<PoolTerms>& pools,
                                 const Allocation& allocation);

}  // namespace hashalloc

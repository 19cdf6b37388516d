#include "hashalloc/scenario.hpp"

#include <fstream>
#include <stdexcept>

#include "hashalloc/levy.hpp"

namespace hashalloc {

namespace {

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw std::invalid_argument(std::string("scenario: missing numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return j[key].get<double>();
}

}  // namespace

std::vector<PoolTerms> Scenario::pool_terms_list() const {
    std::vector<PoolTerms> terms;
    terms.reserve(pools.size());
    for (const auto& p : pools) terms.push_back(p.terms);
    return terms;
}

Scenario parse_scenario(const nlohmann::json& j) {
    if (!j.contains("miner") || !j["miner"].is_object()) {
        throw std::invalid_argument("scenario: missing 'miner' object");
    }
    const auto& jm = j["miner"];
    const double block_rate = require_number(jm, "block_rate");
    const double cost_rate = require_number(jm, "cost_rate");
    const double block_reward = require_number(j, "block_reward");
    const std::optional<double> gamma = optional_number(jm, "risk_aversion");
    const std::optional<double> beta = optional_number(jm, "target_ruin_prob");

    std::optional<double> wealth = optional_number(jm, "initial_wealth");
    if (!wealth) {
        if (!beta) {
            throw std::invalid_argument(
                "scenario: miner needs initial_wealth or target_ruin_prob");
        }
        const CompoundPoissonModel solo(cost_rate, block_rate, {{1.0, block_reward}});
        wealth = initial_wealth_for_ruin(solo, *beta);
    }
    MinerProfile miner(block_rate, cost_rate, *wealth, gamma, beta);

    Scenario sc{miner, block_reward, j.value("q", 0.1), j.value("no_solo", false), {}};

    if (!sc.no_solo) {
        sc.pools.push_back(
            {PoolOffer::solo(), pool_terms(PoolOffer::solo(), block_rate, block_reward)});
    }
    if (j.contains("pools")) {
        if (!j["pools"].is_array()) throw std::invalid_argument("scenario: 'pools' must be an array");
        for (const auto& jp : j["pools"]) {
            const bool has_offer = jp.contains("fee") || jp.contains("difficulty_reduction");
            const bool has_terms = jp.contains("share_rate") || jp.contains("share_reward");
            if (has_offer == has_terms) {
                throw std::invalid_argument(
                    "scenario: each pool entry must carry either (fee, difficulty_reduction) "
                    "or (share_rate, share_reward), not both");
            }
            if (has_offer) {
                PoolOffer offer(require_number(jp, "fee"), require_number(jp, "difficulty_reduction"));
                sc.pools.push_back({offer, pool_terms(offer, block_rate, block_reward)});
            } else {
                sc.pools.push_back({std::nullopt, PoolTerms(require_number(jp, "share_rate"),
                                                            require_number(jp, "share_reward"))});
            }
        }
    }
    if (sc.pools.empty()) throw std::invalid_argument("scenario: no pools (and no_solo set)");
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    nlohmann::json j;
    in >> j;
    return parse_scenario(j);
}

}  // namespace hashalloc
